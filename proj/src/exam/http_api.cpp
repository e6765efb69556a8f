#include "imstb/exam/http_api.hpp"

#include "imstb/util/sha256.hpp"

namespace imstb::exam {

using util::HttpRequest;
using util::HttpResponse;

namespace {

std::string normalise_user(std::string user) {
  if (user.rfind("sip:", 0) == 0) user.erase(0, 4);
  return user;
}

nlohmann::json roles_json(const Credential& c) {
  auto out = nlohmann::json::array();
  for (const auto r : c.roles) out.push_back(hss::to_string(r));
  return out;
}

HttpResponse from_error(const ExamError& e) { return HttpResponse::error(http_status(e.code()), to_string(e.code()), e.what()); }

nlohmann::json student_view(const Exam& e) {
  if (e.state == ExamState::Graded) return e;
  auto j = redacted_json(e);
  j["open_at"] = e.open_at.count();
  j["group_uri"] = e.group_uri.to_string();
  j["state"] = to_string(e.state);
  return j;
}

}  // namespace

int http_status(ExamErrc e) {
  switch (e) {
    case ExamErrc::NotTeacher: return 403;
    case ExamErrc::UnknownGroup: return 404;
    case ExamErrc::InvalidSchedule: return 400;
    case ExamErrc::InvalidExam: return 400;
    case ExamErrc::UnknownExam: return 404;
    case ExamErrc::WrongState: return 404;
    case ExamErrc::ExamNotOpen: return 403;
    case ExamErrc::NotAMember: return 403;
    case ExamErrc::DuplicateSubmission: return 409;
    case ExamErrc::MalformedAnswers: return 400;
    case ExamErrc::ExamExists: return 409;
  }
  return 500;
}

Authenticator hss_authenticator(const hss::HssStore& store) {
  return [&store](const std::string& user, const std::string& passkey) -> std::optional<Credential> {
    const auto aor = normalise_user(user);
    if (!store.verify_passkey(aor, passkey)) return std::nullopt;
    return Credential{aor, store.find_impu(aor)->roles};
  };
}

ExamHttpApi::ExamHttpApi(ExamService& service, Authenticator auth, Clock clock)
    : service_(service), auth_(std::move(auth)), clock_(std::move(clock)) {}

std::string ExamHttpApi::new_token() {
  if (counter_tokens_) return "tok-" + std::to_string(++token_counter_);
  return util::random_hex(16);
}

HttpResponse ExamHttpApi::handle(const HttpRequest& req) {
  const auto parts = util::split_path(req.path);
  if (parts.size() < 2 || parts[0] != "api") return HttpResponse::error(404, "NotFound", req.path);
  if (parts.size() == 2 && parts[1] == "login") {
    if (req.method != "POST") return HttpResponse::error(405, "MethodNotAllowed", req.method);
    return login(req);
  }
  if (parts[1] != "exams") return HttpResponse::error(404, "NotFound", req.path);

  const auto token = req.bearer();
  const auto it = token ? tokens_.find(*token) : tokens_.end();
  if (it == tokens_.end()) return HttpResponse::error(401, "Unauthorized", "missing or unknown bearer token");
  const auto& who = it->second;

  try {
    if (parts.size() == 2 && req.method == "POST") return create_exam(who, req);
    if (parts.size() == 3 && parts[2] == "active" && req.method == "GET") return active(who, req);
    if (parts.size() == 3 && req.method == "GET") return get_exam(who, parts[2]);
    if (parts.size() == 4 && parts[3] == "submissions" && req.method == "POST") return submit(who, parts[2], req);
    if (parts.size() == 4 && parts[3] == "results" && req.method == "GET") return results(who, parts[2]);
    if (parts.size() == 4 && parts[3] == "report" && req.method == "GET") return report(who, parts[2]);
  } catch (const ExamError& e) {
    return from_error(e);
  } catch (const nlohmann::json::exception& e) {
    return HttpResponse::error(400, "MalformedRequest", e.what());
  }
  return HttpResponse::error(404, "NotFound", req.method + " " + req.path);
}

HttpResponse ExamHttpApi::login(const HttpRequest& req) {
  const auto body = nlohmann::json::parse(req.body, nullptr, false);
  if (!body.is_object() || !body.contains("user") || !body.contains("passkey") || !body["user"].is_string() ||
      !body["passkey"].is_string())
    return HttpResponse::error(400, "MalformedRequest", "expected {user, passkey}");
  const auto cred = auth_(body["user"].get<std::string>(), body["passkey"].get<std::string>());
  if (!cred) return HttpResponse::error(401, "Unauthorized", "bad credential");
  const auto token = new_token();
  tokens_[token] = *cred;
  return HttpResponse::json(200, {{"token", token}, {"user", cred->user}, {"roles", roles_json(*cred)}});
}

HttpResponse ExamHttpApi::create_exam(const Credential& who, const HttpRequest& req) {
  if (!who.has(hss::Role::Teacher)) throw ExamError(ExamErrc::NotTeacher, who.user);
  const auto spec = nlohmann::json::parse(req.body).get<Exam>();
  const auto id = service_.provision_exam(spec, who);
  return HttpResponse::json(201, {{"exam_id", id}, {"state", to_string(service_.exam(id).state)}});
}

HttpResponse ExamHttpApi::get_exam(const Credential& who, const std::string& id) {
  const auto& e = service_.exam(id);
  if (who.has(hss::Role::Teacher)) return HttpResponse::json(200, e);
  if (!service_.is_member(e, who.user)) throw ExamError(ExamErrc::NotAMember, who.user);
  return HttpResponse::json(200, student_view(e));
}

HttpResponse ExamHttpApi::active(const Credential& who, const HttpRequest& req) {
  const auto q = req.query.find("student");
  const auto student = q == req.query.end() ? who.user : normalise_user(q->second);
  if (student != who.user && !who.has(hss::Role::Teacher))
    return HttpResponse::error(403, "Forbidden", "students may only list their own exams");
  auto list = nlohmann::json::array();
  for (const auto& [exam_id, e] : service_.exams())
    if (e.state == ExamState::Open && service_.is_member(e, student)) list.push_back(student_view(e));
  return HttpResponse::json(200, {{"student", student}, {"exams", list}});
}

HttpResponse ExamHttpApi::submit(const Credential& who, const std::string& id, const HttpRequest& req) {
  if (!who.has(hss::Role::Student)) return HttpResponse::error(403, "NotStudent", who.user);
  const auto body = nlohmann::json::parse(req.body);
  Submission s{id, who.user, body.at("answers").get<Answers>(), clock_(), SubmissionChannel::HttpApi};
  service_.accept_submission(std::move(s));
  return HttpResponse::json(201, {{"exam_id", id}, {"student", who.user}, {"accepted", true}});
}

HttpResponse ExamHttpApi::results(const Credential& who, const std::string& id) {
  const auto& e = service_.exam(id);
  if (e.state != ExamState::Graded) throw ExamError(ExamErrc::WrongState, id + " is not Graded");
  const auto& reports = service_.reports(id);
  if (who.has(hss::Role::Teacher)) {
    auto list = nlohmann::json::array();
    for (const auto& [student, r] : reports) list.push_back(r);
    return HttpResponse::json(200, {{"exam_id", id}, {"results", list}});
  }
  const auto it = reports.find(who.user);
  if (it == reports.end()) throw ExamError(ExamErrc::NotAMember, who.user);
  return HttpResponse::json(200, it->second);
}

HttpResponse ExamHttpApi::report(const Credential& who, const std::string& id) {
  if (!who.has(hss::Role::Teacher)) throw ExamError(ExamErrc::NotTeacher, who.user);
  const auto& e = service_.exam(id);
  auto delivery = nlohmann::json::object();
  for (const auto& [aor, d] : service_.delivery(id))
    delivery[aor] = {{"status", to_string(d.status)}, {"code", d.code}};
  nlohmann::json out = {{"exam_id", id},
                        {"state", to_string(e.state)},
                        {"members", service_.members(e).size()},
                        {"submissions", service_.submissions(id).size()},
                        {"max_score", e.max_score()},
                        {"delivery", delivery}};
  if (e.state == ExamState::Graded) {
    std::int64_t total = 0;
    for (const auto& [student, r] : service_.reports(id))
      if (r.submitted) total += r.score;
    const auto n = service_.submissions(id).size();
    out["mean"] = n == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(n);
  }
  return HttpResponse::json(200, out);
}

}  // namespace imstb::exam
