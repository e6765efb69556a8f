#include "imstb/ua/user_agent.hpp"

#include <algorithm>

#include "imstb/sip/builders.hpp"

namespace imstb::ua {

std::string_view to_string(RegState s) {
  switch (s) {
    case RegState::Idle: return "Idle";
    case RegState::Registering: return "Registering";
    case RegState::Registered: return "Registered";
    case RegState::Failed: return "Failed";
  }
  return "?";
}

std::string_view to_string(RegFailure f) {
  switch (f) {
    case RegFailure::None: return "None";
    case RegFailure::BadPasskey: return "BadPasskey";
    case RegFailure::Unreachable: return "Unreachable";
    case RegFailure::Rejected: return "Rejected";
  }
  return "?";
}

std::string_view to_string(SubOutcome s) {
  switch (s) {
    case SubOutcome::None: return "None";
    case SubOutcome::Pending: return "Pending";
    case SubOutcome::Active: return "Active";
    case SubOutcome::NotAuthorized: return "NotAuthorized";
    case SubOutcome::Failed: return "Failed";
    case SubOutcome::Terminated: return "Terminated";
  }
  return "?";
}

std::string_view to_string(SubmitOutcome s) {
  switch (s) {
    case SubmitOutcome::Pending: return "Pending";
    case SubmitOutcome::Accepted: return "Accepted";
    case SubmitOutcome::DuplicateSubmission: return "DuplicateSubmission";
    case SubmitOutcome::ExamNotOpen: return "ExamNotOpen";
    case SubmitOutcome::NotAMember: return "NotAMember";
    case SubmitOutcome::MalformedAnswers: return "MalformedAnswers";
    case SubmitOutcome::Unauthorized: return "Unauthorized";
    case SubmitOutcome::Failed: return "Failed";
  }
  return "?";
}

SubmitOutcome submit_outcome_from(std::string_view reason) {
  for (auto s : {SubmitOutcome::Accepted, SubmitOutcome::DuplicateSubmission, SubmitOutcome::ExamNotOpen,
                 SubmitOutcome::NotAMember, SubmitOutcome::MalformedAnswers, SubmitOutcome::Unauthorized})
    if (to_string(s) == reason) return s;
  return SubmitOutcome::Failed;
}

UserAgent::UserAgent(net::Runtime& runtime, UaConfig config, std::string name, net::TimerConfig timers)
    : SipNode(runtime, config.local, std::move(name), timers), config_(std::move(config)) {
  reg_call_id_ = endpoint().ids().next_call_id();
}

std::optional<SubmitOutcome> UserAgent::submission(const std::string& exam_id) const {
  const auto it = submissions_.find(exam_id);
  if (it == submissions_.end()) return std::nullopt;
  return it->second;
}

sip::SipMessage UserAgent::new_request(sip::Method method, const sip::SipUri& target, const sip::SipUri& to,
                                       const std::string& call_id, std::uint32_t cseq) {
  auto req = sip::make_request(method, target, config_.identity, to, call_id, cseq, address(), endpoint().ids());
  req.contact = sip::NameAddr{{}, sip::SipUri{config_.identity.user, address().host, address().port, {}}, {}};
  return req;
}

void UserAgent::set_reg(RegState s, std::string_view cause) {
  if (s == reg_) return;
  transition(to_string(reg_), to_string(s), cause);
  reg_ = s;
}

void UserAgent::register_ua() {
  if (reg_ != RegState::Idle && reg_ != RegState::Failed)
    throw UaError("register requires state Idle or Failed, not " + std::string(to_string(reg_)));
  failure_ = RegFailure::None;
  set_reg(RegState::Registering, "register");
  send_register(config_.requested_expires);
}

void UserAgent::deregister() {
  if (reg_ != RegState::Registered) throw UaError("deregister requires state Registered");
  if (refresh_timer_) runtime().cancel(refresh_timer_);
  refresh_timer_ = 0;
  send_register(0);
}

void UserAgent::send_register(std::uint32_t expires) {
  sip::SipUri domain;
  domain.host = config_.identity.host;
  auto req = new_request(sip::Method::Register, domain, config_.identity, reg_call_id_, ++reg_cseq_);
  req.expires = expires;
  req.set_header("X-Passkey", config_.passkey);
  endpoint().send_request(req, config_.pcscf,
                          {[this, expires](const sip::SipMessage& r) { on_register_response(r, expires); },
                           [this] {
                             failure_ = RegFailure::Unreachable;
                             set_reg(RegState::Failed, "timeout");
                           }});
}

void UserAgent::on_register_response(const sip::SipMessage& resp, std::uint32_t asked) {
  if (sip::status_class(resp.status) == 1) return;
  if (resp.status == sip::StatusCode::Ok) {
    if (asked == 0) {
      granted_ = 0;
      set_reg(RegState::Idle, "deregistered");
      return;
    }
    granted_ = resp.expires.value_or(asked);
    set_reg(RegState::Registered, "200 REGISTER");
    if (config_.auto_refresh && granted_ > 0) {
      if (refresh_timer_) runtime().cancel(refresh_timer_);
      const net::Duration at{static_cast<std::int64_t>(granted_) * 800};
      refresh_timer_ = runtime().schedule_after(at, [this] {
        refresh_timer_ = 0;
        if (reg_ != RegState::Registered) return;
        ++refreshes_;
        send_register(config_.requested_expires);
      });
    }
    return;
  }
  if (asked == 0) return;  // failed deregistration leaves the binding in place
  switch (resp.status) {
    case sip::StatusCode::Forbidden: failure_ = RegFailure::BadPasskey; break;
    case sip::StatusCode::RequestTimeout: failure_ = RegFailure::Unreachable; break;
    default: failure_ = RegFailure::Rejected; break;
  }
  set_reg(RegState::Failed, resp.summary());
}

void UserAgent::subscribe_exam_service() {
  if (reg_ != RegState::Registered) throw UaError("subscribe requires a registration");
  const auto call_id = endpoint().ids().next_call_id();
  auto req = new_request(sip::Method::Subscribe, config_.exam_service, config_.exam_service, call_id, ++sub_cseq_);
  req.event = "exam-service";
  req.expires = 3600;
  sub_ = net::Subscription{{call_id, std::string(req.from.tag().value_or("")), ""}, "exam-service",
                           net::Instant{0}, net::SubState::Pending};
  sub_remote_ = req.to;
  sub_outcome_ = SubOutcome::Pending;
  endpoint().send_request(req, config_.pcscf,
                          {[this](const sip::SipMessage& r) {
                             if (sip::status_class(r.status) == 1) return;
                             if (sip::status_class(r.status) == 2) {
                               if (sub_ && sub_->dialog.remote_tag.empty()) {
                                 sub_->dialog.remote_tag = std::string(r.to.tag().value_or(""));
                                 sub_remote_ = r.to;
                               }
                               if (sub_) sub_->expires_at = now() + std::chrono::seconds(r.expires.value_or(0));
                               return;
                             }
                             sub_outcome_ = r.status == sip::StatusCode::Forbidden ? SubOutcome::NotAuthorized
                                                                                   : SubOutcome::Failed;
                             if (sub_) sub_->state = net::SubState::Terminated;
                           },
                           [this] { sub_outcome_ = SubOutcome::Failed; }});
}

void UserAgent::unsubscribe() {
  if (!sub_ || sub_->state == net::SubState::Terminated) throw UaError("no subscription to end");
  auto req = new_request(sip::Method::Subscribe, config_.exam_service, config_.exam_service, sub_->dialog.call_id,
                         ++sub_cseq_);
  req.from.set_tag(sub_->dialog.local_tag);
  req.to = sub_remote_;
  req.event = "exam-service";
  req.expires = 0;
  endpoint().send_request(req, config_.pcscf);
}

void UserAgent::on_request(const sip::SipMessage& req, const net::NetAddress&) {
  switch (req.method) {
    case sip::Method::Message: on_message(req); break;
    case sip::Method::Notify: on_notify(req); break;
    case sip::Method::Ack: break;
    default: respond(req, sip::StatusCode::TemporarilyUnavailable); break;
  }
}

void UserAgent::on_notify(const sip::SipMessage& req) {
  respond(req, sip::StatusCode::Ok);
  if (!sub_ || req.call_id != sub_->dialog.call_id) return;
  const auto state = std::string(req.header("Subscription-State").value_or(req.body));
  if (state.rfind("active", 0) == 0) {
    if (sub_->state != net::SubState::Active) transition("Pending", "Active", "NOTIFY active");
    sub_->state = net::SubState::Active;
    sub_outcome_ = SubOutcome::Active;
  } else if (state.rfind("terminated", 0) == 0) {
    if (sub_->state != net::SubState::Terminated) transition(to_string(sub_outcome_), "Terminated", "NOTIFY terminated");
    sub_->state = net::SubState::Terminated;
    sub_outcome_ = SubOutcome::Terminated;
  }
}

void UserAgent::on_message(const sip::SipMessage& req) {
  const auto type = req.content_type.value_or("");
  nlohmann::json body;
  if (type == kExamType || type == kResultType || type == kReceiptType) {
    body = nlohmann::json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) {
      respond(req, sip::StatusCode::TemporarilyUnavailable);
      return;
    }
  } else {
    respond(req, sip::StatusCode::TemporarilyUnavailable);
    return;
  }
  respond(req, sip::StatusCode::Ok);

  if (type == kReceiptType) {
    const auto exam_id = body.value("exam_id", std::string());
    submissions_[exam_id] = body.value("accepted", false)
                                ? SubmitOutcome::Accepted
                                : submit_outcome_from(body.value("reason", std::string("Failed")));
    return;
  }
  const bool exam = type == kExamType;
  inbox_.push_back({exam ? InboxItem::Kind::Exam : InboxItem::Kind::Result, body, now()});
  if (exam && config_.auto_answer) {
    const auto exam_id = body.value("exam_id", std::string());
    runtime().schedule_after(config_.answer_delay, [this, exam_id] {
      try {
        submit_answers(exam_id, *config_.auto_answer, config_.auto_channel);
      } catch (const UaError&) {
        submissions_[exam_id] = SubmitOutcome::Failed;
      }
    });
  }
}

void UserAgent::submit_answers(const std::string& exam_id, const Answers& answers, Channel channel) {
  const bool known = std::any_of(inbox_.begin(), inbox_.end(), [&](const InboxItem& item) {
    return item.kind == InboxItem::Kind::Exam && item.body.value("exam_id", std::string()) == exam_id;
  });
  if (!known) throw UaError("exam " + exam_id + " is not in the inbox");
  if (channel == Channel::Sip) submit_sip(exam_id, answers);
  else submit_http(exam_id, answers);
}

void UserAgent::submit_sip(const std::string& exam_id, const Answers& answers) {
  if (reg_ != RegState::Registered) throw UaError("SIP submission requires a registration");
  auto req = new_request(sip::Method::Message, config_.exam_service, config_.exam_service,
                         endpoint().ids().next_call_id(), ++msg_cseq_);
  req.content_type = std::string(kAnswersType);
  req.body = nlohmann::json{{"exam_id", exam_id}, {"answers", answers}}.dump();
  submissions_[exam_id] = SubmitOutcome::Pending;
  endpoint().send_request(req, config_.pcscf,
                          {[this, exam_id](const sip::SipMessage& r) {
                             if (sip::status_class(r.status) >= 3) submissions_[exam_id] = SubmitOutcome::Failed;
                           },
                           [this, exam_id] { submissions_[exam_id] = SubmitOutcome::Failed; }});
}

void UserAgent::submit_http(const std::string& exam_id, const Answers& answers) {
  if (!http_) throw UaError("no HTTP endpoint configured");
  if (!token_) {
    util::HttpRequest login{"POST", "/api/login", {}, {{"content-type", "application/json"}},
                            nlohmann::json{{"user", aor()}, {"passkey", config_.passkey}}.dump()};
    const auto resp = http_(login);
    if (resp.status != 200) {
      submissions_[exam_id] = SubmitOutcome::Unauthorized;
      return;
    }
    token_ = nlohmann::json::parse(resp.body).at("token").get<std::string>();
  }
  util::HttpRequest post{"POST", "/api/exams/" + exam_id + "/submissions", {},
                         {{"content-type", "application/json"}, {"authorization", "Bearer " + *token_}},
                         nlohmann::json{{"answers", answers}}.dump()};
  const auto resp = http_(post);
  if (resp.status == 201 || resp.status == 200) {
    submissions_[exam_id] = SubmitOutcome::Accepted;
    return;
  }
  const auto body = nlohmann::json::parse(resp.body, nullptr, false);
  submissions_[exam_id] =
      body.is_object() ? submit_outcome_from(body.value("error", std::string())) : SubmitOutcome::Failed;
}

}  // namespace imstb::ua
