#include "imstb/exam/as_node.hpp"

#include "imstb/exam/content_types.hpp"
#include "imstb/sip/builders.hpp"

namespace imstb::exam {

ExamAsNode::ExamAsNode(net::Runtime& runtime, net::NetAddress self, Config config, xdms::DocumentStore& docs,
                       Authenticator auth, net::TimerConfig timers)
    : SipNode(runtime, std::move(self), "as", timers),
      config_(std::move(config)),
      service_(docs, *this),
      api_(service_, std::move(auth), [this] { return now(); }) {
  service_.set_schedule_listener([this] { arm_scheduler(); });
}

void ExamAsNode::arm_scheduler() {
  const auto next = service_.next_fire_at();
  if (next == armed_at_) return;
  if (timer_) runtime().cancel(timer_);
  timer_ = 0;
  armed_at_ = next;
  if (!next) return;
  timer_ = runtime().schedule_at(std::max(*next, now()), [this] {
    timer_ = 0;
    armed_at_.reset();
    for (const auto& job : service_.scheduler_tick(now()))
      transition(job.action == JobAction::OpenAndDeliver ? "Scheduled" : "Open",
                 job.action == JobAction::OpenAndDeliver ? "Open" : "Graded",
                 std::string(to_string(job.action)) + " " + job.exam_id);
    arm_scheduler();
  });
}

void ExamAsNode::send_message(const std::string& aor, std::string_view content_type, std::string body,
                              std::function<void(int)> done) {
  const auto target = sip::SipUri::parse("sip:" + aor);
  auto req = sip::make_request(sip::Method::Message, target, config_.service_uri, target,
                               endpoint().ids().next_call_id(), 1, address(), endpoint().ids());
  req.content_type = std::string(content_type);
  req.body = std::move(body);
  try {
    endpoint().send_request(std::move(req), config_.scscf,
                            {[done](const sip::SipMessage& r) {
                               if (sip::status_class(r.status) >= 2 && done) done(sip::code_of(r.status));
                             },
                             [done] {
                               if (done) done(sip::code_of(sip::StatusCode::RequestTimeout));
                             }});
  } catch (const net::UnknownDestination&) {
    if (done) done(sip::code_of(sip::StatusCode::ServerInternalError));
  }
}

void ExamAsNode::on_request(const sip::SipMessage& req, const net::NetAddress&) {
  if (req.method == sip::Method::Ack) return;
  if (req.method != sip::Method::Message) {
    respond(req, sip::StatusCode::NotFound);
    return;
  }
  if (req.content_type.value_or("") != kAnswersType) {
    respond(req, sip::StatusCode::TemporarilyUnavailable);
    return;
  }
  on_submission(req);
}

void ExamAsNode::on_submission(const sip::SipMessage& req) {
  const auto body = nlohmann::json::parse(req.body, nullptr, false);
  Submission s;
  try {
    s.exam_id = body.at("exam_id").get<std::string>();
    s.answers = body.at("answers").get<Answers>();
  } catch (const nlohmann::json::exception&) {
    respond(req, sip::StatusCode::BadRequest);
    return;
  }
  s.student = req.from.uri.aor();
  s.submitted_at = now();
  s.channel = SubmissionChannel::SipMessage;
  respond(req, sip::StatusCode::Ok);

  nlohmann::json receipt = {{"exam_id", s.exam_id}, {"accepted", true}};
  const auto student = s.student;
  try {
    service_.accept_submission(std::move(s));
  } catch (const ExamError& e) {
    receipt["accepted"] = false;
    receipt["reason"] = to_string(e.code());
  }
  send_message(student, kReceiptType, receipt.dump(), {});
}

}  // namespace imstb::exam
