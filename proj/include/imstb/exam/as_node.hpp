#pragma once

#include <memory>

#include "imstb/exam/http_api.hpp"
#include "imstb/exam/service.hpp"
#include "imstb/net/endpoint.hpp"

namespace imstb::exam {

/// The exam application server on the ISC side of the S-CSCF: sends exams and
/// results as MESSAGEs, takes SIP submissions, and runs the scheduler off
/// runtime timers.
class ExamAsNode : public net::SipNode, public Messenger {
 public:
  struct Config {
    net::NetAddress scscf;
    sip::SipUri service_uri = sip::SipUri::parse("sip:exam@ims.kau.test");
  };

  ExamAsNode(net::Runtime& runtime, net::NetAddress self, Config config, xdms::DocumentStore& docs,
             Authenticator auth, net::TimerConfig timers = {});

  ExamService& service() { return service_; }
  const ExamService& service() const { return service_; }
  ExamHttpApi& api() { return api_; }

  /// HTTP entry point; runs on the node's event loop.
  util::HttpResponse http(const util::HttpRequest& req) { return api_.handle(req); }

  void send_message(const std::string& aor, std::string_view content_type, std::string body,
                    std::function<void(int)> done) override;

 protected:
  void on_request(const sip::SipMessage& req, const net::NetAddress& from) override;

 private:
  void on_submission(const sip::SipMessage& req);
  void arm_scheduler();

  Config config_;
  ExamService service_;
  ExamHttpApi api_;
  net::Runtime::TimerId timer_ = 0;
  std::optional<net::Instant> armed_at_;
};

}  // namespace imstb::exam
