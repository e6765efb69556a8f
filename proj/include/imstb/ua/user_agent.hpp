#pragma once

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "imstb/exam/content_types.hpp"
#include "imstb/net/endpoint.hpp"
#include "imstb/net/subscription.hpp"
#include "imstb/util/http.hpp"

namespace imstb::ua {

using exam::kAnswersType;
using exam::kExamType;
using exam::kReceiptType;
using exam::kResultType;

enum class RegState { Idle, Registering, Registered, Failed };
enum class RegFailure { None, BadPasskey, Unreachable, Rejected };
enum class SubOutcome { None, Pending, Active, NotAuthorized, Failed, Terminated };
enum class SubmitOutcome { Pending, Accepted, DuplicateSubmission, ExamNotOpen, NotAMember, MalformedAnswers,
                           Unauthorized, Failed };
enum class Channel { Sip, Http };

std::string_view to_string(RegState s);
std::string_view to_string(RegFailure f);
std::string_view to_string(SubOutcome s);
std::string_view to_string(SubmitOutcome s);
SubmitOutcome submit_outcome_from(std::string_view reason);

/// Local precondition failures (e.g. subscribing before registering).
class UaError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

using Answers = std::map<std::string, int>;

struct UaConfig {
  sip::SipUri identity;
  std::string passkey;
  net::NetAddress pcscf;
  net::NetAddress local;
  /// Scripted mode: answers sent automatically when an exam arrives.
  std::optional<Answers> auto_answer;
  Channel auto_channel = Channel::Sip;
  net::Duration answer_delay{1000};
  /// Re-register at 80% of the granted expiry.
  bool auto_refresh = false;
  std::uint32_t requested_expires = 3600;
  sip::SipUri exam_service = sip::SipUri::parse("sip:exam@ims.kau.test");
};

struct InboxItem {
  enum class Kind { Exam, Result };
  Kind kind = Kind::Exam;
  nlohmann::json body;
  net::Instant at{0};
};

/// Synchronous HTTP exchange with the exam AS (in process or over a socket).
using HttpCall = std::function<util::HttpResponse(const util::HttpRequest&)>;

class UserAgent : public net::SipNode {
 public:
  UserAgent(net::Runtime& runtime, UaConfig config, std::string name, net::TimerConfig timers = {});

  /// Pre: Idle or Failed.
  void register_ua();
  /// Pre: Registered. REGISTER with Expires: 0.
  void deregister();
  /// Pre: Registered; throws UaError otherwise.
  void subscribe_exam_service();
  void unsubscribe();
  /// Pre: exam in inbox and, for SIP, Registered.
  void submit_answers(const std::string& exam_id, const Answers& answers, Channel channel);

  void set_http(HttpCall http) { http_ = std::move(http); }

  const UaConfig& config() const { return config_; }
  RegState registration() const { return reg_; }
  RegFailure failure() const { return failure_; }
  std::uint32_t granted_expires() const { return granted_; }
  SubOutcome subscription() const { return sub_outcome_; }
  const std::optional<net::Subscription>& dialog() const { return sub_; }
  const std::vector<InboxItem>& inbox() const { return inbox_; }
  std::optional<SubmitOutcome> submission(const std::string& exam_id) const;
  std::size_t refreshes() const { return refreshes_; }
  std::string aor() const { return config_.identity.aor(); }

 protected:
  void on_request(const sip::SipMessage& req, const net::NetAddress& from) override;

 private:
  sip::SipMessage new_request(sip::Method method, const sip::SipUri& target, const sip::SipUri& to,
                              const std::string& call_id, std::uint32_t cseq);
  void send_register(std::uint32_t expires);
  void on_register_response(const sip::SipMessage& resp, std::uint32_t asked);
  void set_reg(RegState s, std::string_view cause);
  void on_message(const sip::SipMessage& req);
  void on_notify(const sip::SipMessage& req);
  void submit_sip(const std::string& exam_id, const Answers& answers);
  void submit_http(const std::string& exam_id, const Answers& answers);

  UaConfig config_;
  RegState reg_ = RegState::Idle;
  RegFailure failure_ = RegFailure::None;
  std::uint32_t granted_ = 0;
  std::string reg_call_id_;
  std::uint32_t reg_cseq_ = 0;
  net::Runtime::TimerId refresh_timer_ = 0;
  std::size_t refreshes_ = 0;

  std::optional<net::Subscription> sub_;
  SubOutcome sub_outcome_ = SubOutcome::None;
  sip::NameAddr sub_remote_;
  std::uint32_t sub_cseq_ = 0;

  std::uint32_t msg_cseq_ = 0;
  std::vector<InboxItem> inbox_;
  std::map<std::string, SubmitOutcome> submissions_;
  HttpCall http_;
  std::optional<std::string> token_;
};

}  // namespace imstb::ua
