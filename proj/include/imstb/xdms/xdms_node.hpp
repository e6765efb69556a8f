#pragma once

#include <map>
#include <string>
#include <vector>

#include "imstb/net/endpoint.hpp"
#include "imstb/net/subscription.hpp"
#include "imstb/xdms/store.hpp"

namespace imstb::xdms {

inline constexpr std::string_view kExamServiceEvent = "exam-service";
inline constexpr std::uint32_t kMaxSubscriptionSeconds = 3600;

/// Server side of an exam-service subscription.
struct ExamSubscription {
  std::string subscriber;  // AOR
  net::DialogId dialog;
  sip::NameAddr local;   // our From in NOTIFY
  sip::NameAddr remote;  // our To in NOTIFY
  net::NetAddress next_hop;
  std::uint32_t cseq = 0;
  net::Instant expires_at{0};
};

/// SIP face of the XDMS: authorizes exam-service subscriptions against the
/// stored groups and notifies subscribers of state and exam document changes.
class XdmsNode : public net::SipNode {
 public:
  XdmsNode(net::Runtime& runtime, net::NetAddress self, XdmStore& store, net::TimerConfig timers = {});

  /// Unexpired subscriptions keyed by subscriber AOR.
  std::vector<const ExamSubscription*> active_subscriptions() const;
  std::size_t notifies_sent() const { return notifies_sent_; }

 protected:
  void on_request(const sip::SipMessage& req, const net::NetAddress& from) override;

 private:
  void handle_subscribe(const sip::SipMessage& req, const net::NetAddress& from);
  void notify(ExamSubscription& sub, std::string_view state, std::string_view changed = {});
  void on_store_change(const XdmDocument& doc);
  bool live(const ExamSubscription& sub) const { return sub.expires_at > now(); }

  XdmStore& store_;
  std::map<std::string, ExamSubscription> subs_;
  std::size_t notifies_sent_ = 0;
};

}  // namespace imstb::xdms
