#pragma once

#include <map>
#include <optional>
#include <string>

#include "imstb/ims/proxy.hpp"

namespace imstb::flow {

/// Static location table: AOR -> contact address.
using Locations = std::map<std::string, net::NetAddress>;

/// Plain SIP proxy outside the IMS chain: forwards by Request-URI.
class LocationProxy : public ims::ProxyNode {
 public:
  LocationProxy(net::Runtime& runtime, net::NetAddress self, Locations locations, net::TimerConfig timers = {});

 protected:
  void on_request(const sip::SipMessage& req, const net::NetAddress& from) override;

 private:
  Locations locations_;
};

/// Answers every INVITE with 302 and the callee's contact; forwards nothing.
class RedirectServer : public net::SipNode {
 public:
  RedirectServer(net::Runtime& runtime, net::NetAddress self, Locations locations, net::TimerConfig timers = {});

 protected:
  void on_request(const sip::SipMessage& req, const net::NetAddress& from) override;

 private:
  Locations locations_;
};

enum class CallState { Idle, Calling, Connected, Failed };
std::string_view to_string(CallState s);

/// Minimal caller/callee: INVITE, 200, ACK. A 3xx makes the caller retry the
/// INVITE directly at the returned contact.
class BasicUa : public net::SipNode {
 public:
  BasicUa(net::Runtime& runtime, net::NetAddress self, sip::SipUri aor, std::string name,
          net::TimerConfig timers = {});

  void invite(const sip::SipUri& target, const net::NetAddress& first_hop);

  CallState state() const { return state_; }
  const sip::SipUri& aor() const { return aor_; }
  int redirects_followed() const { return redirects_; }

 protected:
  void on_request(const sip::SipMessage& req, const net::NetAddress& from) override;

 private:
  void send_invite(const net::NetAddress& hop);
  void on_invite_response(const sip::SipMessage& resp, const sip::SipMessage& invite, const net::NetAddress& hop);
  void set_state(CallState s, std::string_view cause);

  sip::SipUri aor_;
  CallState state_ = CallState::Idle;
  std::optional<sip::SipUri> target_;
  std::string call_id_;
  std::uint32_t cseq_ = 0;
  int redirects_ = 0;
};

}  // namespace imstb::flow
