#include "imstb/flow/nodes.hpp"

#include "imstb/sip/builders.hpp"

namespace imstb::flow {

std::string_view to_string(CallState s) {
  switch (s) {
    case CallState::Idle: return "Idle";
    case CallState::Calling: return "Calling";
    case CallState::Connected: return "Connected";
    case CallState::Failed: return "Failed";
  }
  return "?";
}

LocationProxy::LocationProxy(net::Runtime& runtime, net::NetAddress self, Locations locations,
                             net::TimerConfig timers)
    : ProxyNode(runtime, std::move(self), "proxy", timers), locations_(std::move(locations)) {}

void LocationProxy::on_request(const sip::SipMessage& req, const net::NetAddress&) {
  if (reject_if_exhausted(req)) return;
  const auto it = locations_.find(req.request_uri.aor());
  if (it == locations_.end()) {
    if (req.method != sip::Method::Ack) respond(req, sip::StatusCode::NotFound);
    return;
  }
  forward(req, it->second);
}

RedirectServer::RedirectServer(net::Runtime& runtime, net::NetAddress self, Locations locations,
                               net::TimerConfig timers)
    : SipNode(runtime, std::move(self), "redirect", timers), locations_(std::move(locations)) {}

void RedirectServer::on_request(const sip::SipMessage& req, const net::NetAddress&) {
  if (req.method == sip::Method::Ack) return;
  const auto it = locations_.find(req.request_uri.aor());
  if (it == locations_.end()) {
    respond(req, sip::StatusCode::NotFound);
    return;
  }
  auto resp = sip::make_response(req, sip::StatusCode::MovedTemporarily);
  resp.contact = sip::NameAddr{{}, sip::SipUri{req.request_uri.user, it->second.host, it->second.port, {}}, {}};
  endpoint().send_response(resp);
}

BasicUa::BasicUa(net::Runtime& runtime, net::NetAddress self, sip::SipUri aor, std::string name,
                 net::TimerConfig timers)
    : SipNode(runtime, std::move(self), std::move(name), timers), aor_(std::move(aor)) {}

void BasicUa::set_state(CallState s, std::string_view cause) {
  if (s == state_) return;
  transition(to_string(state_), to_string(s), cause);
  state_ = s;
}

void BasicUa::invite(const sip::SipUri& target, const net::NetAddress& first_hop) {
  target_ = target;
  call_id_ = endpoint().ids().next_call_id();
  set_state(CallState::Calling, "invite " + target.aor());
  send_invite(first_hop);
}

void BasicUa::send_invite(const net::NetAddress& hop) {
  auto req = sip::make_request(sip::Method::Invite, *target_, aor_, *target_, call_id_, ++cseq_, address(),
                               endpoint().ids());
  req.contact = sip::NameAddr{{}, sip::SipUri{aor_.user, address().host, address().port, {}}, {}};
  endpoint().send_request(req, hop,
                          {[this, req, hop](const sip::SipMessage& r) { on_invite_response(r, req, hop); },
                           [this] { set_state(CallState::Failed, "timeout"); }});
}

void BasicUa::on_invite_response(const sip::SipMessage& resp, const sip::SipMessage& invite,
                                 const net::NetAddress& hop) {
  const auto cls = sip::status_class(resp.status);
  if (cls == 1) return;

  sip::SipMessage ack = invite;
  ack.method = sip::Method::Ack;
  ack.cseq.method = sip::Method::Ack;
  ack.to = resp.to;
  ack.contact.reset();
  ack.body.clear();
  ack.content_type.reset();
  if (cls == 2) {
    // The ACK for a 2xx is a new transaction.
    ack.vias.clear();
    sip::push_via(ack, address(), endpoint().ids());
    endpoint().send_request(ack, hop);
    set_state(CallState::Connected, resp.summary());
    return;
  }
  // ACK for a non-2xx reuses the INVITE's branch and goes to the same hop.
  endpoint().send_request(ack, hop);
  if (cls == 3 && resp.contact && redirects_ == 0) {
    ++redirects_;
    send_invite(resp.contact->uri.address());
    return;
  }
  set_state(CallState::Failed, resp.summary());
}

void BasicUa::on_request(const sip::SipMessage& req, const net::NetAddress&) {
  switch (req.method) {
    case sip::Method::Invite: {
      auto resp = sip::make_response(req, sip::StatusCode::Ok);
      resp.contact = sip::NameAddr{{}, sip::SipUri{aor_.user, address().host, address().port, {}}, {}};
      endpoint().send_response(resp);
      set_state(CallState::Connected, "INVITE " + req.from.uri.aor());
      break;
    }
    case sip::Method::Ack:
      break;
    default:
      respond(req, sip::StatusCode::NotFound);
      break;
  }
}

}  // namespace imstb::flow
