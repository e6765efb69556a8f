#include "imstb/ims/proxy.hpp"

namespace imstb::ims {

void ProxyNode::forward(const sip::SipMessage& req, const net::NetAddress& dst, ResponseHook hook) {
  auto out = req;
  sip::push_via(out, address(), endpoint().ids());
  out.max_forwards = out.max_forwards.value_or(70) - 1;
  const bool stateless = req.method == sip::Method::Ack || req.method == sip::Method::Notify;
  try {
    endpoint().send_request(
        std::move(out), dst,
        {[this, hook](const sip::SipMessage& resp) {
           if (hook) hook(resp);
           relay_response(resp);
         },
         [this, req] { respond(req, sip::StatusCode::RequestTimeout); }});
  } catch (const net::UnknownDestination&) {
    if (!stateless) respond(req, sip::StatusCode::ServerInternalError);
  }
}

bool ProxyNode::reject_if_exhausted(const sip::SipMessage& req) {
  if (req.max_forwards.value_or(70) > 0) return false;
  if (req.method != sip::Method::Ack) respond(req, sip::StatusCode::TemporarilyUnavailable);
  return true;
}

void ProxyNode::relay_response(sip::SipMessage resp) {
  if (resp.vias.empty() || resp.vias.front().sent_by() != address()) return;
  resp.vias.erase(resp.vias.begin());
  if (resp.vias.empty()) return;
  endpoint().send_response(resp);
}

void ProxyNode::on_stray_response(const sip::SipMessage& resp, const net::NetAddress&) {
  relay_response(resp);
}

std::string ProxyNode::route_header(std::string_view user) const {
  return "<sip:" + std::string(user) + "@" + address().to_string() + ";lr>";
}

std::optional<net::NetAddress> route_target(std::string_view header_value) {
  try {
    return sip::NameAddr::parse(header_value).uri.address();
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace imstb::ims
