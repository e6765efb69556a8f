#pragma once

#include <functional>
#include <optional>

#include "imstb/net/endpoint.hpp"

namespace imstb::ims {

/// Stateful forwarding shared by the CSCFs: each forwarded request gets its
/// own client transaction, and responses retrace the Via stack.
class ProxyNode : public net::SipNode {
 public:
  using SipNode::SipNode;

 protected:
  using ResponseHook = std::function<void(const sip::SipMessage& resp)>;

  /// Pushes our Via, decrements Max-Forwards and sends to `dst`. Responses are
  /// relayed upstream after `hook` sees them; a timeout answers 408 and an
  /// unknown next hop answers 500.
  void forward(const sip::SipMessage& req, const net::NetAddress& dst, ResponseHook hook = {});

  /// Answers 480 when Max-Forwards is exhausted. Returns true if answered.
  bool reject_if_exhausted(const sip::SipMessage& req);

  /// Pops our Via and sends the response to the next one.
  void relay_response(sip::SipMessage resp);

  /// Responses without a transaction here (e.g. to a forwarded NOTIFY) are
  /// relayed statelessly.
  void on_stray_response(const sip::SipMessage& resp, const net::NetAddress& from) override;

  /// "<sip:name@host:port;lr>" for Path and Service-Route.
  std::string route_header(std::string_view user) const;
};

/// Parses a Path / Service-Route value back to the hop it names.
std::optional<net::NetAddress> route_target(std::string_view header_value);

}  // namespace imstb::ims
