#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "imstb/hss/cx.hpp"
#include "imstb/net/address.hpp"
#include "imstb/sip/message.hpp"

namespace imstb::net {

/// Milliseconds since the start of a run (virtual time in simulation,
/// scaled wall time in live mode).
using Instant = std::chrono::milliseconds;
using Duration = std::chrono::milliseconds;

/// Everything that travels between nodes: SIP, or Cx-lite between CSCFs and the HSS.
using Payload = std::variant<sip::SipMessage, hss::CxMessage>;

enum class Disposition { Delivered, Dropped };

struct WireEvent {
  std::uint64_t seq = 0;
  Instant time{0};
  NetAddress src;
  NetAddress dst;
  Payload payload;
  Disposition disposition = Disposition::Delivered;

  const sip::SipMessage* sip() const { return std::get_if<sip::SipMessage>(&payload); }
  const hss::CxMessage* cx() const { return std::get_if<hss::CxMessage>(&payload); }
  /// "REGISTER", "200 REGISTER", "UAR", ...
  std::string label() const;
};

struct StateTransition {
  Instant time{0};
  std::string node;
  std::string from;
  std::string to;
  std::string cause;
};

class UnknownDestination : public std::runtime_error {
 public:
  explicit UnknownDestination(const NetAddress& dst)
      : std::runtime_error("unknown destination " + dst.to_string()), destination(dst) {}
  NetAddress destination;
};

/// Receives payloads addressed to one logical node.
class Node {
 public:
  virtual ~Node() = default;
  virtual void receive(const Payload& payload, const NetAddress& from) = 0;
};

/// Clock, timers and transport as seen by a node. Callbacks run to completion
/// on the runtime's single event loop.
class Runtime {
 public:
  using TimerId = std::uint64_t;

  virtual ~Runtime() = default;

  virtual Instant now() const = 0;
  virtual TimerId schedule_at(Instant at, std::function<void()> fn) = 0;
  TimerId schedule_after(Duration d, std::function<void()> fn) { return schedule_at(now() + d, std::move(fn)); }
  virtual void cancel(TimerId id) = 0;

  /// Throws UnknownDestination when `dst` is not part of the topology.
  virtual void send(const NetAddress& src, const NetAddress& dst, Payload payload) = 0;

  virtual void note_transition(std::string_view node, std::string_view from, std::string_view to,
                               std::string_view cause) = 0;
};

/// A runtime that also hosts nodes at addresses: the simulated network or
/// live sockets.
class Network : public Runtime {
 public:
  virtual void attach(const NetAddress& addr, Node& node) = 0;
  virtual void detach(const NetAddress& addr) = 0;
  /// Every message to a down node is dropped.
  virtual void set_down(const NetAddress& addr, bool down) = 0;

  /// Runs until nothing is pending or the clock passes `t_max`. Returns true on quiescence.
  virtual bool run_until_quiescent(Instant t_max) = 0;
  virtual bool quiescent() const = 0;
  virtual std::size_t in_flight() const = 0;
  virtual std::size_t pending_timers() const = 0;

  /// Everything sent, in order, and every node state change.
  virtual const std::vector<WireEvent>& wire_events() const = 0;
  virtual const std::vector<StateTransition>& transitions() const = 0;
};

}  // namespace imstb::net
