#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "imstb/harness/scenario.hpp"
#include "imstb/net/runtime.hpp"

namespace imstb::harness {

/// A wire event with addresses resolved to role names.
struct TraceEvent {
  std::uint64_t seq = 0;
  std::int64_t time = 0;
  std::string src;
  std::string dst;
  std::string label;
  bool dropped = false;
  /// Canonical wire text (SIP) or Cx-lite line.
  std::string payload;
  std::optional<sip::SipMessage> sip;
};

struct Transition {
  std::int64_t time = 0;
  std::string node;
  std::string from;
  std::string to;
  std::string cause;
};

struct Trace {
  std::string scenario;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::int64_t end_time = 0;
  bool quiescent = true;
  std::vector<TraceEvent> wire_events;
  std::vector<Transition> node_transitions;
};

/// Unknown addresses keep their "host:port" text.
TraceEvent make_trace_event(const net::WireEvent& ev, const std::map<net::NetAddress, std::string>& roles);
/// Wire events, transitions, clock and quiescence of a network; the caller
/// fills in scenario, seed and config_hash.
Trace capture_trace(const net::Network& net, const std::map<net::NetAddress, std::string>& roles);

nlohmann::json to_json(const Trace& t);
Trace trace_from_json(const nlohmann::json& j);
/// Sorted keys, integer times, trailing newline.
std::string canonical_json(const Trace& t);

struct FlowMatch {
  bool matched = false;
  /// Index of the first step that did not match (steps.size() for surplus events).
  std::size_t divergent_step = 0;
  std::string detail;
  explicit operator bool() const { return matched; }
};

bool step_matches(const FlowStep& step, const TraceEvent& ev);

/// Exact: the delivered events whose source and destination are both pattern
/// roles equal the steps. Subsequence: the steps embed in order.
FlowMatch assert_flow(const Trace& trace, const FlowPattern& pattern);

/// One line per event between the given roles. An empty filter takes every
/// role in order of first appearance.
std::string render_ladder(const Trace& trace, const std::vector<std::string>& roles = {});

}  // namespace imstb::harness
