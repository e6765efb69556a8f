#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "imstb/flow/nodes.hpp"
#include "imstb/harness/scenario.hpp"
#include "imstb/harness/testbed.hpp"
#include "imstb/harness/trace.hpp"

namespace imstb::harness {

namespace flow_addr {
inline const net::NetAddress kCaller{"127.0.2.1", 5060};
inline const net::NetAddress kCallee{"127.0.2.2", 5060};
inline const net::NetAddress kProxy{"127.0.2.10", 5060};
inline const net::NetAddress kRedirect{"127.0.2.11", 5060};
}  // namespace flow_addr

/// Caller, callee and either a proxy or a redirect server.
struct SipFlowTopology {
  SipFlowTopology(Topology kind, std::unique_ptr<net::Network> network);

  std::unique_ptr<net::Network> owned;
  net::Network& net;
  std::unique_ptr<flow::LocationProxy> proxy;
  std::unique_ptr<flow::RedirectServer> redirect;
  flow::BasicUa caller;
  flow::BasicUa callee;

  std::map<net::NetAddress, std::string> roles() const;
};

struct ExpectationResult {
  std::string name;
  FlowMatch match;
};

struct RunResult {
  Trace trace;
  std::vector<ExpectationResult> expectations;
  /// Timeline actions that failed locally, e.g. subscribing before registering.
  std::vector<std::string> action_errors;

  bool all_matched() const;
};

/// Live runs use real loopback sockets and a wall clock scaled by `speed`;
/// loss and latency settings do not apply.
struct RunMode {
  bool live = false;
  double speed = 1.0;
};

/// Boots the scenario's topology, executes its timeline and checks its
/// expectations. The topology stays inspectable after execute().
class ScenarioRunner {
 public:
  explicit ScenarioRunner(Scenario scenario, std::optional<std::uint64_t> seed = std::nullopt, RunMode mode = {});

  /// Runs to quiescence or t_max; a run that hits t_max has trace.quiescent false.
  RunResult execute();

  const Scenario& scenario() const { return scenario_; }
  std::uint64_t seed() const { return seed_; }
  net::Network& net();
  /// Null unless the topology is "ims".
  ImsTestbed* ims() { return ims_.get(); }
  /// Null unless the topology is a standalone SIP flow.
  SipFlowTopology* sip_flow() { return flow_.get(); }
  std::map<net::NetAddress, std::string> roles() const;

 private:
  void act(const TimelineStep& step, std::vector<std::string>& errors);
  void ims_act(const TimelineStep& step);
  void provision_exam(const nlohmann::json& exam);
  Trace collect();

  Scenario scenario_;
  std::uint64_t seed_;
  RunMode mode_;
  std::unique_ptr<ImsTestbed> ims_;
  std::unique_ptr<SipFlowTopology> flow_;
  bool executed_ = false;
};

/// SHA-256 of the scenario's JSON with the effective seed.
std::string config_hash(const Scenario& s, std::uint64_t seed);

/// Executes and returns the trace; throws ScenarioStuck when t_max is reached
/// before quiescence.
Trace run(const Scenario& scenario, std::optional<std::uint64_t> seed = std::nullopt);

/// fig2_3_proxy_invite, fig5_6_redirect_invite, fig10_register_subscribe,
/// fig11_cscf_chain, fig8_exam_e2e and lossy_register, in that order.
std::vector<Scenario> builtin_scenarios();
const Scenario& builtin(const std::string& name);

}  // namespace imstb::harness
