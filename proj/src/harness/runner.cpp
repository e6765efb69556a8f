#include "imstb/harness/runner.hpp"

#include <algorithm>

#include "imstb/net/live_runtime.hpp"
#include "imstb/util/sha256.hpp"

namespace imstb::harness {

namespace {

using nlohmann::json;

const sip::SipUri kAlice = sip::SipUri::parse("sip:alice@flow.test");
const sip::SipUri kBob = sip::SipUri::parse("sip:bob@flow.test");

net::LossConfig loss_of(const Scenario& s, std::uint64_t seed) { return {s.loss, seed}; }

}  // namespace

SipFlowTopology::SipFlowTopology(Topology kind, std::unique_ptr<net::Network> network)
    : owned(std::move(network)),
      net(*owned),
      caller(net, flow_addr::kCaller, kAlice, "caller"),
      callee(net, flow_addr::kCallee, kBob, "callee") {
  const flow::Locations locations{{kAlice.aor(), flow_addr::kCaller}, {kBob.aor(), flow_addr::kCallee}};
  net.attach(flow_addr::kCaller, caller);
  net.attach(flow_addr::kCallee, callee);
  if (kind == Topology::SipRedirect) {
    redirect = std::make_unique<flow::RedirectServer>(net, flow_addr::kRedirect, locations);
    net.attach(flow_addr::kRedirect, *redirect);
  } else {
    proxy = std::make_unique<flow::LocationProxy>(net, flow_addr::kProxy, locations);
    net.attach(flow_addr::kProxy, *proxy);
  }
}

std::map<net::NetAddress, std::string> SipFlowTopology::roles() const {
  std::map<net::NetAddress, std::string> out{{flow_addr::kCaller, "caller"}, {flow_addr::kCallee, "callee"}};
  if (proxy) out[flow_addr::kProxy] = "proxy";
  if (redirect) out[flow_addr::kRedirect] = "redirect";
  return out;
}

bool RunResult::all_matched() const {
  return trace.quiescent &&
         std::all_of(expectations.begin(), expectations.end(), [](const auto& e) { return e.match.matched; });
}

std::string config_hash(const Scenario& s, std::uint64_t seed) {
  json j = s;
  j["seed"] = seed;
  return util::sha256_hex(j.dump());
}

ScenarioRunner::ScenarioRunner(Scenario scenario, std::optional<std::uint64_t> seed, RunMode mode)
    : scenario_(std::move(scenario)), seed_(seed.value_or(scenario_.seed)), mode_(mode) {
  validate(scenario_);
  for (const auto& st : scenario_.timeline)
    if (st.at > scenario_.t_max_ms)
      throw ScenarioError(ScenarioErrc::ConfigInvalid, "timeline step beyond t_max");

  const net::Duration latency{scenario_.latency_ms};
  auto network = [&]() -> std::unique_ptr<net::Network> {
    if (mode_.live) return std::make_unique<net::LiveRuntime>(mode_.speed);
    return std::make_unique<net::SimNetwork>(loss_of(scenario_, seed_), latency);
  };
  if (scenario_.topology != Topology::Ims) {
    flow_ = std::make_unique<SipFlowTopology>(scenario_.topology, network());
    return;
  }
  ImsConfig cfg;
  cfg.loss = loss_of(scenario_, seed_);
  cfg.latency = latency;
  ims_ = std::make_unique<ImsTestbed>(cfg, network());
  const auto& fx = scenario_.fixtures;
  auto answers_for = [&](const std::string& user) -> std::optional<ua::Answers> {
    const auto it = fx.auto_answer.find(user);
    if (it == fx.auto_answer.end()) return std::nullopt;
    return it->second;
  };
  auto channel_for = [&](const std::string& user) {
    const auto it = fx.channel.find(user);
    return it != fx.channel.end() && it->second == "http" ? ua::Channel::Http : ua::Channel::Sip;
  };
  for (int n = 1; n <= fx.students; ++n) {
    const auto user = "s" + std::to_string(n);
    ims_->add_student(n, answers_for(user), channel_for(user));
  }
  if (fx.teacher) ims_->add_teacher();
  for (const auto& [group, members] : fx.groups) ims_->put_group(group, members);
}

net::Network& ScenarioRunner::net() { return ims_ ? ims_->network() : flow_->net; }

std::map<net::NetAddress, std::string> ScenarioRunner::roles() const {
  return ims_ ? ims_->roles() : flow_->roles();
}

RunResult ScenarioRunner::execute() {
  if (executed_) throw std::logic_error("scenario already executed");
  executed_ = true;
  RunResult result;
  for (const auto& step : scenario_.timeline)
    net().schedule_at(net::Instant{step.at}, [this, step, &result] { act(step, result.action_errors); });
  net().run_until_quiescent(net::Instant{scenario_.t_max_ms});
  result.trace = collect();
  for (const auto& p : scenario_.expectations) result.expectations.push_back({p.name, assert_flow(result.trace, p)});
  return result;
}

void ScenarioRunner::act(const TimelineStep& step, std::vector<std::string>& errors) {
  try {
    if (step.action == "set_down") {
      const auto node = step.args.at("node").get<std::string>();
      for (const auto& [addr, role] : roles())
        if (role == node) net().set_down(addr, step.args.value("down", true));
      return;
    }
    if (ims_) {
      ims_act(step);
      return;
    }
    // Standalone flows: the only actor is the caller.
    const auto first_hop = flow_->proxy ? flow_addr::kProxy : flow_addr::kRedirect;
    flow_->caller.invite(kBob, first_hop);
  } catch (const std::exception& e) {
    errors.push_back("t=" + std::to_string(step.at) + " " + step.actor + " " + step.action + ": " + e.what());
  }
}

void ScenarioRunner::ims_act(const TimelineStep& step) {
  auto& ua = ims_->ua(step.actor);
  const auto& a = step.action;
  if (a == "register") ua.register_ua();
  else if (a == "deregister") ua.deregister();
  else if (a == "subscribe") ua.subscribe_exam_service();
  else if (a == "unsubscribe") ua.unsubscribe();
  else if (a == "submit")
    ua.submit_answers(step.args.at("exam_id").get<std::string>(), step.args.at("answers").get<ua::Answers>(),
                      step.args.value("channel", std::string{"sip"}) == "http" ? ua::Channel::Http
                                                                                : ua::Channel::Sip);
  else if (a == "provision_exam") provision_exam(step.args.at("exam"));
  else throw ScenarioError(ScenarioErrc::ConfigInvalid, "unknown action " + a);
}

void ScenarioRunner::provision_exam(const json& exam) {
  auto& as = ims_->as();
  util::HttpRequest login{"POST", "/api/login", {}, {}, json{{"user", "teacher@" + std::string(kDomain)},
                                                            {"passkey", "pass-teacher"}}
                                                          .dump()};
  const auto lr = as.http(login);
  if (lr.status != 200) throw std::runtime_error("teacher login failed: " + std::to_string(lr.status));
  const auto token = json::parse(lr.body).at("token").get<std::string>();
  util::HttpRequest create{"POST", "/api/exams", {}, {{"authorization", "Bearer " + token}}, exam.dump()};
  const auto cr = as.http(create);
  if (cr.status != 201) throw std::runtime_error("exam provisioning failed: " + std::to_string(cr.status) + " " + cr.body);
}

Trace ScenarioRunner::collect() {
  auto t = capture_trace(net(), roles());
  t.scenario = scenario_.name;
  t.seed = seed_;
  t.config_hash = config_hash(scenario_, seed_);
  return t;
}

Trace run(const Scenario& scenario, std::optional<std::uint64_t> seed) {
  ScenarioRunner runner(scenario, seed);
  auto result = runner.execute();
  if (!result.trace.quiescent)
    throw ScenarioError(ScenarioErrc::ScenarioStuck,
                        scenario.name + " not quiescent at t_max=" + std::to_string(scenario.t_max_ms));
  return std::move(result.trace);
}

}  // namespace imstb::harness
