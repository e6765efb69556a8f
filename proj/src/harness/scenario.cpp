#include "imstb/harness/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace imstb::harness {

namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& what) { throw ScenarioError(ScenarioErrc::ConfigInvalid, what); }

const std::map<Topology, std::set<std::string>> kActions = {
    {Topology::Ims,
     {"register", "deregister", "subscribe", "unsubscribe", "submit", "provision_exam", "set_down"}},
    {Topology::SipProxy, {"invite", "set_down"}},
    {Topology::SipRedirect, {"invite", "set_down"}},
};

std::vector<std::string> user_roles(const Scenario& s) {
  std::vector<std::string> out;
  if (s.topology != Topology::Ims) return out;
  for (int n = 1; n <= s.fixtures.students; ++n) out.push_back("s" + std::to_string(n));
  if (s.fixtures.teacher) out.emplace_back("teacher");
  return out;
}

}  // namespace

ScenarioError::ScenarioError(ScenarioErrc code, const std::string& detail)
    : std::runtime_error(std::string(code == ScenarioErrc::ConfigInvalid ? "ConfigInvalid: " : "ScenarioStuck: ") +
                         detail),
      code_(code) {}

std::string_view to_string(Topology t) {
  switch (t) {
    case Topology::Ims: return "ims";
    case Topology::SipProxy: return "sip-proxy";
    case Topology::SipRedirect: return "sip-redirect";
  }
  return "?";
}

Topology topology_from_string(std::string_view s) {
  for (auto t : {Topology::Ims, Topology::SipProxy, Topology::SipRedirect})
    if (to_string(t) == s) return t;
  invalid("unknown topology " + std::string(s));
}

std::vector<std::string> topology_roles(const Scenario& s) {
  std::vector<std::string> out;
  switch (s.topology) {
    case Topology::Ims: out = {"P-CSCF", "I-CSCF", "S-CSCF", "HSS", "XDMS", "AS"}; break;
    case Topology::SipProxy: out = {"caller", "proxy", "callee"}; break;
    case Topology::SipRedirect: out = {"caller", "redirect", "callee"}; break;
  }
  const auto users = user_roles(s);
  out.insert(out.end(), users.begin(), users.end());
  return out;
}

void validate(const FlowPattern& p) {
  if (p.steps.empty()) invalid("flow pattern '" + p.name + "' has no steps");
  for (const auto& st : p.steps)
    if (st.src.empty() || st.dst.empty() || st.kind.empty())
      invalid("flow pattern '" + p.name + "' has an incomplete step");
}

void validate(const Scenario& s) {
  if (s.name.empty()) invalid("scenario has no name");
  if (s.loss < 0.0 || s.loss > 1.0) invalid("loss outside [0,1]");
  if (s.latency_ms < 0) invalid("negative latency");
  if (s.t_max_ms <= 0) invalid("t_max must be positive");
  if (s.fixtures.students < 0 || s.fixtures.students > 99) invalid("students outside [0,99]");
  if (s.topology != Topology::Ims && (s.fixtures.students > 0 || s.fixtures.teacher || !s.fixtures.groups.empty()))
    invalid("user fixtures need the ims topology");

  const auto roles = topology_roles(s);
  const std::set<std::string> known(roles.begin(), roles.end());
  const auto users = user_roles(s);
  const std::set<std::string> user_set(users.begin(), users.end());
  for (const auto& [group, members] : s.fixtures.groups)
    for (const auto& m : members)
      if (!user_set.contains(m)) invalid("group " + group + " lists unknown user " + m);
  for (const auto& [user, _] : s.fixtures.auto_answer)
    if (!user_set.contains(user)) invalid("auto_answer for unknown user " + user);
  for (const auto& [user, ch] : s.fixtures.channel) {
    if (!user_set.contains(user)) invalid("channel for unknown user " + user);
    if (ch != "sip" && ch != "http") invalid("channel must be sip or http");
  }

  std::int64_t prev = 0;
  for (const auto& step : s.timeline) {
    if (step.at < 0) invalid("negative timeline instant");
    if (step.at < prev) invalid("timeline not sorted by 'at'");
    prev = step.at;
    if (!kActions.at(s.topology).contains(step.action)) invalid("unknown action " + step.action);
    if (step.action == "set_down") {
      if (step.actor != "net") invalid("set_down must use actor 'net'");
      if (!known.contains(step.args.value("node", std::string{})))
        invalid("set_down names unknown node");
      continue;
    }
    const bool ok = s.topology == Topology::Ims ? user_set.contains(step.actor) : step.actor == "caller";
    if (!ok) invalid("unknown actor " + step.actor);
    if (step.action == "provision_exam" && step.actor != "teacher") invalid("only the teacher provisions exams");
  }

  for (const auto& p : s.expectations) {
    validate(p);
    for (const auto& st : p.steps)
      for (const auto* r : {&st.src, &st.dst})
        if (!known.contains(*r)) invalid("flow pattern '" + p.name + "' names unknown role " + *r);
  }
}

void to_json(json& j, const FlowStep& s) {
  j = json{{"src", s.src}, {"dst", s.dst}, {"kind", s.kind}};
  if (s.content_type) j["content_type"] = *s.content_type;
  if (!s.headers.empty()) j["headers"] = s.headers;
}

void from_json(const json& j, FlowStep& s) {
  s.src = j.at("src").get<std::string>();
  s.dst = j.at("dst").get<std::string>();
  s.kind = j.at("kind").get<std::string>();
  s.content_type.reset();
  if (j.contains("content_type")) s.content_type = j.at("content_type").get<std::string>();
  s.headers = j.value("headers", std::map<std::string, std::string>{});
}

void to_json(json& j, const FlowPattern& p) {
  j = json{{"name", p.name}, {"mode", p.mode == MatchMode::Exact ? "Exact" : "Subsequence"}, {"steps", p.steps}};
}

void from_json(const json& j, FlowPattern& p) {
  p.name = j.value("name", std::string{});
  const auto mode = j.value("mode", std::string{"Subsequence"});
  if (mode == "Exact") p.mode = MatchMode::Exact;
  else if (mode == "Subsequence") p.mode = MatchMode::Subsequence;
  else invalid("unknown match mode " + mode);
  p.steps = j.at("steps").get<std::vector<FlowStep>>();
}

void to_json(json& j, const Scenario& s) {
  json fx{{"teacher", s.fixtures.teacher}, {"students", s.fixtures.students}};
  if (!s.fixtures.groups.empty()) fx["groups"] = s.fixtures.groups;
  if (!s.fixtures.auto_answer.empty()) fx["auto_answer"] = s.fixtures.auto_answer;
  if (!s.fixtures.channel.empty()) fx["channel"] = s.fixtures.channel;
  json timeline = json::array();
  for (const auto& st : s.timeline)
    timeline.push_back({{"at", st.at}, {"actor", st.actor}, {"action", st.action}, {"args", st.args}});
  j = json{{"name", s.name},         {"description", s.description}, {"topology", to_string(s.topology)},
           {"seed", s.seed},         {"loss", s.loss},               {"latency_ms", s.latency_ms},
           {"t_max_ms", s.t_max_ms}, {"fixtures", fx},               {"timeline", timeline},
           {"expectations", s.expectations}};
}

Scenario parse_scenario(const json& j) {
  Scenario s;
  try {
    s.name = j.at("name").get<std::string>();
    s.description = j.value("description", std::string{});
    s.topology = topology_from_string(j.value("topology", std::string{"ims"}));
    s.seed = j.value("seed", std::uint64_t{1});
    s.loss = j.value("loss", 0.0);
    s.latency_ms = j.value("latency_ms", std::int64_t{10});
    s.t_max_ms = j.value("t_max_ms", std::int64_t{600'000});
    if (j.contains("fixtures")) {
      const auto& fx = j.at("fixtures");
      s.fixtures.teacher = fx.value("teacher", false);
      s.fixtures.students = fx.value("students", 0);
      s.fixtures.groups = fx.value("groups", decltype(s.fixtures.groups){});
      s.fixtures.auto_answer = fx.value("auto_answer", decltype(s.fixtures.auto_answer){});
      s.fixtures.channel = fx.value("channel", decltype(s.fixtures.channel){});
    }
    for (const auto& st : j.value("timeline", json::array()))
      s.timeline.push_back({st.at("at").get<std::int64_t>(), st.at("actor").get<std::string>(),
                            st.at("action").get<std::string>(), st.value("args", json::object())});
    s.expectations = j.value("expectations", json::array()).get<std::vector<FlowPattern>>();
  } catch (const json::exception& e) {
    invalid(e.what());
  }
  validate(s);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) invalid("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    invalid(path + ": " + e.what());
  }
  return parse_scenario(j);
}

}  // namespace imstb::harness
