#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "imstb/harness/runner.hpp"

using namespace imstb;
using namespace imstb::harness;
using nlohmann::json;

namespace {

json registration_only() {
  return json::parse(R"({
    "name": "reg",
    "topology": "ims",
    "fixtures": {"students": 1},
    "timeline": [{"at": 0, "actor": "s1", "action": "register"}]
  })");
}

ScenarioErrc error_of(const json& j) {
  try {
    parse_scenario(j);
  } catch (const ScenarioError& e) {
    return e.code();
  }
  ADD_FAILURE() << "scenario accepted: " << j.dump();
  return ScenarioErrc::ScenarioStuck;
}

std::vector<std::string> labels(const Trace& t) {
  std::vector<std::string> out;
  for (const auto& e : t.wire_events) out.push_back(e.label);
  return out;
}

FlowPattern pattern(MatchMode mode, std::vector<FlowStep> steps) { return {"p", mode, std::move(steps)}; }

const std::vector<FlowStep> kProxySteps = {
    {"caller", "proxy", "INVITE", {}, {}}, {"proxy", "callee", "INVITE", {}, {}},
    {"callee", "proxy", "200", {}, {}},    {"proxy", "caller", "200", {}, {}},
    {"caller", "proxy", "ACK", {}, {}},    {"proxy", "callee", "ACK", {}, {}},
};

}  // namespace

TEST(ScenarioTest, UnsortedTimelineIsInvalid) {
  auto j = registration_only();
  j["timeline"] = json::parse(R"([{"at": 5, "actor": "s1", "action": "register"},
                                  {"at": 1, "actor": "s1", "action": "deregister"}])");
  EXPECT_EQ(error_of(j), ScenarioErrc::ConfigInvalid);
}

TEST(ScenarioTest, UnknownActorIsInvalid) {
  auto j = registration_only();
  j["timeline"][0]["actor"] = "s2";
  EXPECT_EQ(error_of(j), ScenarioErrc::ConfigInvalid);
}

TEST(ScenarioTest, UnknownActionIsInvalid) {
  auto j = registration_only();
  j["timeline"][0]["action"] = "dance";
  EXPECT_EQ(error_of(j), ScenarioErrc::ConfigInvalid);
}

TEST(ScenarioTest, EmptyPatternIsRejected) {
  auto j = registration_only();
  j["expectations"] = json::parse(R"([{"name": "empty", "steps": []}])");
  EXPECT_EQ(error_of(j), ScenarioErrc::ConfigInvalid);
  EXPECT_THROW(validate(FlowPattern{"empty", MatchMode::Exact, {}}), ScenarioError);
}

TEST(ScenarioTest, PatternRolesMustResolve) {
  auto j = registration_only();
  j["expectations"] = json::parse(R"([{"name": "x", "steps": [{"src": "s1", "dst": "proxy", "kind": "REGISTER"}]}])");
  EXPECT_EQ(error_of(j), ScenarioErrc::ConfigInvalid);
}

TEST(ScenarioTest, GroupMembersMustExist) {
  auto j = registration_only();
  j["fixtures"]["groups"] = json::parse(R"({"sip:cs101@ims.kau.test": ["s1", "s7"]})");
  EXPECT_EQ(error_of(j), ScenarioErrc::ConfigInvalid);
}

TEST(ScenarioTest, MalformedJsonFieldIsInvalid) {
  auto j = registration_only();
  j["timeline"][0]["at"] = "soon";
  EXPECT_EQ(error_of(j), ScenarioErrc::ConfigInvalid);
}

TEST(ScenarioTest, JsonRoundTrip) {
  for (const auto& s : builtin_scenarios()) {
    const json once = s;
    const json twice = parse_scenario(once);
    EXPECT_EQ(once.dump(), twice.dump()) << s.name;
  }
}

TEST(ScenarioTest, ShippedFilesMatchTheBuiltins) {
  for (const auto& s : builtin_scenarios()) {
    const auto path = std::filesystem::path(IMSTB_SCENARIO_DIR) / (s.name + ".json");
    ASSERT_TRUE(std::filesystem::exists(path)) << path;
    EXPECT_EQ(json(load_scenario(path.string())).dump(), json(s).dump()) << s.name;
  }
}

TEST(BuiltinTest, ShipsTheFigureScenarios) {
  std::vector<std::string> names;
  for (const auto& s : builtin_scenarios()) names.push_back(s.name);
  EXPECT_EQ(names, (std::vector<std::string>{"fig2_3_proxy_invite", "fig5_6_redirect_invite",
                                             "fig10_register_subscribe", "fig11_cscf_chain", "fig8_exam_e2e",
                                             "lossy_register"}));
}

TEST(BuiltinTest, ExamFixturesDeclareTeacherStudentsAndGroup) {
  const auto& s = builtin("fig8_exam_e2e");
  EXPECT_TRUE(s.fixtures.teacher);
  EXPECT_EQ(s.fixtures.students, 10);
  ASSERT_EQ(s.fixtures.groups.size(), 1u);
  EXPECT_EQ(s.fixtures.groups.begin()->first, "sip:cs101@ims.kau.test");
  EXPECT_EQ(s.fixtures.groups.begin()->second.size(), 10u);
}

TEST(RunTest, EmptyTimelineIsImmediatelyQuiescent) {
  auto j = registration_only();
  j["timeline"] = json::array();
  const auto t = run(parse_scenario(j));
  EXPECT_TRUE(t.wire_events.empty());
  EXPECT_TRUE(t.quiescent);
  EXPECT_EQ(t.end_time, 0);
}

TEST(RunTest, RegistrationTraceShowsCxMarkers) {
  const auto t = run(parse_scenario(registration_only()));
  EXPECT_EQ(labels(t), (std::vector<std::string>{"REGISTER", "REGISTER", "UAR", "UAA", "REGISTER", "SAR", "SAA",
                                                 "200 REGISTER", "200 REGISTER", "200 REGISTER"}));
  ASSERT_FALSE(t.node_transitions.empty());
  EXPECT_EQ(t.node_transitions.back().to, "Registered");
}

TEST(RunTest, ActionErrorsAreReported) {
  auto j = registration_only();
  j["timeline"] = json::parse(R"([{"at": 0, "actor": "s1", "action": "subscribe"}])");
  ScenarioRunner runner(parse_scenario(j));
  const auto r = runner.execute();
  ASSERT_EQ(r.action_errors.size(), 1u);
  EXPECT_NE(r.action_errors[0].find("subscribe"), std::string::npos);
  EXPECT_TRUE(r.trace.wire_events.empty());
}

TEST(RunTest, StuckScenarioThrows) {
  auto s = builtin("fig8_exam_e2e");
  s.t_max_ms = 3000;
  try {
    run(s);
    FAIL() << "expected ScenarioStuck";
  } catch (const ScenarioError& e) {
    EXPECT_EQ(e.code(), ScenarioErrc::ScenarioStuck);
  }
}

TEST(RunTest, TimelineBeyondTmaxIsInvalid) {
  auto s = builtin("fig10_register_subscribe");
  s.t_max_ms = 500;
  EXPECT_THROW(ScenarioRunner{s}, ScenarioError);
}

TEST(RunTest, SetDownDropsEverythingToTheNode) {
  auto j = registration_only();
  j["timeline"] = json::parse(R"([{"at": 0, "actor": "net", "action": "set_down", "args": {"node": "P-CSCF"}},
                                  {"at": 0, "actor": "s1", "action": "register"}])");
  ScenarioRunner runner(parse_scenario(j));
  const auto r = runner.execute();
  ASSERT_EQ(r.trace.wire_events.size(), 6u);
  for (const auto& e : r.trace.wire_events) EXPECT_TRUE(e.dropped);
  EXPECT_EQ(runner.ims()->ua("s1").registration(), ua::RegState::Failed);
}

TEST(FlowTest, ProxyTraceMatchesTheLadderExactly) {
  const auto t = run(builtin("fig2_3_proxy_invite"));
  const auto m = assert_flow(t, pattern(MatchMode::Exact, kProxySteps));
  EXPECT_TRUE(m.matched) << m.detail;
}

TEST(FlowTest, RedirectServerNeverForwards) {
  const auto t = run(builtin("fig5_6_redirect_invite"));
  const auto m = assert_flow(
      t, pattern(MatchMode::Subsequence,
                 {{"caller", "redirect", "INVITE", {}, {}}, {"redirect", "callee", "INVITE", {}, {}}}));
  EXPECT_FALSE(m.matched);
  EXPECT_EQ(m.divergent_step, 1u);
  EXPECT_NE(m.detail.find("redirect->callee"), std::string::npos);
}

TEST(FlowTest, ExactModeReportsFirstDivergentStep) {
  const auto t = run(builtin("fig2_3_proxy_invite"));
  auto steps = kProxySteps;
  steps[2].kind = "180";
  const auto m = assert_flow(t, pattern(MatchMode::Exact, steps));
  EXPECT_FALSE(m.matched);
  EXPECT_EQ(m.divergent_step, 2u);
  EXPECT_NE(m.detail.find("200 INVITE"), std::string::npos);
}

TEST(FlowTest, ExactModeRejectsSurplusEvents) {
  const auto t = run(builtin("fig2_3_proxy_invite"));
  auto steps = kProxySteps;
  steps.pop_back();
  const auto m = assert_flow(t, pattern(MatchMode::Exact, steps));
  EXPECT_FALSE(m.matched);
  EXPECT_EQ(m.divergent_step, 5u);
  EXPECT_NE(m.detail.find("extra"), std::string::npos);
}

TEST(FlowTest, KindsCoverClassesCodesLabelsAndCx) {
  const auto t = run(parse_scenario(registration_only()));
  for (const char* kind : {"2xx", "200", "200 REGISTER"})
    EXPECT_TRUE(assert_flow(t, pattern(MatchMode::Subsequence, {{"P-CSCF", "s1", kind, {}, {}}})).matched) << kind;
  EXPECT_FALSE(assert_flow(t, pattern(MatchMode::Subsequence, {{"P-CSCF", "s1", "4xx", {}, {}}})).matched);
  EXPECT_FALSE(assert_flow(t, pattern(MatchMode::Subsequence, {{"P-CSCF", "s1", "REGISTER", {}, {}}})).matched);
  EXPECT_TRUE(assert_flow(t, pattern(MatchMode::Subsequence, {{"I-CSCF", "HSS", "UAR", {}, {}}})).matched);
}

TEST(FlowTest, HeaderPredicatesUsePrefixes) {
  const auto t = run(builtin("fig10_register_subscribe"));
  FlowStep notify{"P-CSCF", "s1", "NOTIFY", {}, {{"Subscription-State", "active"}}};
  EXPECT_TRUE(assert_flow(t, pattern(MatchMode::Subsequence, {notify})).matched);
  notify.headers = {{"Subscription-State", "terminated"}};
  EXPECT_FALSE(assert_flow(t, pattern(MatchMode::Subsequence, {notify})).matched);
  notify.headers = {{"Event", "exam-service"}};
  EXPECT_TRUE(assert_flow(t, pattern(MatchMode::Subsequence, {notify})).matched);
}

TEST(LadderTest, RegistrationColumnsFollowFirstAppearance) {
  const auto text = render_ladder(run(parse_scenario(registration_only())));
  const auto header = text.substr(0, text.find('\n'));
  std::size_t pos = 0;
  for (const char* col : {"s1", "P-CSCF", "I-CSCF", "HSS", "S-CSCF"}) {
    const auto at = header.find(col, pos);
    ASSERT_NE(at, std::string::npos) << col;
    pos = at;
  }
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 11);
}

TEST(LadderTest, EmptyTraceGivesHeaderOnly) {
  EXPECT_EQ(render_ladder(Trace{}), "time(ms)\n");
  // Columns are 18 wide with names centred on the lifeline at 9 + 18k.
  EXPECT_EQ(render_ladder(Trace{}, {"caller", "proxy"}),
            "time(ms) " + std::string(6, ' ') + "caller" + std::string(13, ' ') + "proxy\n");
}

TEST(LadderTest, DroppedEventsAreMarked) {
  const auto text = render_ladder(run(builtin("lossy_register")));
  EXPECT_NE(text.find("✗"), std::string::npos);
  const auto clean = render_ladder(run(builtin("fig11_cscf_chain")));
  EXPECT_EQ(clean.find("✗"), std::string::npos);
}

TEST(LadderTest, FilterSkipsOtherRoles) {
  const auto t = run(parse_scenario(registration_only()));
  const auto text = render_ladder(t, {"s1", "P-CSCF"});
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  EXPECT_EQ(text, render_ladder(t, {"s1", "P-CSCF"}));
}

TEST(TraceTest, CanonicalJsonHasSortedKeysAndIntegerTimes) {
  const auto t = run(builtin("fig2_3_proxy_invite"));
  const auto text = canonical_json(t);
  const auto j = json::parse(text);
  EXPECT_TRUE(j.at("wire_events").at(0).at("time").is_number_integer());
  std::vector<std::string> keys;
  for (const auto& [k, _] : j.items()) keys.push_back(k);
  EXPECT_TRUE(std::is_sorted(keys.begin(), keys.end()));
  EXPECT_LT(text.find("\"config_hash\""), text.find("\"wire_events\""));
  EXPECT_EQ(canonical_json(trace_from_json(j)), text);
}

TEST(TraceTest, ConfigHashDependsOnSeed) {
  const auto& s = builtin("lossy_register");
  EXPECT_EQ(config_hash(s, 1), config_hash(s, 1));
  EXPECT_NE(config_hash(s, 1), config_hash(s, 2));
}

TEST(HarnessPropertyTest, EveryBuiltinIsDeterministicQuiescentAndConformant) {
  for (const auto& s : builtin_scenarios()) {
    SCOPED_TRACE(s.name);
    ScenarioRunner a(s);
    ScenarioRunner b(s);
    const auto ra = a.execute();
    const auto rb = b.execute();
    EXPECT_EQ(canonical_json(ra.trace), canonical_json(rb.trace));
    EXPECT_TRUE(ra.trace.quiescent);
    EXPECT_EQ(a.net().in_flight(), 0u);
    EXPECT_EQ(a.net().pending_timers(), 0u);
    EXPECT_TRUE(ra.action_errors.empty());
    for (const auto& e : ra.expectations) EXPECT_TRUE(e.match.matched) << e.name << ": " << e.match.detail;
  }
}

TEST(HarnessPropertyTest, LossyRunsReplayPerSeed) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto once = canonical_json(run(builtin("lossy_register"), seed));
    EXPECT_EQ(once, canonical_json(run(builtin("lossy_register"), seed))) << seed;
  }
  EXPECT_NE(canonical_json(run(builtin("lossy_register"), 1)), canonical_json(run(builtin("lossy_register"), 2)));
}
