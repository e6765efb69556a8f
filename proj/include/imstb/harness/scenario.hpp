#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace imstb::harness {

enum class ScenarioErrc { ConfigInvalid, ScenarioStuck };

class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(ScenarioErrc code, const std::string& detail);
  ScenarioErrc code() const { return code_; }

 private:
  ScenarioErrc code_;
};

/// "ims" is the full IMS chain; "sip-proxy" and "sip-redirect" are the
/// standalone caller/callee topologies with a stateful proxy or a redirect server.
enum class Topology { Ims, SipProxy, SipRedirect };

std::string_view to_string(Topology t);
Topology topology_from_string(std::string_view s);

struct TimelineStep {
  std::int64_t at = 0;
  std::string actor;
  std::string action;
  nlohmann::json args = nlohmann::json::object();
};

enum class MatchMode { Exact, Subsequence };

/// One expected wire event. `kind` is a method ("INVITE"), a status class
/// ("2xx"), an exact code ("302"), a full label ("200 REGISTER") or a Cx-lite
/// operation ("UAR").
struct FlowStep {
  std::string src;
  std::string dst;
  std::string kind;
  std::optional<std::string> content_type;
  /// Header name -> required value prefix.
  std::map<std::string, std::string> headers;
};

struct FlowPattern {
  std::string name;
  MatchMode mode = MatchMode::Subsequence;
  std::vector<FlowStep> steps;
};

/// Users and documents provisioned before the timeline starts (IMS topology).
struct Fixtures {
  bool teacher = false;
  int students = 0;
  std::map<std::string, std::vector<std::string>> groups;  // group URI -> member users
  std::map<std::string, std::map<std::string, int>> auto_answer;
  std::map<std::string, std::string> channel;  // user -> "sip" | "http"
};

struct Scenario {
  std::string name;
  std::string description;
  Topology topology = Topology::Ims;
  std::uint64_t seed = 1;
  double loss = 0.0;
  std::int64_t latency_ms = 10;
  std::int64_t t_max_ms = 600'000;
  Fixtures fixtures;
  std::vector<TimelineStep> timeline;
  std::vector<FlowPattern> expectations;
};

/// Role names available in a topology before any user fixtures.
std::vector<std::string> topology_roles(const Scenario& s);

/// Throws ScenarioError(ConfigInvalid) on an unsorted timeline, unknown
/// actors or roles, empty patterns or out-of-range parameters.
void validate(const Scenario& s);
void validate(const FlowPattern& p);

void to_json(nlohmann::json& j, const FlowStep& s);
void from_json(const nlohmann::json& j, FlowStep& s);
void to_json(nlohmann::json& j, const FlowPattern& p);
void from_json(const nlohmann::json& j, FlowPattern& p);
void to_json(nlohmann::json& j, const Scenario& s);
/// Parses and validates.
Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);

}  // namespace imstb::harness
