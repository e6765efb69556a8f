#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "imstb/harness/runner.hpp"

namespace fs = std::filesystem;
using namespace imstb::harness;

namespace {

Scenario resolve(const std::string& ref) {
  if (fs::exists(ref)) return load_scenario(ref);
  return builtin(ref);
}

int run_command(const std::string& ref, std::optional<std::uint64_t> seed, RunMode mode, bool ladder,
                const std::string& trace_out) {
  ScenarioRunner runner(resolve(ref), seed, mode);
  const auto result = runner.execute();
  if (ladder) std::cout << render_ladder(result.trace);
  if (!trace_out.empty()) {
    std::ofstream out(trace_out, std::ios::binary);
    out << canonical_json(result.trace);
  }
  for (const auto& err : result.action_errors) std::cout << "action error: " << err << "\n";
  if (!result.trace.quiescent) std::cout << "STUCK: not quiescent at t=" << result.trace.end_time << " ms\n";
  for (const auto& e : result.expectations)
    std::cout << (e.match.matched ? "MATCH    " : "MISMATCH ") << e.name
              << (e.match.matched ? "" : ": " + e.match.detail) << "\n";
  std::cout << result.trace.wire_events.size() << " wire events, seed " << result.trace.seed << ", end "
            << result.trace.end_time << " ms\n";
  return result.all_matched() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scenario runner and flow checker for the IMS testbed"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a scenario file or builtin name");
  std::string ref;
  std::optional<std::uint64_t> seed;
  bool ladder = false;
  bool live = false;
  std::string trace_out;
  run->add_option("scenario", ref, "scenario.json or builtin name")->required();
  run->add_option("--seed", seed, "override the scenario seed");
  run->add_flag("--ladder", ladder, "print the ladder diagram");
  double speed = 1.0;
  run->add_flag("--live", live, "run over loopback sockets with a wall clock");
  run->add_option("--speed", speed, "live clock multiplier (virtual ms per wall ms)")->check(CLI::PositiveNumber);
  run->add_option("--trace", trace_out, "write the canonical trace JSON");

  auto* list = app.add_subcommand("list", "List builtin scenarios");
  auto* exp = app.add_subcommand("export", "Write every builtin scenario as JSON into a directory");
  std::string dir = "scenarios";
  exp->add_option("dir", dir);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list) {
      for (const auto& s : builtin_scenarios()) std::cout << s.name << "  " << s.description << "\n";
      return 0;
    }
    if (*exp) {
      fs::create_directories(dir);
      for (const auto& s : builtin_scenarios()) {
        std::ofstream out(fs::path(dir) / (s.name + ".json"), std::ios::binary);
        out << nlohmann::json(s).dump(2) << "\n";
      }
      return 0;
    }
    return run_command(ref, seed, RunMode{live, speed}, ladder, trace_out);
  } catch (const ScenarioError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
