#pragma once

#include <csignal>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "imstb/harness/trace.hpp"
#include "imstb/net/live_runtime.hpp"
#include "imstb/net/topology.hpp"

namespace imstb::tools {

inline net::LiveRuntime* g_runtime = nullptr;

/// SIGINT and SIGTERM stop the runtime loop.
inline void stop_on_signals(net::LiveRuntime& rt) {
  g_runtime = &rt;
  const auto handler = [](int) {
    if (g_runtime != nullptr) g_runtime->stop();
  };
  std::signal(SIGINT, handler);
  std::signal(SIGTERM, handler);
}

inline std::string role_label(const net::TopologyNode& n) {
  static const std::map<std::string, std::string> labels = {{"pcscf", "P-CSCF"}, {"icscf", "I-CSCF"},
                                                            {"scscf", "S-CSCF"}, {"hss", "HSS"},
                                                            {"xdms", "XDMS"},    {"as", "AS"}};
  const auto it = labels.find(n.role);
  return it == labels.end() ? n.name : it->second;
}

inline std::map<net::NetAddress, std::string> topology_roles(const net::TopologyFile& t) {
  std::map<net::NetAddress, std::string> out;
  for (const auto& n : t.nodes) out[n.address] = role_label(n);
  return out;
}

/// Writes the canonical trace to `path` and/or the ladder to stdout.
inline void dump_trace(const net::Network& net, const std::map<net::NetAddress, std::string>& roles,
                       const std::string& name, const std::string& path, bool ladder) {
  if (path.empty() && !ladder) return;
  auto trace = harness::capture_trace(net, roles);
  trace.scenario = name;
  if (!path.empty()) {
    std::ofstream out(path);
    out << harness::canonical_json(trace);
    if (!out) std::cerr << "cannot write " << path << "\n";
  }
  if (ladder) std::cout << harness::render_ladder(trace);
}

inline void log_to_stderr(net::LiveRuntime& rt, bool verbose) {
  if (verbose) rt.set_log([](const std::string& line) { std::cerr << line << "\n"; });
}

}  // namespace imstb::tools
