#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "imstb/net/address.hpp"
#include "imstb/net/sim_network.hpp"

namespace imstb::net {

struct TopologyNode {
  std::string name;
  std::string role;  // pcscf, icscf, scscf, hss, xdms, as, ua, proxy, redirect
  NetAddress address;
  /// HTTP side for the XDMS (XCAP) and the AS (exam API).
  std::optional<std::uint16_t> http_port;
};

struct TopologyLink {
  std::string a;
  std::string b;
  std::int64_t latency_ms = 10;
};

/// Topology file: {"domain", "nodes": [{name, role, host, port, http_port?}],
/// "links": [{a, b, latency_ms}], "loss": {p, seed}}.
struct TopologyFile {
  std::string domain = "ims.kau.test";
  std::vector<TopologyNode> nodes;
  std::vector<TopologyLink> links;
  LossConfig loss;

  const TopologyNode& by_name(const std::string& name) const;
  /// Throws std::invalid_argument unless exactly one node has the role.
  const TopologyNode& only(const std::string& role) const;
  std::vector<const TopologyNode*> with_role(const std::string& role) const;

  /// Applies per-link latencies to a simulated network.
  void apply_latencies(SimNetwork& net) const;
};

/// Throws std::invalid_argument on unknown roles, duplicate names or
/// addresses, and links naming unknown nodes.
TopologyFile parse_topology(const nlohmann::json& j);
TopologyFile load_topology(const std::string& path);

}  // namespace imstb::net
