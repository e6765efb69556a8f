#include "imstb/net/topology.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace imstb::net {

namespace {

const std::set<std::string> kRoles = {"pcscf", "icscf", "scscf", "hss", "xdms", "as", "ua", "proxy", "redirect"};

}  // namespace

const TopologyNode& TopologyFile::by_name(const std::string& name) const {
  for (const auto& n : nodes)
    if (n.name == name) return n;
  throw std::invalid_argument("topology has no node " + name);
}

std::vector<const TopologyNode*> TopologyFile::with_role(const std::string& role) const {
  std::vector<const TopologyNode*> out;
  for (const auto& n : nodes)
    if (n.role == role) out.push_back(&n);
  return out;
}

const TopologyNode& TopologyFile::only(const std::string& role) const {
  const auto found = with_role(role);
  if (found.size() != 1)
    throw std::invalid_argument("topology needs exactly one " + role + " node, has " + std::to_string(found.size()));
  return *found.front();
}

void TopologyFile::apply_latencies(SimNetwork& net) const {
  for (const auto& l : links)
    net.set_latency(by_name(l.a).address, by_name(l.b).address, Duration{l.latency_ms});
}

TopologyFile parse_topology(const nlohmann::json& j) {
  TopologyFile t;
  try {
    t.domain = j.value("domain", t.domain);
    std::set<std::string> names;
    std::set<NetAddress> addrs;
    for (const auto& n : j.at("nodes")) {
      TopologyNode node{n.at("name").get<std::string>(), n.at("role").get<std::string>(),
                        {n.at("host").get<std::string>(), n.value("port", std::uint16_t{5060})}, std::nullopt};
      if (n.contains("http_port")) node.http_port = n.at("http_port").get<std::uint16_t>();
      if (!kRoles.contains(node.role)) throw std::invalid_argument("unknown role " + node.role);
      if (!names.insert(node.name).second) throw std::invalid_argument("duplicate node name " + node.name);
      if (!addrs.insert(node.address).second)
        throw std::invalid_argument("duplicate address " + node.address.to_string());
      t.nodes.push_back(std::move(node));
    }
    for (const auto& l : j.value("links", nlohmann::json::array())) {
      TopologyLink link{l.at("a").get<std::string>(), l.at("b").get<std::string>(),
                        l.value("latency_ms", std::int64_t{10})};
      if (!names.contains(link.a) || !names.contains(link.b))
        throw std::invalid_argument("link names an unknown node");
      if (link.latency_ms < 0) throw std::invalid_argument("negative link latency");
      t.links.push_back(link);
    }
    if (j.contains("loss")) {
      t.loss.p = j.at("loss").value("p", 0.0);
      t.loss.seed = j.at("loss").value("seed", std::uint64_t{1});
      if (t.loss.p < 0.0 || t.loss.p > 1.0) throw std::invalid_argument("loss outside [0,1]");
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("topology: ") + e.what());
  }
  return t;
}

TopologyFile load_topology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return parse_topology(j);
}

}  // namespace imstb::net
