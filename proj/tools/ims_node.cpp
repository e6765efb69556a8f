// Runs the IMS core (P-, I-, S-CSCF, HSS, XDMS) from a topology file on real
// sockets, with the XDMS XCAP interface over HTTP.

#include <httplib.h>

#include <CLI11.hpp>

#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <thread>

#include "imstb/harness/testbed.hpp"
#include "imstb/hss/store.hpp"
#include "imstb/ims/cscf.hpp"
#include "imstb/live/http.hpp"
#include "imstb/xdms/xdms_node.hpp"
#include "live_common.hpp"

using namespace imstb;

namespace {

const std::set<std::string> kCoreRoles = {"pcscf", "icscf", "scscf", "hss", "xdms"};

/// "sip:cs101@ims.kau.test=s1,s2" -> group uri and member users.
std::pair<std::string, std::vector<std::string>> parse_group(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw std::invalid_argument("group needs <uri>=<user,...>: " + text);
  std::vector<std::string> users;
  std::istringstream in(text.substr(eq + 1));
  for (std::string u; std::getline(in, u, ',');)
    if (!u.empty()) users.push_back(u);
  return {text.substr(0, eq), users};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IMS core nodes on loopback sockets"};
  std::string topology_path = "fixtures/topology.json";
  std::string hss_path = "fixtures/hss_subscribers.json";
  std::vector<std::string> only;
  std::vector<std::string> groups;
  std::string group_owner = "teacher@ims.kau.test";
  bool persist = false;
  double speed = 1.0;
  std::string trace_path;
  bool ladder = false;
  bool verbose = false;
  app.add_option("--topology", topology_path, "Topology file")->check(CLI::ExistingFile);
  app.add_option("--hss", hss_path, "HSS subscriber file")->check(CLI::ExistingFile);
  app.add_flag("--persist", persist, "Write HSS changes back to the subscriber file");
  app.add_option("--only", only, "Run only these node names or roles")->delimiter(',');
  app.add_option("--group", groups, "Seed a group list: <uri>=<user,...>");
  app.add_option("--group-owner", group_owner, "Owner of seeded group lists");
  app.add_option("--speed", speed, "Clock speed factor")->check(CLI::PositiveNumber);
  app.add_option("--trace", trace_path, "Write the wire trace here on exit");
  app.add_flag("--ladder", ladder, "Print the ladder on exit");
  app.add_flag("-v,--verbose", verbose, "Log dropped datagrams");
  CLI11_PARSE(app, argc, argv);

  try {
    const auto topo = net::load_topology(topology_path);
    const auto wanted = [&](const net::TopologyNode& n) {
      if (!kCoreRoles.contains(n.role)) return false;
      if (only.empty()) return true;
      return std::find(only.begin(), only.end(), n.name) != only.end() ||
             std::find(only.begin(), only.end(), n.role) != only.end();
    };

    net::LiveRuntime rt(speed);
    tools::log_to_stderr(rt, verbose);
    auto hss_store = hss::HssStore::load(hss_path);
    if (persist) hss_store.persist_to(hss_path);
    xdms::XdmStore docs;
    for (const auto& g : groups) {
      const auto [uri, users] = parse_group(g);
      const auto name = sip::SipUri::parse(uri).user.value_or("groups");
      docs.put_document({std::string(xdms::kResourceLists), group_owner, name, "application/resource-lists+xml",
                         harness::group_xml(uri, users), {}},
                        std::nullopt);
    }

    std::set<net::NetAddress> scscfs;
    std::map<std::string, net::NetAddress> directory;
    for (const auto* n : topo.with_role("scscf")) {
      scscfs.insert(n->address);
      directory[n->name] = n->address;
    }
    std::set<net::NetAddress> service_origins;
    for (const auto* n : topo.with_role("as")) service_origins.insert(n->address);
    const auto xdms_nodes = topo.with_role("xdms");
    if (!xdms_nodes.empty()) service_origins.insert(xdms_nodes.front()->address);

    std::vector<std::unique_ptr<net::Node>> nodes;
    xdms::XdmsNode* xdms_node = nullptr;
    const net::TopologyNode* xdms_spec = nullptr;
    for (const auto& n : topo.nodes) {
      if (!wanted(n)) continue;
      std::unique_ptr<net::Node> node;
      if (n.role == "hss") {
        node = std::make_unique<hss::HssNode>(rt, n.address, hss_store);
      } else if (n.role == "pcscf") {
        node = std::make_unique<ims::Pcscf>(rt, n.address, topo.only("icscf").address, scscfs);
      } else if (n.role == "icscf") {
        node = std::make_unique<ims::Icscf>(rt, n.address, topo.only("hss").address, directory);
      } else if (n.role == "scscf") {
        ims::Scscf::Config sc;
        sc.name = n.name;
        sc.hss = topo.only("hss").address;
        sc.home_domain = topo.domain;
        if (!xdms_nodes.empty()) sc.xdms = xdms_nodes.front()->address;
        sc.service_origins = service_origins;
        node = std::make_unique<ims::Scscf>(rt, n.address, sc);
      } else if (n.role == "xdms") {
        auto x = std::make_unique<xdms::XdmsNode>(rt, n.address, docs);
        xdms_node = x.get();
        xdms_spec = &n;
        node = std::move(x);
      }
      rt.attach(n.address, *node);
      std::cout << n.name << " (" << tools::role_label(n) << ") on " << n.address.to_string() << "\n";
      nodes.push_back(std::move(node));
    }
    if (nodes.empty()) {
      std::cerr << "no core nodes selected\n";
      return 2;
    }

    httplib::Server xcap;
    std::thread xcap_thread;
    if (xdms_node != nullptr && xdms_spec->http_port) {
      live::route_all(xcap, rt.mutex(), [&docs](const util::HttpRequest& req) { return xdms::xcap_http(docs, req); });
      if (!xcap.bind_to_port(xdms_spec->address.host, *xdms_spec->http_port)) {
        std::cerr << "cannot bind XCAP on " << xdms_spec->address.host << ":" << *xdms_spec->http_port << "\n";
        return 2;
      }
      std::cout << "XCAP on http://" << xdms_spec->address.host << ":" << *xdms_spec->http_port << "\n";
      xcap_thread = std::thread([&xcap] { xcap.listen_after_bind(); });
    }
    std::cout.flush();

    tools::stop_on_signals(rt);
    rt.run_until(net::Instant::max());

    xcap.stop();
    if (xcap_thread.joinable()) xcap_thread.join();
    std::lock_guard lock(rt.mutex());
    tools::dump_trace(rt, tools::topology_roles(topo), "ims-node", trace_path, ladder);
  } catch (const std::exception& e) {
    std::cerr << "ims-node: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
