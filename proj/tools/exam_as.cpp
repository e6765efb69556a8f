// Exam application server on real sockets: SIP towards the S-CSCF, documents
// through the XDMS XCAP interface, and the JSON API over HTTP.

#include <httplib.h>

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "imstb/exam/as_node.hpp"
#include "imstb/hss/store.hpp"
#include "imstb/live/http.hpp"
#include "live_common.hpp"

using namespace imstb;

int main(int argc, char** argv) {
  CLI::App app{"Exam application server"};
  std::string listen_sip = "127.0.0.7:5060";
  std::string listen_http = "127.0.0.1:8080";
  std::string scscf = "127.0.0.4:5060";
  std::string xdms = "127.0.0.6:8081";
  std::string hss_path = "fixtures/hss_subscribers.json";
  std::string journal;
  std::string service_uri = "sip:exam@ims.kau.test";
  std::string static_dir;
  std::string clock = "epoch";
  double speed = 1.0;
  std::string trace_path;
  bool verbose = false;
  app.add_option("--listen-sip", listen_sip, "SIP address host:port");
  app.add_option("--listen-http", listen_http, "HTTP API address host:port");
  app.add_option("--scscf", scscf, "S-CSCF address host:port");
  app.add_option("--xdms", xdms, "XDMS XCAP address host:port");
  app.add_option("--hss", hss_path, "HSS subscriber file used for API logins")->check(CLI::ExistingFile);
  app.add_option("--journal", journal, "Append-only journal; replayed on start");
  app.add_option("--service-uri", service_uri, "Exam service URI");
  app.add_option("--static", static_dir, "Serve files from this directory under /")->check(CLI::ExistingDirectory);
  app.add_option("--clock", clock, "epoch: instants are Unix ms; zero: ms since start")
      ->check(CLI::IsMember({"epoch", "zero"}));
  app.add_option("--speed", speed, "Clock speed factor")->check(CLI::PositiveNumber);
  app.add_option("--trace", trace_path, "Write the wire trace here on exit");
  app.add_flag("-v,--verbose", verbose, "Log dropped datagrams");
  CLI11_PARSE(app, argc, argv);

  try {
    const auto sip_addr = live::parse_hostport(listen_sip, 5060);
    const auto http_addr = live::parse_hostport(listen_http, 8080);
    const auto xdms_addr = live::parse_hostport(xdms, 8081);
    net::Instant origin{0};
    if (clock == "epoch")
      origin = std::chrono::duration_cast<net::Instant>(std::chrono::system_clock::now().time_since_epoch());

    net::LiveRuntime rt(speed, origin);
    tools::log_to_stderr(rt, verbose);
    const auto hss_store = hss::HssStore::load(hss_path);
    live::XcapClient docs(live::HttpClient(xdms_addr.host, xdms_addr.port));
    exam::ExamAsNode::Config cfg{live::parse_hostport(scscf, 5060), sip::SipUri::parse(service_uri)};
    exam::ExamAsNode as(rt, sip_addr, cfg, docs, exam::hss_authenticator(hss_store));

    if (!journal.empty()) {
      if (std::filesystem::exists(journal)) {
        std::ifstream in(journal);
        std::vector<std::string> lines;
        for (std::string line; std::getline(in, line);)
          if (!line.empty()) lines.push_back(line);
        as.service().replay(lines);
        std::cout << "replayed " << lines.size() << " journal entries\n";
      }
      as.service().set_journal_path(journal);
    }
    rt.attach(sip_addr, as);

    httplib::Server server;
    if (!static_dir.empty()) server.set_mount_point("/", static_dir);
    live::route_all(server, rt.mutex(), [&as](const util::HttpRequest& req) { return as.http(req); });
    if (!server.bind_to_port(http_addr.host, http_addr.port)) {
      std::cerr << "cannot bind HTTP on " << http_addr.to_string() << "\n";
      return 2;
    }
    std::cout << "exam AS: SIP " << sip_addr.to_string() << ", HTTP http://" << http_addr.to_string()
              << ", clock now " << rt.now().count() << " ms" << std::endl;
    std::thread http_thread([&server] { server.listen_after_bind(); });

    tools::stop_on_signals(rt);
    rt.run_until(net::Instant::max());

    server.stop();
    http_thread.join();
    std::lock_guard lock(rt.mutex());
    tools::dump_trace(rt, {{sip_addr, "AS"}}, "exam-as", trace_path, false);
  } catch (const std::exception& e) {
    std::cerr << "exam-as: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
