// Interactive or scripted IMS user agent on a real socket.

#include <CLI11.hpp>

#include <deque>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "imstb/live/http.hpp"
#include "imstb/ua/user_agent.hpp"
#include "live_common.hpp"

using namespace imstb;

namespace {

/// Lines from stdin (via a reader thread) or from a script.
class Lines {
 public:
  void push(std::string line) {
    std::lock_guard lock(mu_);
    q_.push_back(std::move(line));
  }
  void close() {
    std::lock_guard lock(mu_);
    closed_ = true;
  }
  bool ready() const {
    std::lock_guard lock(mu_);
    return !q_.empty() || closed_;
  }
  std::optional<std::string> pop() {
    std::lock_guard lock(mu_);
    if (q_.empty()) return std::nullopt;
    auto line = std::move(q_.front());
    q_.pop_front();
    return line;
  }

 private:
  mutable std::mutex mu_;
  std::deque<std::string> q_;
  bool closed_ = false;
};

std::vector<std::string> words(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

class Session {
 public:
  Session(net::LiveRuntime& rt, ua::UserAgent& ua, live::HttpClient http, Lines& lines, ua::Channel channel,
          net::Duration timeout)
      : rt_(rt), ua_(ua), http_(std::move(http)), lines_(lines), channel_(channel), timeout_(timeout) {}

  /// Runs commands until input ends or "quit"; returns the number of failures.
  int run(bool prompt) {
    int failures = 0;
    while (true) {
      if (prompt) std::cout << ua_.aor() << "> " << std::flush;
      const auto line = read_line();
      if (!line) break;
      const auto w = words(*line);
      if (w.empty() || w[0].starts_with('#')) continue;
      if (w[0] == "quit" || w[0] == "exit") break;
      try {
        if (!execute(w)) ++failures;
      } catch (const std::exception& e) {
        std::cout << "error: " << e.what() << "\n";
        ++failures;
      }
    }
    return failures;
  }

  bool execute(const std::vector<std::string>& w) {
    const auto& cmd = w[0];
    if (cmd == "register") {
      ua_.register_ua();
      wait([&] { return ua_.registration() != ua::RegState::Registering; });
      std::cout << "registration " << ua::to_string(ua_.registration());
      if (ua_.registration() == ua::RegState::Registered) std::cout << " expires " << ua_.granted_expires();
      if (ua_.failure() != ua::RegFailure::None) std::cout << " (" << ua::to_string(ua_.failure()) << ")";
      std::cout << "\n";
      return ua_.registration() == ua::RegState::Registered;
    }
    if (cmd == "deregister") {
      ua_.deregister();
      wait([&] { return ua_.registration() != ua::RegState::Registering; });
      std::cout << "registration " << ua::to_string(ua_.registration()) << "\n";
      return ua_.registration() == ua::RegState::Idle;
    }
    if (cmd == "subscribe") {
      ua_.subscribe_exam_service();
      wait([&] { return ua_.subscription() != ua::SubOutcome::Pending; });
      std::cout << "subscription " << ua::to_string(ua_.subscription()) << "\n";
      return ua_.subscription() == ua::SubOutcome::Active;
    }
    if (cmd == "unsubscribe") {
      ua_.unsubscribe();
      wait([&] { return ua_.subscription() != ua::SubOutcome::Active; });
      std::cout << "subscription " << ua::to_string(ua_.subscription()) << "\n";
      return true;
    }
    if (cmd == "inbox") {
      for (const auto& item : ua_.inbox()) print(item);
      if (ua_.inbox().empty()) std::cout << "inbox empty\n";
      return true;
    }
    if (cmd == "status") {
      std::cout << "registration " << ua::to_string(ua_.registration()) << ", subscription "
                << ua::to_string(ua_.subscription()) << ", inbox " << ua_.inbox().size() << "\n";
      return true;
    }
    if (cmd == "wait") {
      const auto ms = w.size() > 1 ? std::stoll(w[1]) : 1000;
      pump(rt_.now() + net::Duration{ms}, [] { return false; });
      return true;
    }
    if (cmd == "wait-for") {
      if (w.size() < 2 || (w[1] != "exam" && w[1] != "result")) throw std::invalid_argument("wait-for exam|result [ms]");
      const auto kind = w[1] == "exam" ? ua::InboxItem::Kind::Exam : ua::InboxItem::Kind::Result;
      const auto have = count(kind);
      const auto ms = w.size() > 2 ? std::stoll(w[2]) : timeout_.count();
      const bool ok = pump(rt_.now() + net::Duration{ms}, [&] { return count(kind) > have; });
      if (!ok) std::cout << "no " << w[1] << " within " << ms << " ms\n";
      return ok;
    }
    if (cmd == "answer") return answer(w);
    if (cmd == "provision") return provision(w);
    if (cmd == "help") {
      std::cout << "commands: register, deregister, subscribe, unsubscribe, inbox, status, wait <ms>,\n"
                   "  wait-for exam|result [ms], answer <exam_id> [q=i,...] [--http|--sip],\n"
                   "  provision <exam.json>, quit\n";
      return true;
    }
    throw std::invalid_argument("unknown command " + cmd + " (try help)");
  }

 private:
  std::optional<std::string> read_line() {
    while (!lines_.ready() && !rt_.stopped()) pump(rt_.now() + net::Duration{1000}, [&] { return lines_.ready(); });
    return lines_.pop();
  }

  /// Runs the loop until `done` or `deadline`, printing arrivals as they come.
  template <typename Pred>
  bool pump(net::Instant deadline, Pred done) {
    while (!rt_.stopped()) {
      const auto slice = std::min(deadline, rt_.now() + net::Duration{100});
      rt_.run_until(slice, [&] { return done() || ua_.inbox().size() > shown_; });
      std::lock_guard lock(rt_.mutex());
      show_new();
      if (done()) return true;
      if (rt_.now() >= deadline) return false;
    }
    return false;
  }

  template <typename Pred>
  void wait(Pred done) {
    pump(rt_.now() + timeout_, done);
  }

  std::size_t count(ua::InboxItem::Kind kind) const {
    std::size_t n = 0;
    for (const auto& item : ua_.inbox()) n += item.kind == kind ? 1 : 0;
    return n;
  }

  void show_new() {
    for (; shown_ < ua_.inbox().size(); ++shown_) print(ua_.inbox()[shown_]);
  }

  static void print(const ua::InboxItem& item) {
    const auto& b = item.body;
    if (item.kind == ua::InboxItem::Kind::Exam) {
      std::cout << "[exam] " << b.value("exam_id", "?") << " \"" << b.value("title", "") << "\" closes at "
                << b.value("close_at", std::int64_t{0}) << "\n";
      for (const auto& q : b.value("questions", nlohmann::json::array())) {
        std::cout << "  " << q.value("qid", "?") << ": " << q.value("prompt", "") << "\n";
        int i = 0;
        for (const auto& c : q.value("choices", nlohmann::json::array()))
          std::cout << "    (" << i++ << ") " << c.get<std::string>() << "\n";
      }
    } else if (b.value("kind", "") == "summary") {
      std::cout << "[summary] " << b.value("exam_id", "?") << " submitted " << b.value("count", 0) << "/"
                << b.value("members", 0) << ", mean " << b.value("mean", 0.0) << "/" << b.value("max_score", 0)
                << "\n";
    } else {
      std::cout << "[result] " << b.value("exam_id", "?") << " score " << b.value("score", 0) << "/"
                << b.value("max_score", 0);
      const auto per = b.value("per_question", nlohmann::json::object());
      for (const auto& [qid, v] : per.items())
        std::cout << " " << qid << "=" << v.get<std::string>();
      std::cout << "\n";
    }
  }

  const nlohmann::json* find_exam(const std::string& exam_id) const {
    for (const auto& item : ua_.inbox())
      if (item.kind == ua::InboxItem::Kind::Exam && item.body.value("exam_id", "") == exam_id) return &item.body;
    return nullptr;
  }

  bool answer(const std::vector<std::string>& w) {
    if (w.size() < 2) throw std::invalid_argument("answer <exam_id> [q=i,...] [--http|--sip]");
    const auto& exam_id = w[1];
    auto channel = channel_;
    ua::Answers answers;
    for (std::size_t i = 2; i < w.size(); ++i) {
      if (w[i] == "--http") {
        channel = ua::Channel::Http;
        continue;
      }
      if (w[i] == "--sip") {
        channel = ua::Channel::Sip;
        continue;
      }
      std::istringstream in(w[i]);
      for (std::string pair; std::getline(in, pair, ',');) {
        const auto eq = pair.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("answers look like q1=0,q2=2");
        answers[pair.substr(0, eq)] = std::stoi(pair.substr(eq + 1));
      }
    }
    if (answers.empty()) {
      const auto* exam = find_exam(exam_id);
      if (exam == nullptr) throw std::invalid_argument("no exam " + exam_id + " in inbox");
      const auto questions = exam->value("questions", nlohmann::json::array());
      for (const auto& q : questions) {
        const auto qid = q.value("qid", "");
        std::cout << qid << ": " << q.value("prompt", "") << "\n";
        int i = 0;
        for (const auto& c : q.value("choices", nlohmann::json::array()))
          std::cout << "  (" << i++ << ") " << c.get<std::string>() << "\n";
        std::cout << "choice for " << qid << " (empty to skip)> " << std::flush;
        const auto line = read_line();
        if (!line) break;
        const auto t = words(*line);
        if (!t.empty()) answers[qid] = std::stoi(t[0]);
      }
    }
    ua_.submit_answers(exam_id, answers, channel);
    wait([&] { return ua_.submission(exam_id) != ua::SubmitOutcome::Pending; });
    const auto outcome = ua_.submission(exam_id).value_or(ua::SubmitOutcome::Pending);
    std::cout << "submission " << ua::to_string(outcome) << "\n";
    return outcome == ua::SubmitOutcome::Accepted;
  }

  bool provision(const std::vector<std::string>& w) {
    if (w.size() < 2) throw std::invalid_argument("provision <exam.json>");
    std::ifstream in(w[1]);
    if (!in) throw std::invalid_argument("cannot open " + w[1]);
    const auto spec = nlohmann::json::parse(in);
    const auto& cfg = ua_.config();
    const auto login = http_({"POST", "/api/login", {}, {},
                              nlohmann::json{{"user", ua_.aor()}, {"passkey", cfg.passkey}}.dump()});
    if (login.status != 200) {
      std::cout << "login failed: " << login.status << " " << login.body << "\n";
      return false;
    }
    const auto token = nlohmann::json::parse(login.body).at("token").get<std::string>();
    const auto created =
        http_({"POST", "/api/exams", {}, {{"authorization", "Bearer " + token}}, spec.dump()});
    std::cout << "provision " << created.status << " " << created.body << "\n";
    return created.status == 201;
  }

  net::LiveRuntime& rt_;
  ua::UserAgent& ua_;
  live::HttpClient http_;
  Lines& lines_;
  ua::Channel channel_;
  net::Duration timeout_;
  std::size_t shown_ = 0;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IMS exam user agent"};
  std::string identity;
  std::string passkey;
  std::string pcscf = "127.0.0.2:5060";
  std::string local = "127.0.1.1:5060";
  std::string http = "127.0.0.1:8080";
  std::string channel = "sip";
  std::uint32_t expires = 3600;
  bool refresh = false;
  std::int64_t timeout_ms = 10000;
  std::string trace_path;
  bool verbose = false;
  app.add_option("--identity", identity, "Public identity, e.g. sip:s1@ims.kau.test")->required();
  app.add_option("--passkey", passkey, "Passkey")->required();
  app.add_option("--pcscf", pcscf, "P-CSCF host:port");
  app.add_option("--local", local, "Local SIP address host:port");
  app.add_option("--http", http, "Exam AS HTTP host:port");
  app.add_option("--channel", channel, "Default submission channel")->check(CLI::IsMember({"sip", "http"}));
  app.add_option("--expires", expires, "Requested registration expiry in seconds");
  app.add_flag("--refresh", refresh, "Re-register before expiry");
  app.add_option("--timeout", timeout_ms, "Wait limit per command in ms");
  app.add_option("--trace", trace_path, "Write this UA's wire trace here on exit");
  app.add_flag("-v,--verbose", verbose, "Log dropped datagrams");
  std::vector<std::string> commands;
  app.add_option("commands", commands, "Commands to run in order, e.g. register subscribe; none reads stdin");
  std::string script;
  auto* run_script = app.add_subcommand("run-script", "Run commands from a file, one per line");
  run_script->add_option("file", script, "Script file")->required()->check(CLI::ExistingFile);
  CLI11_PARSE(app, argc, argv);

  try {
    ua::UaConfig cfg;
    cfg.identity = sip::SipUri::parse(identity);
    cfg.passkey = passkey;
    cfg.pcscf = live::parse_hostport(pcscf, 5060);
    cfg.local = live::parse_hostport(local, 5060);
    cfg.auto_channel = channel == "http" ? ua::Channel::Http : ua::Channel::Sip;
    cfg.requested_expires = expires;
    cfg.auto_refresh = refresh;
    const auto http_addr = live::parse_hostport(http, 8080);

    net::LiveRuntime rt;
    tools::log_to_stderr(rt, verbose);
    ua::UserAgent agent(rt, cfg, cfg.identity.user.value_or("ua"));
    live::HttpClient client(http_addr.host, http_addr.port);
    agent.set_http(client);
    rt.attach(cfg.local, agent);
    tools::stop_on_signals(rt);

    Lines lines;
    bool interactive = false;
    std::thread reader;
    if (*run_script) {
      std::ifstream in(script);
      for (std::string line; std::getline(in, line);) lines.push(line);
      lines.close();
    } else if (!commands.empty()) {
      for (const auto& c : commands) lines.push(c);
      lines.close();
    } else {
      interactive = true;
      reader = std::thread([&lines] {
        for (std::string line; std::getline(std::cin, line);) lines.push(line);
        lines.close();
      });
      reader.detach();
    }

    Session session(rt, agent, client, lines, cfg.auto_channel, net::Duration{timeout_ms});
    const int failures = session.run(interactive);
    std::lock_guard lock(rt.mutex());
    tools::dump_trace(rt, {{cfg.local, agent.name()}, {cfg.pcscf, "P-CSCF"}}, "ua", trace_path, false);
    return failures == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "ua: " << e.what() << "\n";
    return 2;
  }
}
