#include "imstb/net/live_runtime.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <system_error>

namespace imstb::net {

namespace {

using namespace std::chrono;

[[noreturn]] void fail(const std::string& what) { throw std::system_error(errno, std::generic_category(), what); }

sockaddr_in to_sockaddr(const NetAddress& a) {
  sockaddr_in sa{};
  sa.sin_family = AF_INET;
  sa.sin_port = htons(a.port);
  if (inet_pton(AF_INET, a.host.c_str(), &sa.sin_addr) != 1)
    throw std::invalid_argument("not an IPv4 address: " + a.host);
  return sa;
}

NetAddress from_sockaddr(const sockaddr_in& sa) {
  char buf[INET_ADDRSTRLEN] = {};
  inet_ntop(AF_INET, &sa.sin_addr, buf, sizeof buf);
  return {buf, ntohs(sa.sin_port)};
}

void set_nonblocking(int fd) { fcntl(fd, F_SETFL, fcntl(fd, F_GETFL, 0) | O_NONBLOCK); }

int bound_socket(int type, const NetAddress& addr) {
  const int fd = ::socket(AF_INET, type, 0);
  if (fd < 0) fail("socket");
  const int one = 1;
  setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  const auto sa = to_sockaddr(addr);
  if (::bind(fd, reinterpret_cast<const sockaddr*>(&sa), sizeof sa) != 0) {
    const int err = errno;
    ::close(fd);
    errno = err;
    fail("bind " + addr.to_string());
  }
  return fd;
}

bool write_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const auto n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      if (errno == EAGAIN || errno == EWOULDBLOCK) {
        pollfd p{fd, POLLOUT, 0};
        ::poll(&p, 1, 100);
        continue;
      }
      return false;
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

}  // namespace

LiveRuntime::LiveRuntime(double speed, Instant origin)
    : speed_(speed), origin_(origin), start_(steady_clock::now()) {
  if (speed <= 0.0) throw std::invalid_argument("speed must be positive");
}

LiveRuntime::~LiveRuntime() {
  for (const auto& [fd, _] : conns_) ::close(fd);
  for (const auto& [_, b] : nodes_) {
    ::close(b.udp);
    ::close(b.listener);
  }
}

Instant LiveRuntime::now() const {
  const auto wall = duration_cast<milliseconds>(steady_clock::now() - start_).count();
  return origin_ + Instant{static_cast<std::int64_t>(static_cast<double>(wall) * speed_)};
}

void LiveRuntime::attach(const NetAddress& addr, Node& node) {
  if (nodes_.contains(addr)) throw std::invalid_argument("address already attached: " + addr.to_string());
  Bound b;
  b.node = &node;
  b.udp = bound_socket(SOCK_DGRAM, addr);
  try {
    b.listener = bound_socket(SOCK_STREAM, addr);
  } catch (...) {
    ::close(b.udp);
    throw;
  }
  if (::listen(b.listener, 16) != 0) fail("listen " + addr.to_string());
  set_nonblocking(b.udp);
  set_nonblocking(b.listener);
  nodes_.emplace(addr, b);
}

void LiveRuntime::detach(const NetAddress& addr) {
  const auto it = nodes_.find(addr);
  if (it == nodes_.end()) return;
  ::close(it->second.udp);
  ::close(it->second.listener);
  std::vector<int> owned;
  for (const auto& [fd, c] : conns_)
    if (c.owner == it->second.node) owned.push_back(fd);
  for (int fd : owned) close_conn(fd);
  nodes_.erase(it);
}

void LiveRuntime::set_down(const NetAddress& addr, bool down) {
  if (down) down_.insert(addr);
  else down_.erase(addr);
}

Runtime::TimerId LiveRuntime::schedule_at(Instant at, std::function<void()> fn) {
  const std::pair key{at, next_key_++};
  timers_.emplace(key, std::move(fn));
  const TimerId id = key.second + 1;
  timer_keys_.emplace(id, key);
  return id;
}

void LiveRuntime::cancel(TimerId id) {
  const auto it = timer_keys_.find(id);
  if (it == timer_keys_.end()) return;
  timers_.erase(it->second);
  timer_keys_.erase(it);
}

void LiveRuntime::note_transition(std::string_view node, std::string_view from, std::string_view to,
                                  std::string_view cause) {
  transitions_.push_back({now(), std::string(node), std::string(from), std::string(to), std::string(cause)});
}

void LiveRuntime::log(const std::string& line) const {
  if (log_) log_(line);
}

void LiveRuntime::send(const NetAddress& src, const NetAddress& dst, Payload payload) {
  const auto alias = aliases_.find(dst);
  WireEvent ev{next_seq_++, now(), src, alias == aliases_.end() ? dst : alias->second, payload,
               Disposition::Delivered};
  if (down_.contains(ev.dst)) {
    ev.disposition = Disposition::Dropped;
    events_.push_back(std::move(ev));
    return;
  }

  if (const auto* m = std::get_if<sip::SipMessage>(&payload)) {
    const auto it = nodes_.find(src);
    if (it == nodes_.end()) throw std::logic_error("send from unattached address " + src.to_string());
    const auto wire = sip::serialize_message(*m);
    const auto sa = to_sockaddr(dst);
    if (::sendto(it->second.udp, wire.data(), wire.size(), 0, reinterpret_cast<const sockaddr*>(&sa), sizeof sa) < 0) {
      log("sendto " + dst.to_string() + " failed");
      ev.disposition = Disposition::Dropped;
    }
  } else {
    const int fd = cx_socket(src, dst);
    if (fd < 0 || !write_all(fd, hss::encode_line(std::get<hss::CxMessage>(payload)) + "\n")) {
      log("Cx-lite to " + dst.to_string() + " failed");
      ev.disposition = Disposition::Dropped;
      if (fd >= 0) close_conn(fd);
    }
  }
  events_.push_back(std::move(ev));
}

int LiveRuntime::cx_socket(const NetAddress& src, const NetAddress& dst) {
  if (const auto it = outgoing_.find({src, dst}); it != outgoing_.end()) return it->second;
  if (const auto it = accepted_by_peer_.find(dst); it != accepted_by_peer_.end()) return it->second;
  const auto owner = nodes_.find(src);
  if (owner == nodes_.end()) throw std::logic_error("send from unattached address " + src.to_string());

  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) return -1;
  auto local = to_sockaddr({src.host, 0});
  ::bind(fd, reinterpret_cast<const sockaddr*>(&local), sizeof local);
  const auto sa = to_sockaddr(dst);
  if (::connect(fd, reinterpret_cast<const sockaddr*>(&sa), sizeof sa) != 0) {
    ::close(fd);
    return -1;
  }
  socklen_t len = sizeof local;
  getsockname(fd, reinterpret_cast<sockaddr*>(&local), &len);
  aliases_[from_sockaddr(local)] = src;
  set_nonblocking(fd);
  conns_[fd] = Conn{owner->second.node, dst, false, {}};
  outgoing_[{src, dst}] = fd;
  return fd;
}

void LiveRuntime::close_conn(int fd) {
  const auto it = conns_.find(fd);
  if (it == conns_.end()) return;
  if (it->second.accepted) accepted_by_peer_.erase(it->second.peer);
  std::erase_if(outgoing_, [fd](const auto& kv) { return kv.second == fd; });
  ::close(fd);
  conns_.erase(it);
}

void LiveRuntime::on_udp(const Bound& b) {
  char buf[65536];
  for (;;) {
    sockaddr_in from{};
    socklen_t len = sizeof from;
    const auto n = ::recvfrom(b.udp, buf, sizeof buf, 0, reinterpret_cast<sockaddr*>(&from), &len);
    if (n < 0) return;
    try {
      b.node->receive(sip::parse_message(std::string_view(buf, static_cast<std::size_t>(n))), from_sockaddr(from));
    } catch (const sip::ParseError& e) {
      log("dropped datagram from " + from_sockaddr(from).to_string() + ": " + e.what());
    }
  }
}

void LiveRuntime::on_accept(const Bound& b) {
  for (;;) {
    sockaddr_in from{};
    socklen_t len = sizeof from;
    const int fd = ::accept(b.listener, reinterpret_cast<sockaddr*>(&from), &len);
    if (fd < 0) return;
    set_nonblocking(fd);
    const auto peer = from_sockaddr(from);
    conns_[fd] = Conn{b.node, peer, true, {}};
    accepted_by_peer_[peer] = fd;
  }
}

void LiveRuntime::on_conn(int fd) {
  char buf[8192];
  auto& c = conns_.at(fd);
  for (;;) {
    const auto n = ::recv(fd, buf, sizeof buf, 0);
    if (n == 0 || (n < 0 && errno != EAGAIN && errno != EWOULDBLOCK && errno != EINTR)) {
      close_conn(fd);
      return;
    }
    if (n < 0) break;
    c.rbuf.append(buf, static_cast<std::size_t>(n));
  }
  std::size_t pos;
  while ((pos = c.rbuf.find('\n')) != std::string::npos) {
    const auto line = c.rbuf.substr(0, pos);
    c.rbuf.erase(0, pos + 1);
    Node* owner = c.owner;
    const auto peer = c.peer;
    try {
      owner->receive(hss::decode_line(line), peer);
    } catch (const hss::CxDecodeError& e) {
      log("dropped Cx-lite line from " + peer.to_string() + ": " + e.what());
    }
    // The handler may have closed this connection.
    if (!conns_.contains(fd)) return;
  }
}

bool LiveRuntime::step(milliseconds max_wait) {
  bool active = false;
  {
    std::lock_guard lock(mu_);
    while (!timers_.empty() && timers_.begin()->first.first <= now()) {
      auto node = timers_.extract(timers_.begin());
      timer_keys_.erase(node.key().second + 1);
      node.mapped()();
      active = true;
    }
  }

  std::vector<pollfd> fds;
  std::vector<std::pair<int, const Bound*>> kinds;  // 0 udp, 1 listener, 2 conn
  {
    std::lock_guard lock(mu_);
    for (const auto& [_, b] : nodes_) {
      fds.push_back({b.udp, POLLIN, 0});
      kinds.emplace_back(0, &b);
      fds.push_back({b.listener, POLLIN, 0});
      kinds.emplace_back(1, &b);
    }
    for (const auto& [fd, _] : conns_) {
      fds.push_back({fd, POLLIN, 0});
      kinds.emplace_back(2, nullptr);
    }
    if (!timers_.empty()) {
      const auto until = timers_.begin()->first.first - now();
      const auto wall = milliseconds{static_cast<std::int64_t>(static_cast<double>(until.count()) / speed_)};
      max_wait = std::min(max_wait, std::max(milliseconds{0}, wall));
    }
  }
  max_wait = std::min(max_wait, milliseconds{20});
  if (::poll(fds.data(), fds.size(), static_cast<int>(max_wait.count())) <= 0) return active;

  std::lock_guard lock(mu_);
  for (std::size_t i = 0; i < fds.size(); ++i) {
    if (!(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
    active = true;
    switch (kinds[i].first) {
      case 0: on_udp(*kinds[i].second); break;
      case 1: on_accept(*kinds[i].second); break;
      default:
        if (conns_.contains(fds[i].fd)) on_conn(fds[i].fd);
        break;
    }
  }
  return active;
}

void LiveRuntime::run_until(Instant deadline, const std::function<bool()>& done) {
  while (!stop_ && now() < deadline) {
    step(milliseconds{20});
    if (done) {
      std::lock_guard lock(mu_);
      if (done()) return;
    }
  }
}

bool LiveRuntime::run_until_quiescent(Instant t_max) {
  auto idle_since = steady_clock::now();
  while (!stop_ && now() < t_max) {
    if (step(milliseconds{20})) idle_since = steady_clock::now();
    std::lock_guard lock(mu_);
    if (timers_.empty() && steady_clock::now() - idle_since >= idle_grace_) return true;
  }
  return quiescent();
}

}  // namespace imstb::net
