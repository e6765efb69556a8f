#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "imstb/net/runtime.hpp"

namespace imstb::net {

/// Real sockets on (usually loopback) addresses: SIP as UDP datagrams in the
/// canonical wire format, Cx-lite as newline-delimited JSON over TCP. Every
/// attached node gets its own UDP socket and TCP listener at its address.
///
/// The clock is `origin` plus wall time since construction multiplied by
/// `speed`; an epoch origin makes instants Unix milliseconds. One thread
/// runs the loop; other threads must hold mutex() while touching nodes.
class LiveRuntime final : public Network {
 public:
  explicit LiveRuntime(double speed = 1.0, Instant origin = Instant{0});
  ~LiveRuntime() override;
  LiveRuntime(const LiveRuntime&) = delete;
  LiveRuntime& operator=(const LiveRuntime&) = delete;

  /// Throws std::system_error when the address cannot be bound.
  void attach(const NetAddress& addr, Node& node) override;
  void detach(const NetAddress& addr) override;
  void set_down(const NetAddress& addr, bool down) override;

  Instant now() const override;
  TimerId schedule_at(Instant at, std::function<void()> fn) override;
  void cancel(TimerId id) override;
  void send(const NetAddress& src, const NetAddress& dst, Payload payload) override;
  void note_transition(std::string_view node, std::string_view from, std::string_view to,
                       std::string_view cause) override;

  /// Quiescent once no timer is pending and the sockets have been idle for
  /// `idle_grace` of wall time.
  bool run_until_quiescent(Instant t_max) override;
  bool quiescent() const override { return timers_.empty(); }
  std::size_t in_flight() const override { return 0; }
  std::size_t pending_timers() const override { return timers_.size(); }

  /// Runs the loop until `done` returns true, stop() is called or the clock passes `deadline`.
  void run_until(Instant deadline, const std::function<bool()>& done = {});
  /// Safe from any thread or signal handler.
  void stop() { stop_ = true; }
  bool stopped() const { return stop_; }

  const std::vector<WireEvent>& wire_events() const override { return events_; }
  const std::vector<StateTransition>& transitions() const override { return transitions_; }

  std::mutex& mutex() { return mu_; }
  void set_idle_grace(std::chrono::milliseconds grace) { idle_grace_ = grace; }
  /// Diagnostics such as undecodable datagrams; default writes nothing.
  void set_log(std::function<void(const std::string&)> log) { log_ = std::move(log); }

 private:
  struct Bound {
    Node* node = nullptr;
    int udp = -1;
    int listener = -1;
  };
  struct Conn {
    Node* owner = nullptr;
    NetAddress peer;  // logical address for outgoing, socket address for accepted
    bool accepted = false;
    std::string rbuf;
  };

  /// Fires due timers and waits up to `max_wait` of wall time for input.
  /// Returns true when anything happened.
  bool step(std::chrono::milliseconds max_wait);
  void on_udp(const Bound& b);
  void on_accept(const Bound& b);
  void on_conn(int fd);
  void close_conn(int fd);
  int cx_socket(const NetAddress& src, const NetAddress& dst);
  void log(const std::string& line) const;

  double speed_;
  Instant origin_;
  std::chrono::steady_clock::time_point start_;
  std::mutex mu_;
  std::atomic<bool> stop_{false};
  std::chrono::milliseconds idle_grace_{100};
  std::function<void(const std::string&)> log_;

  std::map<NetAddress, Bound> nodes_;
  std::map<int, Conn> conns_;
  std::map<std::pair<NetAddress, NetAddress>, int> outgoing_;
  std::map<NetAddress, int> accepted_by_peer_;
  /// Local socket address of our own outgoing Cx connections -> logical node.
  std::map<NetAddress, NetAddress> aliases_;
  std::set<NetAddress> down_;

  std::uint64_t next_key_ = 0;
  std::map<std::pair<Instant, std::uint64_t>, std::function<void()>> timers_;
  std::map<TimerId, std::pair<Instant, std::uint64_t>> timer_keys_;

  std::uint64_t next_seq_ = 0;
  std::vector<WireEvent> events_;
  std::vector<StateTransition> transitions_;
};

}  // namespace imstb::net
