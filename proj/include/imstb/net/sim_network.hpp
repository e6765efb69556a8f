#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "imstb/net/runtime.hpp"

namespace imstb::net {

/// Per-message drop probability for SIP datagrams, drawn from a seeded generator.
struct LossConfig {
  double p = 0.0;
  std::uint64_t seed = 1;
};

/// In-process network with a virtual clock. Deliveries and timers share one
/// queue ordered by (time, insertion order); nothing runs concurrently.
class SimNetwork final : public Network {
 public:
  SimNetwork() : SimNetwork(LossConfig{}) {}
  explicit SimNetwork(LossConfig loss, Duration default_latency = Duration{10});

  void attach(const NetAddress& addr, Node& node) override;
  void detach(const NetAddress& addr) override;
  bool knows(const NetAddress& addr) const { return nodes_.contains(addr); }

  void set_latency(const NetAddress& a, const NetAddress& b, Duration latency);
  Duration latency(const NetAddress& a, const NetAddress& b) const;
  /// Every message to a down node is dropped.
  void set_down(const NetAddress& addr, bool down) override;

  Instant now() const override { return now_; }
  TimerId schedule_at(Instant at, std::function<void()> fn) override;
  void cancel(TimerId id) override;
  void send(const NetAddress& src, const NetAddress& dst, Payload payload) override;
  void note_transition(std::string_view node, std::string_view from, std::string_view to,
                       std::string_view cause) override;

  /// Processes every queued delivery and timer due at or before `until`, then
  /// leaves the clock at `until`. Returns the wire events produced.
  std::vector<WireEvent> transport_step(Instant until);

  /// Runs until the queue is empty or the next event lies beyond `t_max`.
  /// Returns true on quiescence.
  bool run_until_quiescent(Instant t_max) override;

  bool quiescent() const override { return queue_.empty(); }
  std::size_t in_flight() const override;
  std::size_t pending_timers() const override;
  std::optional<Instant> next_event_time() const;

  const std::vector<WireEvent>& wire_events() const override { return events_; }
  const std::vector<StateTransition>& transitions() const override { return transitions_; }

  /// Called after every processed queue entry; used by invariant monitors.
  void set_observer(std::function<void()> observer) { observer_ = std::move(observer); }

 private:
  struct Delivery {
    NetAddress src;
    NetAddress dst;
    Payload payload;
    bool dropped = false;
  };
  struct Entry {
    std::function<void()> timer;
    std::optional<Delivery> delivery;
  };
  using Key = std::pair<Instant, std::uint64_t>;

  void process(Key key, Entry entry, std::vector<WireEvent>* sink);
  bool draw_loss();

  LossConfig loss_;
  std::mt19937_64 rng_;
  Duration default_latency_;
  Instant now_{0};
  std::uint64_t next_key_ = 0;
  std::uint64_t next_seq_ = 0;
  std::map<NetAddress, Node*> nodes_;
  std::map<std::pair<NetAddress, NetAddress>, Duration> latencies_;
  std::set<NetAddress> down_;
  std::map<Key, Entry> queue_;
  std::map<TimerId, Key> timer_keys_;
  std::vector<WireEvent> events_;
  std::vector<StateTransition> transitions_;
  std::function<void()> observer_;
};

}  // namespace imstb::net
