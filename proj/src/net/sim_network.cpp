#include "imstb/net/sim_network.hpp"

#include <stdexcept>

namespace imstb::net {

std::string WireEvent::label() const {
  if (const auto* m = sip()) return m->summary();
  return std::string(hss::to_string(cx()->op));
}

SimNetwork::SimNetwork(LossConfig loss, Duration default_latency)
    : loss_(loss), rng_(loss.seed), default_latency_(default_latency) {
  if (loss.p < 0.0 || loss.p > 1.0) throw std::invalid_argument("loss probability outside [0,1]");
}

void SimNetwork::attach(const NetAddress& addr, Node& node) {
  if (!nodes_.emplace(addr, &node).second)
    throw std::invalid_argument("address already attached: " + addr.to_string());
}

void SimNetwork::detach(const NetAddress& addr) { nodes_.erase(addr); }

void SimNetwork::set_latency(const NetAddress& a, const NetAddress& b, Duration latency) {
  if (latency.count() < 0) throw std::invalid_argument("negative latency");
  latencies_[{a, b}] = latency;
  latencies_[{b, a}] = latency;
}

Duration SimNetwork::latency(const NetAddress& a, const NetAddress& b) const {
  const auto it = latencies_.find({a, b});
  return it == latencies_.end() ? default_latency_ : it->second;
}

void SimNetwork::set_down(const NetAddress& addr, bool down) {
  if (down) down_.insert(addr);
  else down_.erase(addr);
}

Runtime::TimerId SimNetwork::schedule_at(Instant at, std::function<void()> fn) {
  if (at < now_) at = now_;
  const Key key{at, next_key_++};
  queue_.emplace(key, Entry{std::move(fn), std::nullopt});
  timer_keys_.emplace(key.second, key);
  return key.second;
}

void SimNetwork::cancel(TimerId id) {
  const auto it = timer_keys_.find(id);
  if (it == timer_keys_.end()) return;
  queue_.erase(it->second);
  timer_keys_.erase(it);
}

bool SimNetwork::draw_loss() {
  if (loss_.p <= 0.0) return false;
  // 53 random mantissa bits; portable, unlike std::uniform_real_distribution.
  const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  return u < loss_.p;
}

void SimNetwork::send(const NetAddress& src, const NetAddress& dst, Payload payload) {
  if (!nodes_.contains(dst)) throw UnknownDestination(dst);
  // Cx-lite rides a reliable stream; only SIP datagrams are subject to loss.
  bool dropped = std::holds_alternative<sip::SipMessage>(payload) && draw_loss();
  if (down_.contains(dst)) dropped = true;
  const Key key{now_ + latency(src, dst), next_key_++};
  queue_.emplace(key, Entry{{}, Delivery{src, dst, std::move(payload), dropped}});
}

void SimNetwork::note_transition(std::string_view node, std::string_view from, std::string_view to,
                                 std::string_view cause) {
  transitions_.push_back({now_, std::string(node), std::string(from), std::string(to), std::string(cause)});
}

void SimNetwork::process(Key key, Entry entry, std::vector<WireEvent>* sink) {
  now_ = key.first;
  if (entry.delivery) {
    auto& d = *entry.delivery;
    WireEvent ev{next_seq_++, now_, d.src, d.dst, std::move(d.payload),
                 d.dropped ? Disposition::Dropped : Disposition::Delivered};
    events_.push_back(ev);
    if (sink) sink->push_back(ev);
    if (!d.dropped) {
      if (const auto it = nodes_.find(ev.dst); it != nodes_.end())
        it->second->receive(ev.payload, ev.src);
    }
  } else if (entry.timer) {
    timer_keys_.erase(key.second);
    entry.timer();
  }
  if (observer_) observer_();
}

std::vector<WireEvent> SimNetwork::transport_step(Instant until) {
  std::vector<WireEvent> produced;
  while (!queue_.empty() && queue_.begin()->first.first <= until) {
    auto node = queue_.extract(queue_.begin());
    process(node.key(), std::move(node.mapped()), &produced);
  }
  if (until > now_) now_ = until;
  return produced;
}

bool SimNetwork::run_until_quiescent(Instant t_max) {
  while (!queue_.empty()) {
    if (queue_.begin()->first.first > t_max) return false;
    auto node = queue_.extract(queue_.begin());
    process(node.key(), std::move(node.mapped()), nullptr);
  }
  return true;
}

std::size_t SimNetwork::in_flight() const {
  std::size_t n = 0;
  for (const auto& [k, e] : queue_)
    if (e.delivery) ++n;
  return n;
}

std::size_t SimNetwork::pending_timers() const { return queue_.size() - in_flight(); }

std::optional<Instant> SimNetwork::next_event_time() const {
  if (queue_.empty()) return std::nullopt;
  return queue_.begin()->first.first;
}

}  // namespace imstb::net
