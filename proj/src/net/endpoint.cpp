#include "imstb/net/endpoint.hpp"

#include <algorithm>
#include <stdexcept>

namespace imstb::net {

void TimerConfig::validate() const {
  if (t1_ms < 1) throw std::invalid_argument("t1_ms must be >= 1");
  if (t2_ms < t1_ms) throw std::invalid_argument("t2_ms must be >= t1_ms");
  if (max_retransmits < 0) throw std::invalid_argument("max_retransmits must be >= 0");
  if (transaction_timeout_ms < 1) throw std::invalid_argument("transaction_timeout_ms must be >= 1");
}

Duration TimerConfig::interval(int k) const {
  std::int64_t v = t1_ms;
  for (int i = 0; i < k && v < t2_ms; ++i) v *= 2;
  return Duration{std::min(v, t2_ms)};
}

std::string_view to_string(TxState s) {
  switch (s) {
    case TxState::Trying: return "Trying";
    case TxState::Proceeding: return "Proceeding";
    case TxState::Completed: return "Completed";
    case TxState::Terminated: return "Terminated";
  }
  return "?";
}

TransactionKey key_of(const sip::SipMessage& msg) {
  return {msg.vias.empty() ? std::string() : msg.vias.front().branch(), msg.cseq.method};
}

std::vector<TimerAction> on_timer(ClientTransaction& tx, Instant now, const TimerConfig& cfg) {
  const Instant deadline = tx.started + Duration{cfg.transaction_timeout_ms};
  switch (tx.state) {
    case TxState::Trying:
      if (tx.retransmit_count >= cfg.max_retransmits || now >= deadline) {
        tx.state = TxState::Terminated;
        return {TimerAction::TimeoutIndication};
      }
      ++tx.retransmit_count;
      tx.next_fire = std::min(now + cfg.interval(tx.retransmit_count), deadline);
      return {TimerAction::Retransmit};
    case TxState::Proceeding:
      if (now >= deadline) {
        tx.state = TxState::Terminated;
        return {TimerAction::TimeoutIndication};
      }
      tx.next_fire = deadline;
      return {};
    default:
      return {};
  }
}

SipEndpoint::SipEndpoint(Runtime& runtime, NetAddress self, std::string name, TimerConfig timers)
    : runtime_(runtime), self_(std::move(self)), name_(std::move(name)), timers_(timers), ids_(name_) {
  timers_.validate();
}

const ClientTransaction* SipEndpoint::send_request(sip::SipMessage req, const NetAddress& dst,
                                                   Callbacks cb) {
  if (!req.is_request()) throw std::invalid_argument("send_request needs a request");
  if (req.vias.empty()) throw std::invalid_argument("request without Via");
  if (req.method == sip::Method::Ack || req.method == sip::Method::Notify) {
    runtime_.send(self_, dst, req);
    return nullptr;
  }
  const auto key = key_of(req);
  runtime_.send(self_, dst, req);

  ClientTransaction tx;
  tx.id = key;
  tx.request = std::move(req);
  tx.destination = dst;
  tx.started = runtime_.now();
  tx.on_response = std::move(cb.on_response);
  tx.on_timeout = std::move(cb.on_timeout);
  auto [it, inserted] = clients_.insert_or_assign(key, std::move(tx));
  arm(it->second, runtime_.now() + timers_.interval(0));
  return &it->second;
}

void SipEndpoint::arm(ClientTransaction& tx, Instant at) {
  if (tx.timer) runtime_.cancel(tx.timer);
  tx.next_fire = at;
  const auto key = tx.id;
  tx.timer = runtime_.schedule_at(at, [this, key] { fire(key); });
}

void SipEndpoint::fire(const TransactionKey& key) {
  const auto it = clients_.find(key);
  if (it == clients_.end()) return;
  auto& tx = it->second;
  tx.timer = 0;
  for (const auto action : on_timer(tx, runtime_.now(), timers_)) {
    if (action == TimerAction::Retransmit) {
      runtime_.send(self_, tx.destination, tx.request);
    } else {
      auto cb = tx.on_timeout;
      if (cb) cb();
      return;
    }
  }
  if (tx.state == TxState::Trying || tx.state == TxState::Proceeding) arm(tx, tx.next_fire);
}

void SipEndpoint::terminate(ClientTransaction& tx) {
  if (tx.timer) runtime_.cancel(tx.timer);
  tx.timer = 0;
  tx.state = TxState::Terminated;
}

SipEndpoint::MatchResult SipEndpoint::match_response(const sip::SipMessage& resp) {
  const auto it = clients_.find(key_of(resp));
  if (it == clients_.end()) return {MatchKind::Unmatched, nullptr};
  auto& tx = it->second;
  if (tx.state == TxState::Completed || tx.state == TxState::Terminated)
    return {MatchKind::Absorbed, &tx};

  if (sip::status_class(resp.status) == 1) {
    if (tx.state == TxState::Trying) {
      tx.state = TxState::Proceeding;
      arm(tx, tx.started + Duration{timers_.transaction_timeout_ms});
    }
    return {MatchKind::Matched, &tx};
  }
  // Final response: Completed, and with no Timer K/D in this model, straight to Terminated.
  tx.state = TxState::Completed;
  terminate(tx);
  return {MatchKind::Matched, &tx};
}

bool SipEndpoint::accept_request(const sip::SipMessage& req) {
  if (req.method == sip::Method::Ack) return true;
  const auto key = key_of(req);
  const auto it = servers_.find(key);
  if (it == servers_.end()) {
    servers_.emplace(key, ServerTransaction{key, std::nullopt});
    return true;
  }
  if (it->second.final_response) send_stateless(*it->second.final_response, it->second.final_response->vias.front().sent_by());
  return false;
}

void SipEndpoint::send_response(const sip::SipMessage& resp) {
  if (resp.vias.empty()) return;
  if (sip::code_of(resp.status) >= 200) {
    const auto it = servers_.find(key_of(resp));
    if (it != servers_.end() && !it->second.final_response) it->second.final_response = resp;
  }
  send_stateless(resp, resp.vias.front().sent_by());
}

void SipEndpoint::send_stateless(const sip::SipMessage& msg, const NetAddress& dst) {
  try {
    runtime_.send(self_, dst, msg);
  } catch (const UnknownDestination&) {
    // Responses toward an address outside the topology have nowhere to go.
    if (msg.is_request()) throw;
  }
}

bool SipEndpoint::all_terminated() const {
  return std::all_of(clients_.begin(), clients_.end(),
                     [](const auto& kv) { return kv.second.state == TxState::Terminated; });
}

std::size_t SipEndpoint::live_transactions() const {
  std::size_t n = 0;
  for (const auto& [k, tx] : clients_)
    if (tx.state != TxState::Terminated) ++n;
  for (const auto& [k, tx] : servers_)
    if (!tx.final_response) ++n;
  return n;
}

SipNode::SipNode(Runtime& runtime, NetAddress self, std::string name, TimerConfig timers)
    : runtime_(runtime), endpoint_(runtime, std::move(self), std::move(name), timers) {}

void SipNode::receive(const Payload& payload, const NetAddress& from) {
  if (const auto* cx = std::get_if<hss::CxMessage>(&payload)) {
    on_cx(*cx, from);
    return;
  }
  const auto& msg = std::get<sip::SipMessage>(payload);
  if (msg.is_request()) {
    if (endpoint_.accept_request(msg)) on_request(msg, from);
    return;
  }
  const auto match = endpoint_.match_response(msg);
  switch (match.kind) {
    case SipEndpoint::MatchKind::Matched: {
      auto cb = match.tx->on_response;
      if (cb) cb(msg);
      break;
    }
    case SipEndpoint::MatchKind::Absorbed:
      break;
    case SipEndpoint::MatchKind::Unmatched:
      on_stray_response(msg, from);
      break;
  }
}

void SipNode::respond(const sip::SipMessage& req, sip::StatusCode status, std::string body) {
  endpoint_.send_response(sip::make_response(req, status, std::move(body)));
}

void SipNode::transition(std::string_view from, std::string_view to, std::string_view cause) {
  runtime_.note_transition(name(), from, to, cause);
}

}  // namespace imstb::net
