#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "imstb/net/runtime.hpp"
#include "imstb/sip/builders.hpp"
#include "imstb/sip/message.hpp"

namespace imstb::net {

struct TimerConfig {
  std::int64_t t1_ms = 500;
  std::int64_t t2_ms = 4000;
  int max_retransmits = 5;
  std::int64_t transaction_timeout_ms = 32000;

  /// Throws std::invalid_argument when t1 < 1, t2 < t1 or max_retransmits < 0.
  void validate() const;
  /// Interval before retransmission number k+1: min(t1 * 2^k, t2).
  Duration interval(int k) const;
};

enum class TxState { Trying, Proceeding, Completed, Terminated };
std::string_view to_string(TxState s);

struct TransactionKey {
  std::string branch;
  sip::Method method = sip::Method::Register;
  auto operator<=>(const TransactionKey&) const = default;
};

TransactionKey key_of(const sip::SipMessage& msg);

struct ClientTransaction {
  TransactionKey id;
  sip::SipMessage request;
  NetAddress destination;
  TxState state = TxState::Trying;
  int retransmit_count = 0;
  Instant started{0};
  Instant next_fire{0};
  Runtime::TimerId timer = 0;
  std::function<void(const sip::SipMessage&)> on_response;
  std::function<void()> on_timeout;
};

enum class TimerAction { Retransmit, TimeoutIndication };

/// Advances a Trying/Proceeding transaction whose timer fired at `now`.
/// Trying: retransmit with doubled interval capped at t2, or time out once
/// max_retransmits or the transaction timeout is exhausted. Proceeding: time
/// out only.
std::vector<TimerAction> on_timer(ClientTransaction& tx, Instant now, const TimerConfig& cfg);

struct ServerTransaction {
  TransactionKey id;
  std::optional<sip::SipMessage> final_response;
};

/// Per-node transaction layer: client transactions with retransmission, server
/// transactions that absorb request retransmissions and replay final
/// responses, and de-duplication of final responses.
class SipEndpoint {
 public:
  struct Callbacks {
    std::function<void(const sip::SipMessage&)> on_response;
    std::function<void()> on_timeout;
  };

  enum class MatchKind { Matched, Absorbed, Unmatched };
  struct MatchResult {
    MatchKind kind = MatchKind::Unmatched;
    ClientTransaction* tx = nullptr;
  };

  SipEndpoint(Runtime& runtime, NetAddress self, std::string name, TimerConfig timers = {});
  SipEndpoint(const SipEndpoint&) = delete;
  SipEndpoint& operator=(const SipEndpoint&) = delete;

  const NetAddress& address() const { return self_; }
  const std::string& name() const { return name_; }
  sip::IdGenerator& ids() { return ids_; }
  Runtime& runtime() { return runtime_; }
  const TimerConfig& timers() const { return timers_; }

  /// Sends `req` (whose top Via must be this node's) to `dst`. ACK and NOTIFY
  /// are sent fire-and-forget and return nullptr. Throws UnknownDestination.
  const ClientTransaction* send_request(sip::SipMessage req, const NetAddress& dst, Callbacks cb = {});

  /// Sends a response to the sent-by address of its top Via, remembering
  /// final responses for replay on request retransmission.
  void send_response(const sip::SipMessage& resp);

  /// Raw send without transaction state (stateless forwarding).
  void send_stateless(const sip::SipMessage& msg, const NetAddress& dst);

  /// Classifies an inbound response and drives the matched transaction.
  MatchResult match_response(const sip::SipMessage& resp);

  /// Returns true if `req` starts a new server transaction; retransmissions are
  /// absorbed (replaying any final response) and return false.
  bool accept_request(const sip::SipMessage& req);

  const std::map<TransactionKey, ClientTransaction>& client_transactions() const { return clients_; }
  const std::map<TransactionKey, ServerTransaction>& server_transactions() const { return servers_; }
  bool all_terminated() const;
  std::size_t live_transactions() const;

 private:
  void arm(ClientTransaction& tx, Instant at);
  void fire(const TransactionKey& key);
  void terminate(ClientTransaction& tx);

  Runtime& runtime_;
  NetAddress self_;
  std::string name_;
  TimerConfig timers_;
  sip::IdGenerator ids_;
  std::map<TransactionKey, ClientTransaction> clients_;
  std::map<TransactionKey, ServerTransaction> servers_;
};

/// Base for every SIP-speaking node: dispatches inbound payloads through the
/// transaction layer to the virtual hooks.
class SipNode : public Node {
 public:
  SipNode(Runtime& runtime, NetAddress self, std::string name, TimerConfig timers = {});

  void receive(const Payload& payload, const NetAddress& from) final;

  SipEndpoint& endpoint() { return endpoint_; }
  const SipEndpoint& endpoint() const { return endpoint_; }
  const NetAddress& address() const { return endpoint_.address(); }
  const std::string& name() const { return endpoint_.name(); }

 protected:
  virtual void on_request(const sip::SipMessage& req, const NetAddress& from) = 0;
  virtual void on_stray_response(const sip::SipMessage& /*resp*/, const NetAddress& /*from*/) {}
  virtual void on_cx(const hss::CxMessage& /*msg*/, const NetAddress& /*from*/) {}

  void respond(const sip::SipMessage& req, sip::StatusCode status, std::string body = {});
  Runtime& runtime() { return runtime_; }
  Instant now() const { return runtime_.now(); }
  void transition(std::string_view from, std::string_view to, std::string_view cause);

 private:
  Runtime& runtime_;
  SipEndpoint endpoint_;
};

}  // namespace imstb::net
