#include <gtest/gtest.h>

#include <algorithm>

#include "imstb/net/endpoint.hpp"
#include "imstb/net/sim_network.hpp"
#include "imstb/sip/builders.hpp"

using namespace imstb;
using namespace std::chrono_literals;
using net::Duration;
using net::Instant;
using net::NetAddress;
using net::SimNetwork;

namespace {

const NetAddress kUa{"10.0.0.9", 5060};
const NetAddress kPeer{"10.0.0.1", 5060};

// Node that records requests and optionally answers them.
class Peer : public net::SipNode {
 public:
  using SipNode::SipNode;
  std::vector<sip::SipMessage> requests;
  std::vector<sip::StatusCode> answers;  // replied in order to each new request

  void reply(const sip::SipMessage& req, sip::StatusCode s) { respond(req, s); }

 protected:
  void on_request(const sip::SipMessage& req, const NetAddress&) override {
    requests.push_back(req);
    for (auto s : answers) respond(req, s);
  }
};

class Client : public net::SipNode {
 public:
  using SipNode::SipNode;
  std::vector<sip::SipMessage> responses;
  int timeouts = 0;

  void send(sip::Method m, const NetAddress& dst) {
    const auto uri = sip::SipUri::parse("sip:s1@ims.kau.test");
    ++n_;
    auto req = sip::make_request(m, uri, uri, uri, "call-" + std::to_string(n_), n_, address(),
                                 endpoint().ids());
    endpoint().send_request(req, dst,
                            {[this](const sip::SipMessage& r) { responses.push_back(r); },
                             [this] { ++timeouts; }});
  }

 protected:
  void on_request(const sip::SipMessage&, const NetAddress&) override {}
  std::uint32_t n_ = 0;
};

std::vector<Instant> send_times(const SimNetwork& net, const NetAddress& src) {
  std::vector<Instant> out;
  for (const auto& ev : net.wire_events())
    if (ev.src == src && ev.sip() && ev.sip()->is_request()) out.push_back(ev.time - Duration{10});
  return out;
}

}  // namespace

TEST(TimerConfigTest, IntervalsMatchCappedDoubling) {
  const net::TimerConfig cfg;
  for (int k = 0; k <= 8; ++k) {
    const std::int64_t oracle = std::min<std::int64_t>(500LL << k, 4000);
    EXPECT_EQ(cfg.interval(k).count(), oracle) << k;
  }
  EXPECT_THROW((net::TimerConfig{0, 4000, 5, 32000}.validate()), std::invalid_argument);
  EXPECT_THROW((net::TimerConfig{500, 400, 5, 32000}.validate()), std::invalid_argument);
  EXPECT_THROW((net::TimerConfig{500, 4000, -1, 32000}.validate()), std::invalid_argument);
}

TEST(OnTimerTest, FirstFiringDoublesInterval) {
  net::ClientTransaction tx;
  const net::TimerConfig cfg;
  const auto actions = net::on_timer(tx, Instant{500}, cfg);
  ASSERT_EQ(actions.size(), 1u);
  EXPECT_EQ(actions[0], net::TimerAction::Retransmit);
  EXPECT_EQ(tx.retransmit_count, 1);
  EXPECT_EQ(tx.next_fire, Instant{1500});
}

TEST(OnTimerTest, ExhaustedCountTimesOut) {
  net::ClientTransaction tx;
  tx.retransmit_count = 5;
  const auto actions = net::on_timer(tx, Instant{11500}, net::TimerConfig{});
  ASSERT_EQ(actions.size(), 1u);
  EXPECT_EQ(actions[0], net::TimerAction::TimeoutIndication);
  EXPECT_EQ(tx.state, net::TxState::Terminated);
}

TEST(OnTimerTest, ProceedingOnlyTimesOutAtDeadline) {
  net::ClientTransaction tx;
  tx.state = net::TxState::Proceeding;
  EXPECT_TRUE(net::on_timer(tx, Instant{1000}, net::TimerConfig{}).empty());
  EXPECT_EQ(tx.next_fire, Instant{32000});
  EXPECT_EQ(net::on_timer(tx, Instant{32000}, net::TimerConfig{}).size(), 1u);
  EXPECT_EQ(tx.state, net::TxState::Terminated);
}

TEST(SipEndpointTest, RegisterStartsInTryingWithOneWireEvent) {
  SimNetwork net;
  Client ua(net, kUa, "ua");
  Peer peer(net, kPeer, "peer");
  net.attach(kUa, ua);
  net.attach(kPeer, peer);
  ua.send(sip::Method::Register, kPeer);
  ASSERT_EQ(ua.endpoint().client_transactions().size(), 1u);
  const auto& tx = ua.endpoint().client_transactions().begin()->second;
  EXPECT_EQ(tx.state, net::TxState::Trying);
  EXPECT_EQ(tx.next_fire, Instant{500});
  EXPECT_EQ(net.transport_step(Instant{10}).size(), 1u);
}

TEST(SipEndpointTest, AckAndNotifyCreateNoTransaction) {
  SimNetwork net;
  Client ua(net, kUa, "ua");
  Peer peer(net, kPeer, "peer");
  net.attach(kUa, ua);
  net.attach(kPeer, peer);
  ua.send(sip::Method::Ack, kPeer);
  ua.send(sip::Method::Notify, kPeer);
  EXPECT_TRUE(ua.endpoint().client_transactions().empty());
  EXPECT_TRUE(net.run_until_quiescent(Instant{60000}));
  EXPECT_EQ(peer.requests.size(), 2u);
}

TEST(SipEndpointTest, UnknownDestinationThrows) {
  SimNetwork net;
  Client ua(net, kUa, "ua");
  net.attach(kUa, ua);
  EXPECT_THROW(ua.send(sip::Method::Register, {"192.0.2.77", 5060}), net::UnknownDestination);
}

TEST(SipEndpointTest, RetransmissionScheduleAndTimeout) {
  SimNetwork net;
  Client ua(net, kUa, "ua");
  Peer peer(net, kPeer, "peer");
  net.attach(kUa, ua);
  net.attach(kPeer, peer);
  net.set_down(kPeer, true);
  ua.send(sip::Method::Register, kPeer);
  EXPECT_TRUE(net.run_until_quiescent(Instant{60000}));

  const auto sends = send_times(net, kUa);
  ASSERT_EQ(sends.size(), 6u);
  std::vector<std::int64_t> gaps;
  for (std::size_t i = 1; i < sends.size(); ++i) gaps.push_back((sends[i] - sends[i - 1]).count());
  EXPECT_EQ(gaps, (std::vector<std::int64_t>{500, 1000, 2000, 4000, 4000}));
  EXPECT_EQ(ua.timeouts, 1);
  EXPECT_EQ(net.now(), Instant{15500});
  EXPECT_TRUE(ua.endpoint().all_terminated());
}

TEST(SipEndpointTest, DuplicateFinalIsAbsorbed) {
  SimNetwork net;
  Client ua(net, kUa, "ua");
  Peer peer(net, kPeer, "peer");
  net.attach(kUa, ua);
  net.attach(kPeer, peer);
  peer.answers = {sip::StatusCode::Ok};
  ua.send(sip::Method::Register, kPeer);
  net.run_until_quiescent(Instant{60000});
  ASSERT_EQ(ua.responses.size(), 1u);
  // Same 200 again on the wire: matched to a Terminated transaction.
  const auto again = ua.responses[0];
  net.send(kPeer, kUa, again);
  net.run_until_quiescent(Instant{60000});
  EXPECT_EQ(ua.responses.size(), 1u);
  EXPECT_TRUE(ua.endpoint().all_terminated());
}

TEST(SipEndpointTest, ProvisionalStopsRetransmission) {
  SimNetwork net;
  Client ua(net, kUa, "ua");
  Peer peer(net, kPeer, "peer");
  net.attach(kUa, ua);
  net.attach(kPeer, peer);
  peer.answers = {sip::StatusCode::Trying};
  ua.send(sip::Method::Invite, kPeer);
  net.transport_step(Instant{100});
  EXPECT_EQ(ua.endpoint().client_transactions().begin()->second.state, net::TxState::Proceeding);
  net.transport_step(Instant{20000});
  EXPECT_EQ(send_times(net, kUa).size(), 1u);
  peer.reply(peer.requests.at(0), sip::StatusCode::Ok);
  net.run_until_quiescent(Instant{60000});
  ASSERT_EQ(ua.responses.size(), 2u);
  EXPECT_EQ(ua.responses[1].status, sip::StatusCode::Ok);
  EXPECT_TRUE(ua.endpoint().all_terminated());
}

TEST(SipEndpointTest, RequestRetransmissionReplaysFinal) {
  SimNetwork net;
  Client ua(net, kUa, "ua");
  Peer peer(net, kPeer, "peer");
  net.attach(kUa, ua);
  net.attach(kPeer, peer);
  peer.answers = {sip::StatusCode::Ok};
  // Drop everything the peer sends back until the UA has retransmitted once.
  net.set_down(kUa, true);
  ua.send(sip::Method::Message, kPeer);
  net.transport_step(Instant{400});
  net.set_down(kUa, false);
  net.run_until_quiescent(Instant{60000});
  EXPECT_EQ(peer.requests.size(), 1u);
  EXPECT_EQ(ua.responses.size(), 1u);
}

TEST(SimNetworkTest, LosslessDeliversEverythingOnce) {
  SimNetwork net;
  Client ua(net, kUa, "ua");
  Peer peer(net, kPeer, "peer");
  net.attach(kUa, ua);
  net.attach(kPeer, peer);
  for (int i = 0; i < 20; ++i) ua.send(sip::Method::Ack, kPeer);
  net.run_until_quiescent(Instant{1000});
  EXPECT_EQ(peer.requests.size(), 20u);
  for (const auto& ev : net.wire_events()) EXPECT_EQ(ev.disposition, net::Disposition::Delivered);
}

TEST(SimNetworkTest, TotalLossDropsEverything) {
  SimNetwork net(net::LossConfig{1.0, 7});
  Client ua(net, kUa, "ua");
  Peer peer(net, kPeer, "peer");
  net.attach(kUa, ua);
  net.attach(kPeer, peer);
  ua.send(sip::Method::Register, kPeer);
  net.run_until_quiescent(Instant{60000});
  EXPECT_TRUE(peer.requests.empty());
  ASSERT_FALSE(net.wire_events().empty());
  for (const auto& ev : net.wire_events()) EXPECT_EQ(ev.disposition, net::Disposition::Dropped);
}

TEST(SimNetworkTest, SameSeedSameEvents) {
  auto run = [](std::uint64_t seed) {
    SimNetwork net(net::LossConfig{0.3, seed});
    Client ua(net, kUa, "ua");
    Peer peer(net, kPeer, "peer");
    net.attach(kUa, ua);
    net.attach(kPeer, peer);
    peer.answers = {sip::StatusCode::Ok};
    for (int i = 0; i < 10; ++i) ua.send(sip::Method::Message, kPeer);
    net.run_until_quiescent(Instant{60000});
    std::vector<std::string> out;
    for (const auto& ev : net.wire_events())
      out.push_back(std::to_string(ev.seq) + "@" + std::to_string(ev.time.count()) + " " +
                    sip::serialize_message(*ev.sip()) +
                    (ev.disposition == net::Disposition::Dropped ? "x" : ""));
    return out;
  };
  EXPECT_EQ(run(11), run(11));
  EXPECT_NE(run(11), run(12));
}

// Property: seq strictly increasing and time non-decreasing, whatever the latencies.
TEST(SimNetworkTest, VirtualTimeIsMonotone) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SimNetwork net(net::LossConfig{0.25, seed});
    Client ua(net, kUa, "ua");
    Peer peer(net, kPeer, "peer");
    net.attach(kUa, ua);
    net.attach(kPeer, peer);
    net.set_latency(kUa, kPeer, Duration{static_cast<std::int64_t>(1 + seed * 7 % 50)});
    peer.answers = {sip::StatusCode::Ok};
    for (int i = 0; i < 5; ++i) ua.send(sip::Method::Message, kPeer);
    ASSERT_TRUE(net.run_until_quiescent(Instant{60000}));
    const auto& evs = net.wire_events();
    for (std::size_t i = 1; i < evs.size(); ++i) {
      EXPECT_LT(evs[i - 1].seq, evs[i].seq);
      EXPECT_LE(evs[i - 1].time, evs[i].time);
    }
    EXPECT_TRUE(ua.endpoint().all_terminated());
    EXPECT_EQ(net.pending_timers(), 0u);
  }
}
