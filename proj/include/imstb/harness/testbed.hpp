#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "imstb/exam/as_node.hpp"
#include "imstb/hss/store.hpp"
#include "imstb/ims/cscf.hpp"
#include "imstb/net/sim_network.hpp"
#include "imstb/ua/user_agent.hpp"
#include "imstb/xdms/xdms_node.hpp"

namespace imstb::harness {

inline constexpr std::string_view kDomain = "ims.kau.test";

namespace addr {
inline const net::NetAddress kPcscf{"127.0.0.2", 5060};
inline const net::NetAddress kIcscf{"127.0.0.3", 5060};
inline const net::NetAddress kScscf{"127.0.0.4", 5060};
inline const net::NetAddress kHss{"127.0.0.5", 3868};
inline const net::NetAddress kXdms{"127.0.0.6", 5060};
inline const net::NetAddress kAs{"127.0.0.7", 5060};
inline const net::NetAddress kTeacher{"127.0.1.100", 5060};
/// Students: 127.0.1.N.
net::NetAddress student(int n);
}  // namespace addr

/// Subscriber with passkey "pass-<user>", a salt derived from the identity and
/// an iFC sending MESSAGEs for sip:exam@ims.kau.test to the AS.
hss::SubscriberProfile exam_subscriber(const std::string& user, std::set<hss::Role> roles);

/// resource-lists document for one group.
std::string group_xml(const std::string& group_uri, const std::vector<std::string>& member_users);

struct ImsConfig {
  net::LossConfig loss{};
  net::Duration latency{10};
  net::TimerConfig timers{};
};

/// The full IMS topology: P-, I- and S-CSCF, HSS, XDMS and the exam AS, plus
/// any number of user agents. Runs on a simulated network unless given another.
class ImsTestbed {
 public:
  explicit ImsTestbed(ImsConfig config = {}, std::unique_ptr<net::Network> network = nullptr);
  ImsTestbed(const ImsTestbed&) = delete;
  ImsTestbed& operator=(const ImsTestbed&) = delete;

  net::Network& network() { return *net_; }
  /// Throws std::logic_error on a live network.
  net::SimNetwork& net();
  hss::HssStore& hss() { return hss_; }
  xdms::XdmStore& documents() { return docs_; }
  ims::Pcscf& pcscf() { return *pcscf_; }
  ims::Icscf& icscf() { return *icscf_; }
  ims::Scscf& scscf() { return *scscf_; }
  xdms::XdmsNode& xdms() { return *xdms_; }
  exam::ExamAsNode& as() { return *as_; }

  /// Provisions `user` in the HSS (idempotent) and attaches a UA for it. The
  /// UA's HTTP calls go straight to the AS API.
  ua::UserAgent& add_user(const std::string& user, const net::NetAddress& local, std::set<hss::Role> roles,
                          std::optional<ua::Answers> auto_answer = std::nullopt,
                          ua::Channel channel = ua::Channel::Sip);
  ua::UserAgent& add_student(int n, std::optional<ua::Answers> auto_answer = std::nullopt,
                             ua::Channel channel = ua::Channel::Sip);
  ua::UserAgent& add_teacher();
  ua::UserAgent& ua(const std::string& user);
  bool has_ua(const std::string& user) const { return uas_.contains(user); }
  const std::map<std::string, std::unique_ptr<ua::UserAgent>>& uas() const { return uas_; }

  /// Stores a group list owned by the teacher.
  void put_group(const std::string& group_uri, const std::vector<std::string>& member_users);

  /// Address -> role label for ladders and flow patterns.
  std::map<net::NetAddress, std::string> roles() const;

  /// Runs until quiescent or `t_max`; returns true on quiescence.
  bool settle(net::Instant t_max = net::Instant{600'000}) { return net_->run_until_quiescent(t_max); }

 private:
  ImsConfig config_;
  std::unique_ptr<net::Network> net_;
  hss::HssStore hss_;
  xdms::XdmStore docs_;
  std::unique_ptr<hss::HssNode> hss_node_;
  std::unique_ptr<ims::Pcscf> pcscf_;
  std::unique_ptr<ims::Icscf> icscf_;
  std::unique_ptr<ims::Scscf> scscf_;
  std::unique_ptr<xdms::XdmsNode> xdms_;
  std::unique_ptr<exam::ExamAsNode> as_;
  std::map<std::string, std::unique_ptr<ua::UserAgent>> uas_;
};

}  // namespace imstb::harness
