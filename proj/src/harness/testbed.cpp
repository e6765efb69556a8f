#include "imstb/harness/testbed.hpp"

#include "imstb/util/sha256.hpp"

namespace imstb::harness {

net::NetAddress addr::student(int n) { return {"127.0.1." + std::to_string(n), 5060}; }

hss::SubscriberProfile exam_subscriber(const std::string& user, std::set<hss::Role> roles) {
  const auto impi = user + "@" + std::string(kDomain);
  std::vector<ims::TriggerRule> rules;
  if (roles.contains(hss::Role::Student))
    rules.push_back({1, {sip::Method::Message, {}, "exam", std::string(kDomain)}, addr::kAs});
  const auto salt = util::sha256_hex("salt:" + impi).substr(0, 32);
  return hss::make_profile(impi, {sip::SipUri::parse("sip:" + impi)}, "pass-" + user, std::move(roles),
                           std::move(rules), salt);
}

std::string group_xml(const std::string& group_uri, const std::vector<std::string>& member_users) {
  std::string xml = "<resource-lists xmlns=\"urn:ietf:params:xml:ns:resource-lists\">\n  <list uri=\"" +
                    group_uri + "\">\n";
  for (const auto& u : member_users)
    xml += "    <entry uri=\"sip:" + u + "@" + std::string(kDomain) + "\"/>\n";
  return xml + "  </list>\n</resource-lists>\n";
}

ImsTestbed::ImsTestbed(ImsConfig config, std::unique_ptr<net::Network> network)
    : config_(config),
      net_(network ? std::move(network) : std::make_unique<net::SimNetwork>(config.loss, config.latency)) {
  const auto& t = config_.timers;
  hss_node_ = std::make_unique<hss::HssNode>(*net_, addr::kHss, hss_);
  pcscf_ = std::make_unique<ims::Pcscf>(*net_, addr::kPcscf, addr::kIcscf,
                                        std::set<net::NetAddress>{addr::kScscf}, t);
  icscf_ = std::make_unique<ims::Icscf>(*net_, addr::kIcscf, addr::kHss,
                                        std::map<std::string, net::NetAddress>{{"scscf-1", addr::kScscf}}, t);
  ims::Scscf::Config sc;
  sc.hss = addr::kHss;
  sc.home_domain = std::string(kDomain);
  sc.xdms = addr::kXdms;
  sc.service_origins = {addr::kAs};
  scscf_ = std::make_unique<ims::Scscf>(*net_, addr::kScscf, sc, t);
  xdms_ = std::make_unique<xdms::XdmsNode>(*net_, addr::kXdms, docs_, t);
  as_ = std::make_unique<exam::ExamAsNode>(*net_, addr::kAs, exam::ExamAsNode::Config{addr::kScscf}, docs_,
                                           exam::hss_authenticator(hss_), t);
  as_->api().use_counter_tokens(true);

  net_->attach(addr::kHss, *hss_node_);
  net_->attach(addr::kPcscf, *pcscf_);
  net_->attach(addr::kIcscf, *icscf_);
  net_->attach(addr::kScscf, *scscf_);
  net_->attach(addr::kXdms, *xdms_);
  net_->attach(addr::kAs, *as_);
}

net::SimNetwork& ImsTestbed::net() {
  auto* sim = dynamic_cast<net::SimNetwork*>(net_.get());
  if (sim == nullptr) throw std::logic_error("testbed is not on a simulated network");
  return *sim;
}

ua::UserAgent& ImsTestbed::add_user(const std::string& user, const net::NetAddress& local,
                                    std::set<hss::Role> roles, std::optional<ua::Answers> auto_answer,
                                    ua::Channel channel) {
  hss_.provision(exam_subscriber(user, std::move(roles)));
  ua::UaConfig cfg;
  cfg.identity = sip::SipUri::parse("sip:" + user + "@" + std::string(kDomain));
  cfg.passkey = "pass-" + user;
  cfg.pcscf = addr::kPcscf;
  cfg.local = local;
  cfg.auto_answer = std::move(auto_answer);
  cfg.auto_channel = channel;
  auto node = std::make_unique<ua::UserAgent>(*net_, cfg, user, config_.timers);
  auto& ref = *node;
  ref.set_http([this](const util::HttpRequest& req) { return as_->http(req); });
  net_->attach(local, ref);
  uas_.insert_or_assign(user, std::move(node));
  return ref;
}

ua::UserAgent& ImsTestbed::add_student(int n, std::optional<ua::Answers> auto_answer, ua::Channel channel) {
  return add_user("s" + std::to_string(n), addr::student(n), {hss::Role::Student}, std::move(auto_answer),
                  channel);
}

ua::UserAgent& ImsTestbed::add_teacher() { return add_user("teacher", addr::kTeacher, {hss::Role::Teacher}); }

ua::UserAgent& ImsTestbed::ua(const std::string& user) {
  const auto it = uas_.find(user);
  if (it == uas_.end()) throw std::out_of_range("no user agent for " + user);
  return *it->second;
}

void ImsTestbed::put_group(const std::string& group_uri, const std::vector<std::string>& member_users) {
  const auto name = sip::SipUri::parse(group_uri).user.value_or("groups");
  docs_.put_document({std::string(xdms::kResourceLists), "teacher@" + std::string(kDomain), name,
                      "application/resource-lists+xml", group_xml(group_uri, member_users), {}},
                     std::nullopt);
}

std::map<net::NetAddress, std::string> ImsTestbed::roles() const {
  std::map<net::NetAddress, std::string> out{{addr::kPcscf, "P-CSCF"}, {addr::kIcscf, "I-CSCF"},
                                             {addr::kScscf, "S-CSCF"}, {addr::kHss, "HSS"},
                                             {addr::kXdms, "XDMS"},    {addr::kAs, "AS"}};
  for (const auto& [user, ua] : uas_) out[ua->address()] = user;
  return out;
}

}  // namespace imstb::harness
