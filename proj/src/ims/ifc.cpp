#include "imstb/ims/ifc.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "imstb/util/text.hpp"

namespace imstb::ims {

bool TriggerCondition::matches(const sip::SipMessage& request) const {
  if (!request.is_request()) return false;
  if (method && *method != request.method) return false;
  if (event) {
    if (!request.event) return false;
    // Compare the event package name, ignoring parameters such as ;id=.
    const auto package = util::trim(std::string_view(*request.event).substr(0, request.event->find(';')));
    if (!util::iequals(package, *event)) return false;
  }
  if (ruri_user && request.request_uri.user != *ruri_user) return false;
  if (ruri_domain && !util::iequals(request.request_uri.host, *ruri_domain)) return false;
  return true;
}

std::vector<net::NetAddress> evaluate_ifc(std::span<const TriggerRule> rules,
                                          const sip::SipMessage& request) {
  std::vector<std::size_t> order(rules.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return rules[a].priority < rules[b].priority;
  });
  for (const auto i : order)
    if (rules[i].condition.matches(request)) return {rules[i].target};
  return {};
}

void to_json(nlohmann::json& j, const TriggerRule& rule) {
  j = nlohmann::json{{"priority", rule.priority}, {"target", rule.target.to_string()}};
  const auto& c = rule.condition;
  if (c.method) j["method"] = std::string(sip::to_string(*c.method));
  if (c.event) j["event"] = *c.event;
  if (c.ruri_user) j["ruri_user"] = *c.ruri_user;
  if (c.ruri_domain) j["ruri_domain"] = *c.ruri_domain;
}

void from_json(const nlohmann::json& j, TriggerRule& rule) {
  rule.priority = j.at("priority").get<int>();
  const auto target = net::NetAddress::parse(j.at("target").get<std::string>());
  if (!target) throw std::invalid_argument("bad trigger target");
  rule.target = *target;
  rule.condition = {};
  if (j.contains("method")) {
    const auto m = sip::method_from_string(j["method"].get<std::string>());
    if (!m) throw std::invalid_argument("bad trigger method");
    rule.condition.method = *m;
  }
  if (j.contains("event")) rule.condition.event = j["event"].get<std::string>();
  if (j.contains("ruri_user")) rule.condition.ruri_user = j["ruri_user"].get<std::string>();
  if (j.contains("ruri_domain")) rule.condition.ruri_domain = j["ruri_domain"].get<std::string>();
}

}  // namespace imstb::ims
