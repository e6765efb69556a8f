#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "imstb/net/address.hpp"
#include "imstb/sip/message.hpp"

namespace imstb::ims {

/// Conjunction of optional constraints; an absent field matches anything.
struct TriggerCondition {
  std::optional<sip::Method> method;
  std::optional<std::string> event;
  std::optional<std::string> ruri_user;
  std::optional<std::string> ruri_domain;

  bool operator==(const TriggerCondition&) const = default;
  bool matches(const sip::SipMessage& request) const;
};

/// One initial filter criterion from a subscriber's service profile.
struct TriggerRule {
  int priority = 0;
  TriggerCondition condition;
  net::NetAddress target;

  bool operator==(const TriggerRule&) const = default;
};

/// Rules sorted by ascending priority, ties by position in `rules`; returns the
/// first matching target only (a request takes at most one AS hop).
std::vector<net::NetAddress> evaluate_ifc(std::span<const TriggerRule> rules,
                                          const sip::SipMessage& request);

void to_json(nlohmann::json& j, const TriggerRule& rule);
void from_json(const nlohmann::json& j, TriggerRule& rule);

}  // namespace imstb::ims
