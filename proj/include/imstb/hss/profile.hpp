#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "imstb/ims/ifc.hpp"
#include "imstb/sip/uri.hpp"

namespace imstb::hss {

enum class RegistrationState { Unregistered, Registered };
enum class Role { Student, Teacher };

std::string_view to_string(RegistrationState s);
std::string_view to_string(Role r);

/// HSS record. The passkey is kept only as a salted SHA-256 digest.
struct SubscriberProfile {
  std::string impi;
  std::vector<sip::SipUri> impus;
  std::string salt;          // hex
  std::string passkey_hash;  // hex sha256(salt || passkey)
  RegistrationState registration_state = RegistrationState::Unregistered;
  std::optional<std::string> assigned_scscf;
  std::vector<ims::TriggerRule> trigger_rules;
  std::set<Role> roles;

  bool operator==(const SubscriberProfile&) const = default;

  bool has_role(Role r) const { return roles.contains(r); }
  bool has_impu(std::string_view aor) const;
  /// Same identity, credential, services and roles; registration state ignored.
  bool same_provisioning(const SubscriberProfile& other) const;
};

std::string hash_passkey(std::string_view salt_hex, std::string_view passkey);

SubscriberProfile make_profile(std::string impi, std::vector<sip::SipUri> impus,
                               std::string_view passkey, std::set<Role> roles,
                               std::vector<ims::TriggerRule> rules, std::string salt_hex);

void to_json(nlohmann::json& j, const SubscriberProfile& p);
void from_json(const nlohmann::json& j, SubscriberProfile& p);

/// Profile as carried in a Server-Assignment-Answer: no credential material.
nlohmann::json public_profile_json(const SubscriberProfile& p);

}  // namespace imstb::hss
