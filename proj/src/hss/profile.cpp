#include "imstb/hss/profile.hpp"

#include <stdexcept>

#include "imstb/util/sha256.hpp"
#include "imstb/util/text.hpp"

namespace imstb::hss {

std::string_view to_string(RegistrationState s) {
  return s == RegistrationState::Registered ? "Registered" : "Unregistered";
}

std::string_view to_string(Role r) { return r == Role::Teacher ? "teacher" : "student"; }

bool SubscriberProfile::has_impu(std::string_view aor) const {
  for (const auto& u : impus)
    if (u.aor() == aor) return true;
  return false;
}

bool SubscriberProfile::same_provisioning(const SubscriberProfile& other) const {
  return impi == other.impi && impus == other.impus && salt == other.salt &&
         passkey_hash == other.passkey_hash && trigger_rules == other.trigger_rules &&
         roles == other.roles;
}

std::string hash_passkey(std::string_view salt_hex, std::string_view passkey) {
  const auto salt = util::from_hex(salt_hex);
  if (!salt) throw std::invalid_argument("salt is not hex");
  return util::sha256_hex(*salt + std::string(passkey));
}

SubscriberProfile make_profile(std::string impi, std::vector<sip::SipUri> impus,
                               std::string_view passkey, std::set<Role> roles,
                               std::vector<ims::TriggerRule> rules, std::string salt_hex) {
  SubscriberProfile p;
  p.impi = std::move(impi);
  p.impus = std::move(impus);
  p.passkey_hash = hash_passkey(salt_hex, passkey);
  p.salt = std::move(salt_hex);
  p.roles = std::move(roles);
  p.trigger_rules = std::move(rules);
  return p;
}

namespace {

nlohmann::json roles_json(const std::set<Role>& roles) {
  auto arr = nlohmann::json::array();
  for (auto r : roles) arr.push_back(std::string(to_string(r)));
  return arr;
}

nlohmann::json impus_json(const std::vector<sip::SipUri>& impus) {
  auto arr = nlohmann::json::array();
  for (const auto& u : impus) arr.push_back(u.to_string());
  return arr;
}

}  // namespace

void to_json(nlohmann::json& j, const SubscriberProfile& p) {
  j = public_profile_json(p);
  j["salt"] = p.salt;
  j["passkey_hash"] = p.passkey_hash;
}

nlohmann::json public_profile_json(const SubscriberProfile& p) {
  nlohmann::json j{
      {"impi", p.impi},
      {"impus", impus_json(p.impus)},
      {"registration_state", std::string(to_string(p.registration_state))},
      {"assigned_scscf", p.assigned_scscf ? nlohmann::json(*p.assigned_scscf) : nlohmann::json()},
      {"trigger_rules", p.trigger_rules},
      {"roles", roles_json(p.roles)},
  };
  return j;
}

void from_json(const nlohmann::json& j, SubscriberProfile& p) {
  p = {};
  p.impi = j.at("impi").get<std::string>();
  for (const auto& u : j.at("impus")) p.impus.push_back(sip::SipUri::parse(u.get<std::string>()));
  p.salt = j.value("salt", std::string());
  p.passkey_hash = j.value("passkey_hash", std::string());
  const auto state = j.value("registration_state", std::string("Unregistered"));
  if (state == "Registered") p.registration_state = RegistrationState::Registered;
  else if (state == "Unregistered") p.registration_state = RegistrationState::Unregistered;
  else throw std::invalid_argument("bad registration_state");
  if (j.contains("assigned_scscf") && !j["assigned_scscf"].is_null())
    p.assigned_scscf = j["assigned_scscf"].get<std::string>();
  if (j.contains("trigger_rules"))
    p.trigger_rules = j["trigger_rules"].get<std::vector<ims::TriggerRule>>();
  if (j.contains("roles")) {
    for (const auto& r : j["roles"]) {
      const auto name = r.get<std::string>();
      if (name == "teacher") p.roles.insert(Role::Teacher);
      else if (name == "student") p.roles.insert(Role::Student);
      else throw std::invalid_argument("unknown role " + name);
    }
  }
}

}  // namespace imstb::hss
