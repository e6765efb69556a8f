#include "imstb/hss/store.hpp"

#include <fstream>
#include <sstream>

#include <openssl/crypto.h>

#include "imstb/util/sha256.hpp"

namespace imstb::hss {

void HssStore::provision(SubscriberProfile profile) {
  if (profile.impus.empty()) throw std::invalid_argument("profile without public identities");
  if (profile.impi.empty()) throw std::invalid_argument("profile without private identity");
  if (profile.registration_state == RegistrationState::Registered && !profile.assigned_scscf)
    throw std::invalid_argument("registered profile without S-CSCF");

  if (const auto it = profiles_.find(profile.impi); it != profiles_.end()) {
    if (it->second.same_provisioning(profile)) return;
    throw DuplicateIdentity(profile.impi);
  }
  for (const auto& u : profile.impus)
    if (impu_index_.contains(u.aor())) throw DuplicateIdentity(u.aor());
  std::set<std::string> own;
  for (const auto& u : profile.impus)
    if (!own.insert(u.aor()).second) throw DuplicateIdentity(u.aor());

  for (const auto& u : profile.impus) impu_index_[u.aor()] = profile.impi;
  const auto impi = profile.impi;
  profiles_.emplace(impi, std::move(profile));
  mutated();
}

const SubscriberProfile* HssStore::find_impu(std::string_view aor) const {
  const auto it = impu_index_.find(std::string(aor));
  return it == impu_index_.end() ? nullptr : &profiles_.at(it->second);
}

SubscriberProfile* HssStore::find_impu_mut(std::string_view aor) {
  const auto it = impu_index_.find(std::string(aor));
  return it == impu_index_.end() ? nullptr : &profiles_.at(it->second);
}

const SubscriberProfile* HssStore::find_impi(std::string_view impi) const {
  const auto it = profiles_.find(std::string(impi));
  return it == profiles_.end() ? nullptr : &it->second;
}

bool HssStore::verify_passkey(std::string_view aor, std::string_view passkey) const {
  const auto* p = find_impu(aor);
  if (!p) return false;
  std::string offered;
  try {
    offered = hash_passkey(p->salt, passkey);
  } catch (const std::invalid_argument&) {
    return false;
  }
  return offered.size() == p->passkey_hash.size() &&
         CRYPTO_memcmp(offered.data(), p->passkey_hash.data(), offered.size()) == 0;
}

CxMessage HssStore::handle_uar(const CxMessage& req) const {
  const auto* p = find_impu(req.impu);
  if (!p) return req.answer(CxResult::UserUnknown);
  auto ans = req.answer(CxResult::Success);
  ans.scscf_name = p->assigned_scscf.value_or(default_scscf_);
  return ans;
}

CxMessage HssStore::handle_sar(const CxMessage& req) {
  auto* p = find_impu_mut(req.impu);
  if (!p) return req.answer(CxResult::UserUnknown);
  const auto assignment = req.assignment.value_or(Assignment::Register);

  if (assignment == Assignment::Register) {
    if (!req.passkey_offer || !verify_passkey(req.impu, *req.passkey_offer) || !req.scscf_name)
      return req.answer(CxResult::AuthRejected);
    p->registration_state = RegistrationState::Registered;
    p->assigned_scscf = req.scscf_name;
  } else {
    if (req.passkey_offer && !verify_passkey(req.impu, *req.passkey_offer))
      return req.answer(CxResult::AuthRejected);
    p->registration_state = RegistrationState::Unregistered;
    p->assigned_scscf.reset();
  }
  mutated();
  auto ans = req.answer(CxResult::Success);
  ans.profile = public_profile_json(*p);
  return ans;
}

CxMessage HssStore::handle_lir(const CxMessage& req) const {
  const auto* p = find_impu(req.impu);
  if (!p || p->registration_state != RegistrationState::Registered)
    return req.answer(CxResult::UserUnknown);
  auto ans = req.answer(CxResult::Success);
  ans.scscf_name = p->assigned_scscf;
  return ans;
}

CxMessage HssStore::handle(const CxMessage& req) {
  switch (req.op) {
    case CxOp::UAR: return handle_uar(req);
    case CxOp::SAR: return handle_sar(req);
    case CxOp::LIR: return handle_lir(req);
    default: throw std::invalid_argument("HSS received a Cx answer");
  }
}

std::string HssStore::state_hash() const { return util::sha256_hex(to_json().dump()); }

nlohmann::json HssStore::to_json() const {
  auto subs = nlohmann::json::array();
  for (const auto& [impi, p] : profiles_) subs.push_back(p);
  return {{"default_scscf", default_scscf_}, {"subscribers", subs}};
}

HssStore HssStore::from_json(const nlohmann::json& j) {
  HssStore store(j.value("default_scscf", std::string("scscf-1")));
  for (const auto& s : j.at("subscribers")) store.provision(s.get<SubscriberProfile>());
  return store;
}

void HssStore::save(const std::filesystem::path& path) const {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << to_json().dump(2) << '\n';
    if (!out.flush()) throw std::runtime_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

HssStore HssStore::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return from_json(nlohmann::json::parse(in));
}

void HssStore::mutated() {
  if (persist_path_) save(*persist_path_);
}

void HssNode::receive(const net::Payload& payload, const net::NetAddress& from) {
  const auto* req = std::get_if<CxMessage>(&payload);
  if (!req || is_answer(req->op)) return;
  runtime_.send(self_, from, store_.handle(*req));
}

}  // namespace imstb::hss
