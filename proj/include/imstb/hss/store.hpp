#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "imstb/hss/cx.hpp"
#include "imstb/hss/profile.hpp"
#include "imstb/net/runtime.hpp"

namespace imstb::hss {

class DuplicateIdentity : public std::runtime_error {
 public:
  explicit DuplicateIdentity(const std::string& id) : std::runtime_error("duplicate identity " + id) {}
};

/// The subscriber master store. Answers Cx-lite queries; UAR and LIR never
/// mutate it. When a persist path is set, every mutation rewrites the file.
class HssStore {
 public:
  explicit HssStore(std::string default_scscf = "scscf-1") : default_scscf_(std::move(default_scscf)) {}

  /// Throws std::invalid_argument for an empty impu list or a Registered
  /// profile without an S-CSCF; DuplicateIdentity when the impi or any impu is
  /// already held by a different provisioning. Identical re-provisioning is a no-op.
  void provision(SubscriberProfile profile);

  CxMessage handle_uar(const CxMessage& req) const;
  /// Register needs a matching passkey. Deregister checks the passkey when one
  /// is offered; without one it is the S-CSCF's own expiry notice.
  CxMessage handle_sar(const CxMessage& req);
  CxMessage handle_lir(const CxMessage& req) const;
  /// Dispatches on op; throws std::invalid_argument for answers.
  CxMessage handle(const CxMessage& req);

  const SubscriberProfile* find_impu(std::string_view aor) const;
  const SubscriberProfile* find_impi(std::string_view impi) const;
  bool verify_passkey(std::string_view aor, std::string_view passkey) const;
  const std::map<std::string, SubscriberProfile>& profiles() const { return profiles_; }
  const std::string& default_scscf() const { return default_scscf_; }

  /// Digest of the canonical JSON form; equal stores hash equal.
  std::string state_hash() const;

  nlohmann::json to_json() const;
  static HssStore from_json(const nlohmann::json& j);

  /// Write-to-temp then rename, so readers never see a torn file.
  void save(const std::filesystem::path& path) const;
  static HssStore load(const std::filesystem::path& path);
  void persist_to(std::filesystem::path path) { persist_path_ = std::move(path); }

  bool operator==(const HssStore& other) const {
    return default_scscf_ == other.default_scscf_ && profiles_ == other.profiles_;
  }

 private:
  SubscriberProfile* find_impu_mut(std::string_view aor);
  void mutated();

  std::string default_scscf_;
  std::map<std::string, SubscriberProfile> profiles_;  // by impi
  std::map<std::string, std::string> impu_index_;      // aor -> impi
  std::optional<std::filesystem::path> persist_path_;
};

/// Network face of the store: answers every Cx-lite request back to its sender.
class HssNode : public net::Node {
 public:
  HssNode(net::Runtime& runtime, net::NetAddress self, HssStore& store)
      : runtime_(runtime), self_(std::move(self)), store_(store) {}

  void receive(const net::Payload& payload, const net::NetAddress& from) override;
  const net::NetAddress& address() const { return self_; }

 private:
  net::Runtime& runtime_;
  net::NetAddress self_;
  HssStore& store_;
};

}  // namespace imstb::hss
