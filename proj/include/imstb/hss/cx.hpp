#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace imstb::hss {

/// Cx-lite: a JSON stand-in for the Diameter Cx queries between CSCFs and the HSS.
enum class CxOp { UAR, UAA, SAR, SAA, LIR, LIA };
enum class Assignment { Register, Deregister };
enum class CxResult { Success, UserUnknown, AuthRejected };

std::string_view to_string(CxOp op);
std::string_view to_string(Assignment a);
std::string_view to_string(CxResult r);

inline bool is_answer(CxOp op) { return op == CxOp::UAA || op == CxOp::SAA || op == CxOp::LIA; }

struct CxMessage {
  CxOp op = CxOp::UAR;
  std::uint64_t correlation_id = 0;
  std::string impu;  // AOR, user@host
  std::optional<std::string> impi;
  std::optional<std::string> scscf_name;
  std::optional<Assignment> assignment;
  std::optional<std::string> passkey_offer;
  std::optional<CxResult> result;
  std::optional<nlohmann::json> profile;  // SAA on success

  bool operator==(const CxMessage&) const = default;

  /// Answer skeleton echoing op pairing and correlation id.
  CxMessage answer(CxResult r) const;
};

class CxDecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json to_json(const CxMessage& m);
CxMessage cx_from_json(const nlohmann::json& j);

/// One JSON object, no trailing newline. Passkeys are written as-is: Cx-lite is
/// an intra-core link.
std::string encode_line(const CxMessage& m);
/// Throws CxDecodeError.
CxMessage decode_line(std::string_view line);

}  // namespace imstb::hss
