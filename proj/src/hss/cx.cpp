#include "imstb/hss/cx.hpp"

#include <array>

namespace imstb::hss {

namespace {

constexpr std::array<std::string_view, 6> kOps{"UAR", "UAA", "SAR", "SAA", "LIR", "LIA"};
constexpr std::array<std::string_view, 3> kResults{"Success", "UserUnknown", "AuthRejected"};

template <typename E, std::size_t N>
E lookup(const std::array<std::string_view, N>& names, const std::string& s, const char* what) {
  for (std::size_t i = 0; i < N; ++i)
    if (names[i] == s) return static_cast<E>(i);
  throw CxDecodeError(std::string("unknown ") + what + ": " + s);
}

}  // namespace

std::string_view to_string(CxOp op) { return kOps[static_cast<std::size_t>(op)]; }
std::string_view to_string(Assignment a) {
  return a == Assignment::Register ? "Register" : "Deregister";
}
std::string_view to_string(CxResult r) { return kResults[static_cast<std::size_t>(r)]; }

CxMessage CxMessage::answer(CxResult r) const {
  CxMessage a;
  switch (op) {
    case CxOp::UAR: a.op = CxOp::UAA; break;
    case CxOp::SAR: a.op = CxOp::SAA; break;
    case CxOp::LIR: a.op = CxOp::LIA; break;
    default: a.op = op; break;
  }
  a.correlation_id = correlation_id;
  a.impu = impu;
  a.impi = impi;
  a.result = r;
  return a;
}

nlohmann::json to_json(const CxMessage& m) {
  nlohmann::json j{
      {"op", std::string(to_string(m.op))},
      {"correlation_id", m.correlation_id},
      {"impu", m.impu},
  };
  if (m.impi) j["impi"] = *m.impi;
  if (m.scscf_name) j["scscf_name"] = *m.scscf_name;
  if (m.assignment) j["assignment"] = std::string(to_string(*m.assignment));
  if (m.passkey_offer) j["passkey_offer"] = *m.passkey_offer;
  if (m.result) j["result"] = std::string(to_string(*m.result));
  if (m.profile) j["profile"] = *m.profile;
  return j;
}

CxMessage cx_from_json(const nlohmann::json& j) {
  try {
    CxMessage m;
    m.op = lookup<CxOp>(kOps, j.at("op").get<std::string>(), "op");
    if (!j.contains("correlation_id")) throw CxDecodeError("correlation_id is mandatory");
    m.correlation_id = j["correlation_id"].get<std::uint64_t>();
    m.impu = j.at("impu").get<std::string>();
    if (j.contains("impi")) m.impi = j["impi"].get<std::string>();
    if (j.contains("scscf_name")) m.scscf_name = j["scscf_name"].get<std::string>();
    if (j.contains("assignment")) {
      const auto a = j["assignment"].get<std::string>();
      if (a == "Register") m.assignment = Assignment::Register;
      else if (a == "Deregister") m.assignment = Assignment::Deregister;
      else throw CxDecodeError("unknown assignment: " + a);
    }
    if (j.contains("passkey_offer")) m.passkey_offer = j["passkey_offer"].get<std::string>();
    if (j.contains("result"))
      m.result = lookup<CxResult>(kResults, j["result"].get<std::string>(), "result");
    if (j.contains("profile")) m.profile = j["profile"];
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw CxDecodeError(e.what());
  }
}

std::string encode_line(const CxMessage& m) { return to_json(m).dump(); }

CxMessage decode_line(std::string_view line) {
  const auto j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw CxDecodeError("not a JSON object");
  return cx_from_json(j);
}

}  // namespace imstb::hss
