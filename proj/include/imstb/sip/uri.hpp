#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "imstb/net/address.hpp"

namespace imstb::sip {

/// Ordered `;name=value` parameters. Flag parameters (e.g. `lr`) have an empty value.
using Params = std::vector<std::pair<std::string, std::string>>;

std::optional<std::string_view> find_param(const Params& params, std::string_view name);
void set_param(Params& params, std::string_view name, std::string_view value);

/// `sip:[user@]host[:port][;params]`. Only the sip scheme is supported.
struct SipUri {
  std::optional<std::string> user;
  std::string host;
  std::optional<std::uint16_t> port;
  Params params;

  bool operator==(const SipUri&) const = default;

  std::uint16_t effective_port() const { return port.value_or(5060); }
  net::NetAddress address() const { return {host, effective_port()}; }

  /// user@host, the identity used as a key by registrars and stores.
  std::string aor() const;
  std::string to_string() const;

  /// Throws std::invalid_argument on malformed input.
  static SipUri parse(std::string_view text);
  static std::optional<SipUri> try_parse(std::string_view text);
};

/// `["display"] <uri>;params`, as used by From, To, Contact and Route.
struct NameAddr {
  std::string display;
  SipUri uri;
  Params params;

  bool operator==(const NameAddr&) const = default;

  std::optional<std::string_view> tag() const { return find_param(params, "tag"); }
  void set_tag(std::string_view tag) { set_param(params, "tag", tag); }

  std::string to_string() const;
  static NameAddr parse(std::string_view text);
};

}  // namespace imstb::sip
