#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace imstb::net {

/// A transport address (host plus UDP/TCP port) of one logical node.
struct NetAddress {
  std::string host;
  std::uint16_t port = 5060;

  auto operator<=>(const NetAddress&) const = default;
  bool operator==(const NetAddress&) const = default;

  std::string to_string() const { return host + ":" + std::to_string(port); }

  /// Parses "host:port"; a missing port means 5060.
  static std::optional<NetAddress> parse(std::string_view text);
};

}  // namespace imstb::net
