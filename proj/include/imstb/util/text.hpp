#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace imstb::util {

bool iequals(std::string_view a, std::string_view b);
std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);

/// Splits on `sep`, ignoring separators inside double quotes or angle brackets.
std::vector<std::string_view> split_top_level(std::string_view s, char sep);

std::optional<std::int64_t> parse_int(std::string_view s);

/// 64-bit FNV-1a; stable across platforms, used for derived tags and hashes.
std::uint64_t fnv1a(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);

std::string to_hex(std::uint64_t v);
std::string to_hex(std::string_view bytes);
std::optional<std::string> from_hex(std::string_view hex);

}  // namespace imstb::util
