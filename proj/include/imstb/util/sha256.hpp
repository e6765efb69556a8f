#pragma once

#include <string>
#include <string_view>

namespace imstb::util {

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

/// `n` random bytes from the OS, hex encoded.
std::string random_hex(std::size_t n);

}  // namespace imstb::util
