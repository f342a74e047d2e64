#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace docforge {

/// 64-bit FNV-1a over the bytes of `text`.
std::uint64_t fingerprint64(std::string_view text) noexcept;

/// fingerprint64 as 16 lowercase hex digits.
std::string fingerprint_hex(std::string_view text);

/// Parses the output of fingerprint_hex back into its integer value.
std::uint64_t parse_fingerprint_hex(std::string_view hex);

}  // namespace docforge
