#include "docforge/fingerprint.hpp"

#include <charconv>
#include <cstdio>

#include "docforge/error.hpp"

namespace docforge {

std::uint64_t fingerprint64(std::string_view text) noexcept {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string fingerprint_hex(std::string_view text) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fingerprint64(text)));
  return buf;
}

std::uint64_t parse_fingerprint_hex(std::string_view hex) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), value, 16);
  if (ec != std::errc{} || ptr != hex.data() + hex.size() || hex.size() != 16) {
    throw InvalidArgument("fingerprint", "malformed fingerprint: " + std::string(hex));
  }
  return value;
}

}  // namespace docforge
