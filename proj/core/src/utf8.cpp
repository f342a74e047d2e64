#include "docforge/utf8.hpp"

namespace docforge::utf8 {
namespace {

std::size_t sequence_length(unsigned char lead) noexcept {
  if (lead < 0x80) return 1;
  if ((lead & 0xE0) == 0xC0) return 2;
  if ((lead & 0xF0) == 0xE0) return 3;
  if ((lead & 0xF8) == 0xF0) return 4;
  return 1;
}

// Advances over one code point starting at `pos`, treating malformed
// sequences as a single byte.
std::size_t advance(std::string_view text, std::size_t pos) noexcept {
  std::size_t n = sequence_length(static_cast<unsigned char>(text[pos]));
  if (pos + n > text.size()) return pos + 1;
  for (std::size_t i = 1; i < n; ++i) {
    if ((static_cast<unsigned char>(text[pos + i]) & 0xC0) != 0x80) return pos + 1;
  }
  return pos + n;
}

}  // namespace

std::size_t length(std::string_view text) noexcept {
  std::size_t count = 0;
  for (std::size_t pos = 0; pos < text.size(); pos = advance(text, pos)) ++count;
  return count;
}

std::size_t byte_offset(std::string_view text, std::size_t chars) noexcept {
  std::size_t pos = 0;
  for (std::size_t i = 0; i < chars && pos < text.size(); ++i) pos = advance(text, pos);
  return pos;
}

}  // namespace docforge::utf8
