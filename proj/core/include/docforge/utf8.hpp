#pragma once

#include <cstddef>
#include <string_view>

namespace docforge::utf8 {

// Budgets are expressed in characters (code points). Invalid bytes count
// as one character each, so the count never under-reports.

std::size_t length(std::string_view text) noexcept;

/// Byte offset of the `chars`-th code point, or text.size() if the text is
/// shorter than that.
std::size_t byte_offset(std::string_view text, std::size_t chars) noexcept;

/// Code-point index of a byte offset that lies on a code point boundary.
inline std::size_t char_index(std::string_view text, std::size_t byte_pos) noexcept {
  return length(text.substr(0, byte_pos));
}

}  // namespace docforge::utf8
