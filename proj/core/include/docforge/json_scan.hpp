#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

namespace docforge::json_scan {

/// Given `open` pointing at '{' or '[', returns one past the matching closer.
/// Double-quoted strings (with backslash escapes) are skipped. Returns
/// nullopt if the region never balances or a closer mismatches.
std::optional<std::size_t> balanced_end(std::string_view text, std::size_t open) noexcept;

}  // namespace docforge::json_scan
