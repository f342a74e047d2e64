#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace docforge {

using Timestamp = std::chrono::sys_seconds;

/// Accepts "YYYY-MM-DDTHH:MM:SS" followed by optional fractional seconds and
/// a "Z" or "+hh:mm"/"-hh:mm" offset. Fractional seconds are discarded.
std::optional<Timestamp> parse_rfc3339(std::string_view text);

/// Always UTC with a "Z" suffix, second precision.
std::string format_rfc3339(Timestamp ts);

}  // namespace docforge
