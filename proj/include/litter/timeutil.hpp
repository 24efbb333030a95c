#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace litter {

using UtcTime = std::chrono::sys_seconds;

// Accepts "YYYY-MM-DDTHH:MM:SSZ", "YYYY-MM-DD HH:MM:SS", the EXIF form
// "YYYY:MM:DD HH:MM:SS", and a bare date "YYYY-MM-DD" (midnight).
// Timestamps without an offset are taken as UTC.
std::optional<UtcTime> parse_utc(std::string_view text);

// "YYYY-MM-DDTHH:MM:SSZ"
std::string format_utc(UtcTime t);

}  // namespace litter
