#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace nectar {

// Seconds since the Unix epoch, UTC. All timestamps in the system are
// second-precision and rendered as YYYY-MM-DDTHH:MM:SS.
using UtcTime = std::int64_t;

UtcTime now_utc();

std::string format_utc(UtcTime t);

// Strict parse of YYYY-MM-DDTHH:MM:SS; rejects out-of-range fields.
std::optional<UtcTime> parse_utc(std::string_view s);

// Calendar day, for daily series. Stored as days since epoch.
using Day = std::int64_t;

Day day_of(UtcTime t);
std::string format_day(Day d);
std::optional<Day> parse_day(std::string_view s); // YYYY-MM-DD

} // namespace nectar
