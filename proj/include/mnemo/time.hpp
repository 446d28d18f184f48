#pragma once

#include <chrono>
#include <optional>
#include <string>

namespace mnemo {

// All timestamps are UTC. Wall-clock strings carry no zone designator and are
// interpreted as UTC; JSON timestamps use a trailing 'Z'.
using UtcSeconds = std::chrono::sys_seconds;
using UtcDays = std::chrono::sys_days;

// "YYYY-MM-DD HH:MM:SS" (message transcript form). Rejects out-of-range fields.
std::optional<UtcSeconds> parse_wall_clock(const std::string& s);
std::string format_wall_clock(UtcSeconds t);

// "YYYY-MM-DDTHH:MM:SSZ" (JSON form).
std::optional<UtcSeconds> parse_iso8601(const std::string& s);
std::string format_iso8601(UtcSeconds t);

// "YYYY-MM-DD"
std::optional<UtcDays> parse_date(const std::string& s);
std::string format_date(UtcDays d);

inline UtcDays to_midnight(UtcSeconds t) { return std::chrono::floor<std::chrono::days>(t); }

// Signed fractional days from b to a: (a - b) / 86400.
double days_between(UtcSeconds a, UtcSeconds b);

}  // namespace mnemo
