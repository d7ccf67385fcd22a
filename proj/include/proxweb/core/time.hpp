#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace proxweb {

// All platform timestamps are UTC with one-second resolution.
using Timestamp = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;

// `YYYY-MM-DDTHH:MM:SSZ`
std::string format_rfc3339(Timestamp t);

// Accepts RFC 3339 date-times with `Z` or a numeric offset; fractional seconds
// are truncated. Throws Error{InvalidTimestamp}.
Timestamp parse_rfc3339(std::string_view text);

// RFC 3339 or integer seconds since the epoch (CLI and query parameters).
// Throws Error{InvalidTimestamp}.
Timestamp parse_time_arg(std::string_view text);

inline Timestamp from_epoch_seconds(std::int64_t s) { return Timestamp{Seconds{s}}; }
inline std::int64_t epoch_seconds(Timestamp t) { return t.time_since_epoch().count(); }

Timestamp now_utc();

}  // namespace proxweb
