#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace powlmine {

/// UTC instant with microsecond resolution.
using Timestamp = std::chrono::sys_time<std::chrono::microseconds>;

/// Parses an ISO-8601 date-time. Accepts a 'T' or a space between date and
/// time, optional seconds, an optional fraction of up to 9 digits (truncated to
/// microseconds) and an optional zone designator ("Z", "+hh:mm", "+hhmm",
/// "+hh"). Date-only values mean midnight. Values without a zone are UTC.
std::optional<Timestamp> parse_iso8601(std::string_view text);

/// Parses `text` with a strftime-like pattern:
///
///   %Y  four-digit year          %m  month 01-12       %d  day 01-31
///   %H  hour 00-23               %M  minute 00-59      %S  second 00-60
///   %f  fraction digits (1-9)    %z  zone: Z, +hh:mm, +hhmm, +hh
///   %%  a literal '%'
///
/// Any other character must match literally. An empty pattern falls back to
/// parse_iso8601. The whole input must be consumed.
std::optional<Timestamp> parse_timestamp(std::string_view text, std::string_view pattern);

/// Formats as "YYYY-MM-DDTHH:MM:SS.ffffffZ"; the fraction is omitted when zero.
std::string format_iso8601(Timestamp t);

}  // namespace powlmine
