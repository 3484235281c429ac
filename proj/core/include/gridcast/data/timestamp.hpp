#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace gridcast::data {

using TimePoint = std::chrono::sys_time<std::chrono::milliseconds>;
using MinuteTime = std::chrono::sys_time<std::chrono::minutes>;

/// Accepts `YYYY-MM-DD HH:MM[:SS[.fff]]` and the ISO-8601 `T` separator,
/// with an optional trailing `Z`. Returns nullopt for anything else.
std::optional<TimePoint> parse_timestamp(std::string_view text);

MinuteTime floor_to_minute(TimePoint t);

/// `YYYY-MM-DD HH:MM:SS`
std::string format_timestamp(MinuteTime t);

}  // namespace gridcast::data
