#pragma once

#include <cstdint>
#include <string>

namespace engage {

// Minutes since 1970-01-01 00:00, timezone-naive (course-local time).
using Minutes = std::int64_t;

inline constexpr std::int64_t kMinutesPerDay = 24 * 60;

namespace timeutil {

// Proleptic Gregorian <-> days since 1970-01-01.
std::int64_t days_from_civil(int year, int month, int day);
void civil_from_days(std::int64_t days, int& year, int& month, int& day);

// "YYYY-MM-DD" -> days since epoch. Throws engage::InputError on bad input.
std::int64_t parse_date(const std::string& text);
std::string format_date(std::int64_t days);

// strftime-style subset: %Y %m %d %H %M %S (%S accepted, truncated to minute
// resolution). Literal characters must match; whitespace in the format skips
// any run of whitespace. The whole input must be consumed.
// Returns false on mismatch or out-of-range fields.
bool try_parse_timestamp(const std::string& text, const std::string& format,
                         Minutes& out);
std::string format_timestamp(Minutes t, const std::string& format);

}  // namespace timeutil
}  // namespace engage
