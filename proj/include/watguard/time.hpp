#ifndef WATGUARD_TIME_HPP
#define WATGUARD_TIME_HPP

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace watguard {

// Seconds since the Unix epoch, UTC. Second precision is all the access-log
// clock field carries.
using Instant = std::chrono::sys_seconds;

// Half-open interval [start, end).
struct TimeWindow {
    Instant start{};
    Instant end{};

    bool contains(Instant t) const { return start <= t && t < end; }
    bool valid() const { return start < end; }

    friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

struct CivilTime {
    int year = 1970;
    unsigned month = 1;  // 1..12
    unsigned day = 1;
    unsigned hour = 0;
    unsigned minute = 0;
    unsigned second = 0;
};

// Assumes the fields form a valid calendar date; parsers validate first.
Instant make_instant(const CivilTime& c);
CivilTime civil_from_instant(Instant t);

// "2023-10-10T13:55:36Z"
std::string format_iso8601(Instant t);

// Accepts "YYYY-MM-DDTHH:MM:SS" followed by "Z", "+HH:MM", "+HHMM" or
// nothing (treated as UTC). 'T' may be a space.
std::optional<Instant> parse_iso8601(std::string_view text);

// "10/Oct/2023:13:55:36 +0000" -- the access-log clock field.
std::string format_clf_time(Instant t, int tz_offset_minutes);

// 1..12, or 0 when the abbreviation is not an English month name.
unsigned month_from_abbrev(std::string_view abbrev);
const char* month_abbrev(unsigned month);

}  // namespace watguard

#endif
