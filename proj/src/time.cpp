#include "watguard/time.hpp"

#include <array>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <cstdlib>

namespace watguard {

namespace {

constexpr std::array<const char*, 12> kMonths = {
    "Jan", "Feb", "Mar", "Apr", "May", "Jun",
    "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

bool read_fixed_uint(std::string_view s, std::size_t pos, std::size_t len,
                     int& out) {
    if (pos + len > s.size()) return false;
    int v = 0;
    for (std::size_t i = 0; i < len; ++i) {
        char c = s[pos + i];
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    out = v;
    return true;
}

}  // namespace

Instant make_instant(const CivilTime& c) {
    using namespace std::chrono;
    const auto ymd = year{c.year} / month{c.month} / day{c.day};
    return sys_days{ymd} + hours{c.hour} + minutes{c.minute} +
           seconds{c.second};
}

CivilTime civil_from_instant(Instant t) {
    using namespace std::chrono;
    const auto days = floor<std::chrono::days>(t);
    const year_month_day ymd{days};
    const hh_mm_ss tod{t - days};
    return CivilTime{int(ymd.year()), unsigned(ymd.month()),
                     unsigned(ymd.day()), unsigned(tod.hours().count()),
                     unsigned(tod.minutes().count()),
                     unsigned(tod.seconds().count())};
}

std::string format_iso8601(Instant t) {
    const CivilTime c = civil_from_instant(t);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02u:%02u:%02uZ", c.year,
                  c.month, c.day, c.hour, c.minute, c.second);
    return buf;
}

std::optional<Instant> parse_iso8601(std::string_view s) {
    // YYYY-MM-DD{T or space}HH:MM:SS, optional Z / +HH:MM / +HHMM suffix.
    int y, mo, d, h, mi, se;
    if (!read_fixed_uint(s, 0, 4, y)) return std::nullopt;
    if (s.size() < 19 || s[4] != '-' || s[7] != '-') return std::nullopt;
    if (s[10] != 'T' && s[10] != ' ') return std::nullopt;
    if (s[13] != ':' || s[16] != ':') return std::nullopt;
    if (!read_fixed_uint(s, 5, 2, mo) || !read_fixed_uint(s, 8, 2, d) ||
        !read_fixed_uint(s, 11, 2, h) || !read_fixed_uint(s, 14, 2, mi) ||
        !read_fixed_uint(s, 17, 2, se))
        return std::nullopt;
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || se > 60)
        return std::nullopt;

    int offset_min = 0;
    std::string_view rest = s.substr(19);
    if (!rest.empty()) {
        if (rest == "Z") {
            // utc
        } else if (rest[0] == '+' || rest[0] == '-') {
            int oh, om;
            if (rest.size() == 6 && rest[3] == ':') {
                if (!read_fixed_uint(rest, 1, 2, oh) ||
                    !read_fixed_uint(rest, 4, 2, om))
                    return std::nullopt;
            } else if (rest.size() == 5) {
                if (!read_fixed_uint(rest, 1, 2, oh) ||
                    !read_fixed_uint(rest, 3, 2, om))
                    return std::nullopt;
            } else {
                return std::nullopt;
            }
            if (oh > 23 || om > 59) return std::nullopt;
            offset_min = oh * 60 + om;
            if (rest[0] == '-') offset_min = -offset_min;
        } else {
            return std::nullopt;
        }
    }

    using namespace std::chrono;
    const auto ymd = year{y} / month{unsigned(mo)} / day{unsigned(d)};
    if (!ymd.ok()) return std::nullopt;
    Instant local = sys_days{ymd} + hours{h} + minutes{mi} + seconds{se};
    return local - minutes{offset_min};
}

std::string format_clf_time(Instant t, int tz_offset_minutes) {
    using namespace std::chrono;
    const CivilTime c = civil_from_instant(t + minutes{tz_offset_minutes});
    const int am = tz_offset_minutes < 0 ? -tz_offset_minutes
                                         : tz_offset_minutes;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%02u/%s/%04d:%02u:%02u:%02u %c%02d%02d",
                  c.day, kMonths[c.month - 1], c.year, c.hour, c.minute,
                  c.second, tz_offset_minutes < 0 ? '-' : '+', am / 60,
                  am % 60);
    return buf;
}

unsigned month_from_abbrev(std::string_view s) {
    for (unsigned i = 0; i < kMonths.size(); ++i)
        if (s == kMonths[i]) return i + 1;
    return 0;
}

const char* month_abbrev(unsigned month) {
    return (month >= 1 && month <= 12) ? kMonths[month - 1] : "???";
}

}  // namespace watguard
