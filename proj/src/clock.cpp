#include "nectar/clock.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

namespace nectar {

UtcTime now_utc() {
    return static_cast<UtcTime>(std::chrono::duration_cast<std::chrono::seconds>(
                                    std::chrono::system_clock::now().time_since_epoch())
                                    .count());
}

std::string format_utc(UtcTime t) {
    std::time_t tt = static_cast<std::time_t>(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d", tm.tm_year + 1900, tm.tm_mon + 1,
                  tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

static bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

static int to_int(std::string_view s) {
    int v = 0;
    for (char c : s) v = v * 10 + (c - '0');
    return v;
}

static std::optional<std::tm> parse_date_fields(std::string_view s) {
    // YYYY-MM-DD
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    std::string_view ys = s.substr(0, 4), ms = s.substr(5, 2), ds = s.substr(8, 2);
    if (!all_digits(ys) || !all_digits(ms) || !all_digits(ds)) return std::nullopt;
    int y = to_int(ys), mo = to_int(ms), d = to_int(ds);
    if (mo < 1 || mo > 12 || d < 1 || d > 31) return std::nullopt;
    std::tm tm{};
    tm.tm_year = y - 1900;
    tm.tm_mon = mo - 1;
    tm.tm_mday = d;
    return tm;
}

std::optional<UtcTime> parse_utc(std::string_view s) {
    if (s.size() != 19 || s[10] != 'T' || s[13] != ':' || s[16] != ':') return std::nullopt;
    auto tm = parse_date_fields(s.substr(0, 10));
    if (!tm) return std::nullopt;
    std::string_view hs = s.substr(11, 2), mins = s.substr(14, 2), ss = s.substr(17, 2);
    if (!all_digits(hs) || !all_digits(mins) || !all_digits(ss)) return std::nullopt;
    int h = to_int(hs), mi = to_int(mins), sec = to_int(ss);
    if (h > 23 || mi > 59 || sec > 59) return std::nullopt;
    tm->tm_hour = h;
    tm->tm_min = mi;
    tm->tm_sec = sec;
    std::tm probe = *tm;
    std::time_t t = timegm(&probe);
    if (t == static_cast<std::time_t>(-1)) return std::nullopt;
    // timegm normalizes e.g. Feb 30; reject anything that did not round-trip.
    if (probe.tm_mday != tm->tm_mday || probe.tm_mon != tm->tm_mon || probe.tm_year != tm->tm_year)
        return std::nullopt;
    return static_cast<UtcTime>(t);
}

Day day_of(UtcTime t) {
    // Floor division so pre-1970 times land on the right day.
    return t >= 0 ? t / 86400 : (t - 86399) / 86400;
}

std::string format_day(Day d) {
    return format_utc(d * 86400).substr(0, 10);
}

std::optional<Day> parse_day(std::string_view s) {
    auto tm = parse_date_fields(s);
    if (!tm) return std::nullopt;
    std::tm probe = *tm;
    std::time_t t = timegm(&probe);
    if (t == static_cast<std::time_t>(-1)) return std::nullopt;
    if (probe.tm_mday != tm->tm_mday || probe.tm_mon != tm->tm_mon) return std::nullopt;
    return day_of(static_cast<UtcTime>(t));
}

} // namespace nectar
