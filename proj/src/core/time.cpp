// SPDX-License-Identifier: Apache-2.0
#include "smartmeter/core/time.hpp"

#include <cstdio>

#include "smartmeter/core/errors.hpp"

namespace smartmeter {

using namespace std::chrono;

std::string format_date(sys_days day) {
    const year_month_day ymd{day};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::string format_timestamp(Timestamp t) {
    const auto day = floor<days>(t);
    const hh_mm_ss<milliseconds> tod{t - day};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02d.%03dZ", format_date(day).c_str(),
                  static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                  static_cast<int>(tod.seconds().count()),
                  static_cast<int>(tod.subseconds().count()));
    return buf;
}

namespace {

sys_days checked_date(int y, unsigned m, unsigned d, std::string_view text) {
    const year_month_day ymd{year{y}, month{m}, day{d}};
    if (!ymd.ok()) {
        throw ParseError("invalid calendar date '" + std::string(text) + "'");
    }
    return sys_days{ymd};
}

} // namespace

sys_days parse_date(std::string_view text) {
    const std::string s(text);
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    int consumed = 0;
    if (std::sscanf(s.c_str(), "%4d-%2u-%2u%n", &y, &m, &d, &consumed) != 3 ||
        static_cast<std::size_t>(consumed) != s.size()) {
        throw ParseError("expected YYYY-MM-DD, got '" + s + "'");
    }
    return checked_date(y, m, d, text);
}

Timestamp parse_timestamp(std::string_view text) {
    const std::string s(text);
    if (s.size() == 10) {
        return Timestamp{parse_date(s)};
    }
    int y = 0;
    unsigned mo = 0;
    unsigned d = 0;
    int h = 0;
    int mi = 0;
    int sec = 0;
    int consumed = 0;
    if (std::sscanf(s.c_str(), "%4d-%2u-%2uT%2d:%2d:%2d%n", &y, &mo, &d, &h, &mi, &sec,
                    &consumed) != 6) {
        throw ParseError("expected ISO-8601 UTC timestamp, got '" + s + "'");
    }
    std::string_view rest = std::string_view(s).substr(static_cast<std::size_t>(consumed));
    int millis = 0;
    if (!rest.empty() && rest.front() == '.') {
        rest.remove_prefix(1);
        int digits = 0;
        while (!rest.empty() && rest.front() >= '0' && rest.front() <= '9') {
            if (digits < 3) {
                millis = millis * 10 + (rest.front() - '0');
            }
            ++digits;
            rest.remove_prefix(1);
        }
        if (digits == 0) {
            throw ParseError("malformed fractional seconds in '" + s + "'");
        }
        for (; digits < 3; ++digits) {
            millis *= 10;
        }
    }
    if (rest != "Z" || h > 23 || mi > 59 || sec > 59) {
        throw ParseError("expected ISO-8601 UTC timestamp, got '" + s + "'");
    }
    return Timestamp{checked_date(y, mo, d, text)} + hours{h} + minutes{mi} + seconds{sec} +
           milliseconds{millis};
}

} // namespace smartmeter
