// UTC timestamps with second precision and the text forms the parsers accept.
// All arithmetic is plain UTC; no timezone database, offsets are applied on parse.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "glucast/core/errors.hpp"

namespace glucast {

/// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

namespace detail {

// Days since 1970-01-01 for a proleptic Gregorian civil date.
inline std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

inline bool parse_uint(std::string_view s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        char c = s[i];
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    out = v;
    return true;
}

}  // namespace detail

inline Timestamp timestamp_from_civil(int y, int mo, int d, int h, int mi, int s) {
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 || mi > 59 ||
        s < 0 || s > 60) {
        throw ParseError("timestamp fields out of range");
    }
    return detail::days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + s;
}

/// Accepts RFC 3339 (`2024-01-01T12:00:00Z`, optional fractional seconds and
/// `±HH:MM` offsets), the plain `YYYY-MM-DD HH:MM:SS` form (read as UTC), and
/// the `YYYY-MM-DD HH:MM:SS ±HHMM` form used by Apple Health exports.
inline Timestamp parse_timestamp(std::string_view s) {
    using detail::parse_uint;
    int y, mo, d, h, mi, sec;
    if (s.size() < 19 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') ||
        s[13] != ':' || s[16] != ':' ||
        !parse_uint(s, 0, 4, y) || !parse_uint(s, 5, 2, mo) || !parse_uint(s, 8, 2, d) ||
        !parse_uint(s, 11, 2, h) || !parse_uint(s, 14, 2, mi) || !parse_uint(s, 17, 2, sec)) {
        throw ParseError("unparseable timestamp: '" + std::string(s) + "'");
    }
    std::size_t pos = 19;
    if (pos < s.size() && s[pos] == '.') {
        ++pos;  // fractional seconds are truncated
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
    }
    std::int64_t offset = 0;
    if (pos < s.size() && s[pos] == ' ') ++pos;  // Apple's space before the offset
    if (pos < s.size()) {
        char c = s[pos];
        if (c == 'Z' || c == 'z') {
            ++pos;
        } else if (c == '+' || c == '-') {
            int oh, om;
            bool colon = pos + 5 < s.size() && s[pos + 3] == ':';
            if (!parse_uint(s, pos + 1, 2, oh) ||
                !parse_uint(s, pos + (colon ? 4 : 3), 2, om)) {
                throw ParseError("unparseable timestamp offset: '" + std::string(s) + "'");
            }
            offset = (c == '+' ? 1 : -1) * (oh * 3600 + om * 60);
            pos += colon ? 6 : 5;
        }
    }
    if (pos != s.size()) {
        throw ParseError("trailing characters in timestamp: '" + std::string(s) + "'");
    }
    return timestamp_from_civil(y, mo, d, h, mi, sec) - offset;
}

/// `DD-MM-YYYY HH:MM:SS`, the layout used by the Ohio T1DM files.
inline Timestamp parse_day_first_timestamp(std::string_view s) {
    using detail::parse_uint;
    int y, mo, d, h, mi, sec;
    if (s.size() != 19 || s[2] != '-' || s[5] != '-' || s[10] != ' ' || s[13] != ':' ||
        s[16] != ':' ||
        !parse_uint(s, 0, 2, d) || !parse_uint(s, 3, 2, mo) || !parse_uint(s, 6, 4, y) ||
        !parse_uint(s, 11, 2, h) || !parse_uint(s, 14, 2, mi) || !parse_uint(s, 17, 2, sec)) {
        throw ParseError("unparseable day-first timestamp: '" + std::string(s) + "'");
    }
    return timestamp_from_civil(y, mo, d, h, mi, sec);
}

inline std::string format_rfc3339(Timestamp ts) {
    std::int64_t days = ts / 86400;
    std::int64_t rem = ts % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    int y, mo, d;
    detail::civil_from_days(days, y, mo, d);
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", y, mo, d,
                  static_cast<int>(rem / 3600), static_cast<int>(rem / 60 % 60),
                  static_cast<int>(rem % 60));
    return std::string(buf);
}

}  // namespace glucast
