// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdio>
#include <string>

#include "royalty/errors.hpp"

namespace royalty {

namespace detail {

inline bool is_leap_year(int year) {
    return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

inline int days_in_month(int year, int month) {
    static constexpr int kDays[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month == 2 && is_leap_year(year)) return 29;
    return kDays[month - 1];
}

// Parses a fixed-width run of digits; throws ParseError on anything else.
inline int parse_digits(const std::string& text, std::size_t pos, std::size_t len,
                        const char* what) {
    int value = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        if (i >= text.size() || text[i] < '0' || text[i] > '9') {
            throw ParseError(std::string("invalid ") + what + ": '" + text + "'");
        }
        value = value * 10 + (text[i] - '0');
    }
    return value;
}

}  // namespace detail

/// Gregorian calendar date, canonical form YYYY-MM-DD.
struct Date {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..days_in_month

    /// Strict parse of "YYYY-MM-DD" (zero-padded, real calendar date).
    static Date parse(const std::string& text) {
        if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
            throw ParseError("invalid date: '" + text + "' (expected YYYY-MM-DD)");
        }
        Date d;
        d.year = detail::parse_digits(text, 0, 4, "date");
        d.month = detail::parse_digits(text, 5, 2, "date");
        d.day = detail::parse_digits(text, 8, 2, "date");
        if (d.month < 1 || d.month > 12 || d.day < 1 ||
            d.day > detail::days_in_month(d.year, d.month)) {
            throw ParseError("invalid date: '" + text + "'");
        }
        return d;
    }

    std::string to_string() const {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
        return buf;
    }

    auto operator<=>(const Date&) const = default;
};

/// Calendar quarter keyed by (year, 1..4). The flat index makes window and
/// gap arithmetic trivial: consecutive quarters differ by exactly 1.
struct Quarter {
    int year = 1970;
    int q = 1;  // 1..4

    /// Strict parse of "YYYY-Qn", n in 1..4.
    static Quarter parse(const std::string& text) {
        if (text.size() != 7 || text[4] != '-' || text[5] != 'Q') {
            throw ParseError("invalid quarter: '" + text + "' (expected YYYY-Qn)");
        }
        Quarter qu;
        qu.year = detail::parse_digits(text, 0, 4, "quarter");
        qu.q = detail::parse_digits(text, 6, 1, "quarter");
        if (qu.q < 1 || qu.q > 4) {
            throw ParseError("invalid quarter: '" + text + "'");
        }
        return qu;
    }

    /// Quarter containing a calendar date.
    static Quarter of(const Date& d) { return Quarter{d.year, (d.month - 1) / 3 + 1}; }

    static Quarter from_index(int index) {
        int year = index / 4;
        int rem = index % 4;
        if (rem < 0) {  // keep floor semantics for negative indexes
            year -= 1;
            rem += 4;
        }
        return Quarter{year, rem + 1};
    }

    int index() const { return year * 4 + (q - 1); }

    Quarter operator+(int n) const { return from_index(index() + n); }
    Quarter operator-(int n) const { return from_index(index() - n); }
    /// Number of quarters from `other` to this.
    int operator-(const Quarter& other) const { return index() - other.index(); }

    std::string to_string() const {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-Q%d", year, q);
        return buf;
    }

    auto operator<=>(const Quarter&) const = default;
};

}  // namespace royalty
