// SPDX-License-Identifier: Apache-2.0
//
// Small CSV helpers shared by the parsers and writers. Inputs are plain
// comma-separated UTF-8 with no quoting; numbers use '.' and no thousands
// separators. Doubles are written with the shortest representation that
// round-trips, so serialize/parse is lossless.

#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "royalty/errors.hpp"

namespace royalty::detail {

/// Splits text into lines, tolerating trailing '\r' (CRLF input) and a
/// missing final newline. A trailing empty line is dropped.
inline std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view line =
            nl == std::string_view::npos ? text.substr(pos) : text.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.emplace_back(line);
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

inline std::vector<std::string> split_fields(std::string_view line) {
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
        std::size_t comma = line.find(',', pos);
        if (comma == std::string_view::npos) {
            fields.emplace_back(line.substr(pos));
            break;
        }
        fields.emplace_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return fields;
}

/// Strict double parse: the whole field must be consumed.
inline double parse_number(std::string_view field, const std::string& context) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || field.empty()) {
        throw ParseError(context + ": invalid number '" + std::string(field) + "'");
    }
    return value;
}

/// Shortest decimal representation that parses back to the same double.
inline std::string format_number(double value) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace royalty::detail
