#ifndef SKYLINK_SRC_CSV_HPP
#define SKYLINK_SRC_CSV_HPP

// Minimal helpers shared by the CSV readers and writers.

#include <charconv>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "skylink/core.hpp"

namespace skylink::csv {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::string_view strip_bom(std::string_view s) {
    if (s.size() >= 3 && s.substr(0, 3) == "\xEF\xBB\xBF") s.remove_prefix(3);
    return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline double parse_double(std::string_view field, std::size_t line, const char* what) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    if (!field.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (field.empty() || ec != std::errc() || ptr != last)
        throw ParseError(std::string("cannot parse ") + what + " from '" + std::string(field) + "'", line);
    return value;
}

/// Shortest representation that reads back to the same double.
inline std::string format(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

}  // namespace skylink::csv

#endif  // SKYLINK_SRC_CSV_HPP
