#pragma once

#include <charconv>
#include <cstdio>
#include <string>
#include <string_view>
#include <system_error>

#include "qcbm/error.hpp"

namespace qcbm {

// Shortest decimal text that parses back to the identical double.
inline std::string format_roundtrip(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

// Fixed number of significant digits, for human-facing CSV output.
inline std::string format_sig(double x, int digits = 12) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, digits);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s, std::size_t line = 0) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double x = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw FormatError("cannot parse number '" + std::string(s) + "'", line);
    }
    return x;
}

inline long long parse_int(std::string_view s, std::size_t line = 0) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    long long x = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw FormatError("cannot parse integer '" + std::string(s) + "'", line);
    }
    return x;
}

}  // namespace qcbm
