#pragma once

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qcbm/error.hpp"
#include "qcbm/format.hpp"

namespace qcbm {

using Date = std::chrono::year_month_day;

// Named real-valued series sharing one strictly increasing date axis.
// Yields are in percentage points.
struct TimeSeries {
    std::vector<Date> dates;
    std::vector<std::string> names;
    std::vector<std::vector<double>> values;  // values[series][t]

    std::size_t length() const { return dates.size(); }

    void validate() const {
        if (names.size() != values.size()) throw ValidationError("series names/values mismatch");
        for (const auto& v : values) {
            if (v.size() != dates.size()) throw ValidationError("series lengths differ");
        }
        for (std::size_t t = 1; t < dates.size(); ++t) {
            if (!(dates[t - 1] < dates[t])) throw ValidationError("dates must be strictly increasing");
        }
    }
};

// Accepts YYYY-MM-DD and YYYY/M/D.
inline std::optional<Date> parse_date(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    const char sep = s.find('-') != std::string_view::npos ? '-' : '/';
    int parts[3] = {0, 0, 0};
    int field = 0;
    std::size_t digits = 0;
    for (char c : s) {
        if (c == sep) {
            if (digits == 0 || ++field > 2) return std::nullopt;
            digits = 0;
        } else if (c >= '0' && c <= '9') {
            parts[field] = parts[field] * 10 + (c - '0');
            if (++digits > 4) return std::nullopt;
        } else {
            return std::nullopt;
        }
    }
    if (field != 2 || digits == 0) return std::nullopt;
    const Date d{std::chrono::year{parts[0]}, std::chrono::month{static_cast<unsigned>(parts[1])},
                 std::chrono::day{static_cast<unsigned>(parts[2])}};
    if (!d.ok()) return std::nullopt;
    return d;
}

inline std::string format_date(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                  static_cast<unsigned>(d.day()));
    return buf;
}

struct CsvLoadResult {
    TimeSeries series;
    std::size_t dropped_missing = 0;
    std::size_t dropped_out_of_range = 0;
};

struct CsvLoadOptions {
    std::vector<std::string> series;  // empty: every non-date column
    std::optional<Date> from;
    std::optional<Date> to;
};

namespace detail {

inline std::vector<std::string> csv_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
        } else if (c == ',' && !quoted) {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    for (auto& f : out) {
        const auto b = f.find_first_not_of(" \t");
        const auto e = f.find_last_not_of(" \t");
        f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
    }
    return out;
}

inline std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

}  // namespace detail

// Reads a date column plus one column per series. Preamble lines before the
// header row (first field "Date") are skipped. Rows with a missing selected
// value (empty cell or "-") are dropped and counted.
inline CsvLoadResult read_timeseries_csv(std::istream& is, const CsvLoadOptions& opts = {}) {
    std::vector<std::string> lines;
    for (std::string line; std::getline(is, line);) lines.push_back(line);

    std::size_t header_idx = lines.size();
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto f = detail::csv_fields(lines[i]);
        if (!f.empty() && detail::lower(f[0]) == "date") {
            header_idx = i;
            break;
        }
    }
    if (header_idx == lines.size()) {
        // No labelled header: the first non-empty line is the header.
        for (std::size_t i = 0; i < lines.size(); ++i) {
            if (!detail::csv_fields(lines[i]).front().empty()) {
                header_idx = i;
                break;
            }
        }
    }
    if (header_idx == lines.size()) throw FormatError("CSV has no header row");

    const auto header = detail::csv_fields(lines[header_idx]);
    std::vector<std::size_t> cols;
    std::vector<std::string> names = opts.series;
    if (names.empty()) {
        for (std::size_t c = 1; c < header.size(); ++c) {
            if (!header[c].empty()) names.push_back(header[c]);
        }
    }
    for (const auto& name : names) {
        const auto it = std::find(header.begin() + 1, header.end(), name);
        if (it == header.end()) throw FormatError("series '" + name + "' not found in header", header_idx + 1);
        cols.push_back(static_cast<std::size_t>(it - header.begin()));
    }

    CsvLoadResult out;
    out.series.names = names;
    out.series.values.assign(names.size(), {});
    for (std::size_t i = header_idx + 1; i < lines.size(); ++i) {
        const std::size_t lineno = i + 1;
        const auto f = detail::csv_fields(lines[i]);
        if (f.size() == 1 && f[0].empty()) continue;
        const auto date = parse_date(f[0]);
        if (!date) throw FormatError("unparseable date '" + f[0] + "'", lineno);
        bool missing = false;
        std::vector<double> row;
        for (auto c : cols) {
            if (c >= f.size() || f[c].empty() || f[c] == "-") {
                missing = true;
                break;
            }
            row.push_back(parse_double(f[c], lineno));
        }
        if (missing) {
            ++out.dropped_missing;
            continue;
        }
        if ((opts.from && *date < *opts.from) || (opts.to && *opts.to < *date)) {
            ++out.dropped_out_of_range;
            continue;
        }
        if (!out.series.dates.empty() && !(out.series.dates.back() < *date)) {
            throw FormatError("dates are not strictly increasing", lineno);
        }
        out.series.dates.push_back(*date);
        for (std::size_t k = 0; k < row.size(); ++k) out.series.values[k].push_back(row[k]);
    }
    return out;
}

inline CsvLoadResult load_timeseries_csv(const std::string& path, const CsvLoadOptions& opts = {}) {
    std::ifstream is(path);
    if (!is) throw FormatError("cannot open CSV file '" + path + "'");
    return read_timeseries_csv(is, opts);
}

// D_t = S_t - S_{t-1}; the result is dated by the later observation.
inline TimeSeries difference(const TimeSeries& s) {
    if (s.length() < 2) throw ValidationError("difference needs at least two observations");
    TimeSeries out;
    out.names = s.names;
    out.dates.assign(s.dates.begin() + 1, s.dates.end());
    for (const auto& v : s.values) {
        std::vector<double> d(v.size() - 1);
        for (std::size_t t = 1; t < v.size(); ++t) d[t - 1] = v[t] - v[t - 1];
        out.values.push_back(std::move(d));
    }
    return out;
}

}  // namespace qcbm
