#pragma once

#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qcbm/data.hpp"
#include "qcbm/format.hpp"

namespace qcbm {

// One bitstring per line, most significant qubit first. Optional header
// comments carry a non-identity feature order and quantizer metadata:
//   # feature_order=0,1,2,5,4,3,6,7,8
//   # quantizer=<x_min>:<x_max>:<n_bits>;...
inline void write_dataset(std::ostream& os, const BinaryDataset& data) {
    std::vector<int> identity(static_cast<std::size_t>(data.n_features));
    std::iota(identity.begin(), identity.end(), 0);
    if (data.feature_order != identity) {
        os << "# feature_order=";
        for (std::size_t i = 0; i < data.feature_order.size(); ++i) os << (i ? "," : "") << data.feature_order[i];
        os << '\n';
    }
    if (!data.quantizers.empty()) {
        os << "# quantizer=";
        for (std::size_t i = 0; i < data.quantizers.size(); ++i) {
            const auto& q = data.quantizers[i];
            os << (i ? ";" : "") << format_roundtrip(q.x_min) << ':' << format_roundtrip(q.x_max) << ':' << q.n_bits;
        }
        os << '\n';
    }
    for (auto x : data.samples) os << to_string(x, data.n_features) << '\n';
}

namespace detail {

inline std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

}  // namespace detail

inline BinaryDataset read_dataset(std::istream& is) {
    std::string line;
    std::size_t lineno = 0;
    std::vector<int> order;
    std::vector<Quantizer> quantizers;
    std::vector<Bitstring> rows;
    int width = -1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto body = line.substr(1);
            const auto eq = body.find('=');
            if (eq == std::string::npos) continue;
            std::string key = body.substr(0, eq);
            key.erase(0, key.find_first_not_of(' '));
            const std::string value = body.substr(eq + 1);
            if (key == "feature_order") {
                for (const auto& t : detail::split_on(value, ',')) order.push_back(static_cast<int>(parse_int(t, lineno)));
            } else if (key == "quantizer") {
                for (const auto& t : detail::split_on(value, ';')) {
                    const auto f = detail::split_on(t, ':');
                    if (f.size() != 3) throw FormatError("quantizer needs x_min:x_max:n_bits", lineno);
                    quantizers.push_back({parse_double(f[0], lineno), parse_double(f[1], lineno),
                                          static_cast<int>(parse_int(f[2], lineno))});
                }
            }
            continue;
        }
        if (width == -1) width = static_cast<int>(line.size());
        if (static_cast<int>(line.size()) != width) throw FormatError("inconsistent bitstring length", lineno);
        try {
            rows.push_back(parse_bitstring(line));
        } catch (const ValidationError& e) {
            throw FormatError(e.what(), lineno);
        }
    }
    if (width == -1) throw FormatError("dataset file has no samples", lineno);
    BinaryDataset data(width, std::move(rows));
    if (!order.empty()) {
        if (static_cast<int>(order.size()) != width || !is_permutation_of_iota(order)) {
            throw FormatError("feature_order is not a permutation of the columns");
        }
        data.feature_order = order;
    }
    data.quantizers = std::move(quantizers);
    return data;
}

inline BinaryDataset load_dataset(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw FormatError("cannot open dataset file '" + path + "'");
    return read_dataset(is);
}

inline void save_dataset(const std::string& path, const BinaryDataset& data) {
    std::ofstream os(path);
    if (!os) throw FormatError("cannot write dataset file '" + path + "'");
    write_dataset(os, data);
}

}  // namespace qcbm
