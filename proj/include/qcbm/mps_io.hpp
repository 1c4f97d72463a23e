#pragma once

#include <complex>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "qcbm/error.hpp"
#include "qcbm/format.hpp"
#include "qcbm/mps.hpp"

namespace qcbm {

// Text layout:
//   mps <n> real|complex
//   center <c>
//   bonds <chi_0> ... <chi_n>
//   then for each site k and physical index s, the chi_{k} x chi_{k+1} block
//   row-major, one value per line ("re im" for complex).
template <class Scalar>
void write_mps(std::ostream& os, const Mps<Scalar>& m) {
    m.validate();
    constexpr bool is_complex = !std::is_same_v<Scalar, double>;
    os << "mps " << m.n_sites() << ' ' << (is_complex ? "complex" : "real") << '\n';
    os << "center " << m.center << '\n';
    os << "bonds";
    for (auto d : m.bond_dims()) os << ' ' << d;
    os << '\n';
    for (const auto& t : m.tensors) {
        for (const auto& slice : t) {
            for (Eigen::Index r = 0; r < slice.rows(); ++r) {
                for (Eigen::Index c = 0; c < slice.cols(); ++c) {
                    if constexpr (is_complex) {
                        os << format_roundtrip(slice(r, c).real()) << ' ' << format_roundtrip(slice(r, c).imag()) << '\n';
                    } else {
                        os << format_roundtrip(slice(r, c)) << '\n';
                    }
                }
            }
        }
    }
}

template <class Scalar>
Mps<Scalar> read_mps(std::istream& is) {
    constexpr bool is_complex = !std::is_same_v<Scalar, double>;
    std::string line;
    std::size_t lineno = 0;
    const auto next = [&]() -> std::vector<std::string> {
        while (std::getline(is, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            std::istringstream ls(line);
            std::vector<std::string> tok;
            for (std::string t; ls >> t;) tok.push_back(t);
            return tok;
        }
        throw FormatError("unexpected end of MPS file", lineno);
    };

    auto tok = next();
    if (tok.size() != 3 || tok[0] != "mps") throw FormatError("expected 'mps <n> real|complex'", lineno);
    const auto n = parse_int(tok[1], lineno);
    if (n < 1 || n > kMaxBits) throw FormatError("MPS site count out of range", lineno);
    if (tok[2] != "real" && tok[2] != "complex") throw FormatError("unknown MPS dtype '" + tok[2] + "'", lineno);
    const bool file_complex = tok[2] == "complex";
    if (file_complex && !is_complex) throw FormatError("complex MPS cannot be read as real", lineno);

    tok = next();
    if (tok.size() != 2 || tok[0] != "center") throw FormatError("expected 'center <c>'", lineno);
    const auto center = parse_int(tok[1], lineno);

    tok = next();
    if (tok.empty() || tok[0] != "bonds" || static_cast<long long>(tok.size()) != n + 2) {
        throw FormatError("expected 'bonds' followed by n+1 dimensions", lineno);
    }
    std::vector<Eigen::Index> bonds;
    for (std::size_t i = 1; i < tok.size(); ++i) {
        const auto d = parse_int(tok[i], lineno);
        if (d < 1) throw FormatError("bond dimension must be >= 1", lineno);
        bonds.push_back(static_cast<Eigen::Index>(d));
    }

    Mps<Scalar> m;
    m.center = static_cast<int>(center);
    for (long long k = 0; k < n; ++k) {
        SiteTensor<Scalar> t;
        for (auto& slice : t) {
            slice.resize(bonds[static_cast<std::size_t>(k)], bonds[static_cast<std::size_t>(k) + 1]);
            for (Eigen::Index r = 0; r < slice.rows(); ++r) {
                for (Eigen::Index c = 0; c < slice.cols(); ++c) {
                    tok = next();
                    if (tok.size() != (file_complex ? 2u : 1u)) throw FormatError("wrong number of values on tensor line", lineno);
                    const double re = parse_double(tok[0], lineno);
                    if constexpr (is_complex) {
                        slice(r, c) = Scalar(re, file_complex ? parse_double(tok[1], lineno) : 0.0);
                    } else {
                        slice(r, c) = re;
                    }
                }
            }
        }
        m.tensors.push_back(std::move(t));
    }
    try {
        m.validate();
    } catch (const ValidationError& e) {
        throw FormatError(std::string("invalid MPS: ") + e.what(), lineno);
    }
    return m;
}

template <class Scalar>
void save_mps(const std::string& path, const Mps<Scalar>& m) {
    std::ofstream os(path);
    if (!os) throw FormatError("cannot open '" + path + "' for writing");
    write_mps(os, m);
    if (!os) throw FormatError("failed writing '" + path + "'");
}

template <class Scalar>
Mps<Scalar> load_mps(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw FormatError("cannot open MPS file '" + path + "'");
    return read_mps<Scalar>(is);
}

}  // namespace qcbm
