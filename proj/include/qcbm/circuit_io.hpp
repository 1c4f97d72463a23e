#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qcbm/format.hpp"
#include "qcbm/gates.hpp"

namespace qcbm {

// Text layout:
//   n_qubits <n>
//   gates <g>
//   KIND q_i [q_j] param_offset      (g lines)
//   params <p>
//   <value>                          (p lines, shortest round-trip decimals)
inline void write_circuit(std::ostream& os, const Circuit& c) {
    os << "n_qubits " << c.n_qubits() << '\n';
    os << "gates " << c.gates().size() << '\n';
    for (const auto& g : c.gates()) {
        os << kind_name(g.kind) << ' ' << g.targets[0];
        if (g.n_targets() == 2) os << ' ' << g.targets[1];
        os << ' ' << g.param_offset << '\n';
    }
    os << "params " << c.param_count() << '\n';
    for (double p : c.params()) os << format_roundtrip(p) << '\n';
}

inline std::string circuit_to_string(const Circuit& c) {
    std::ostringstream os;
    write_circuit(os, c);
    return os.str();
}

inline Circuit read_circuit(std::istream& is) {
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
        throw FormatError("unexpected end of circuit file", lineno);
    };
    const auto expect = [&](const char* key) {
        auto tok = next();
        if (tok.size() != 2 || tok[0] != key) throw FormatError(std::string("expected '") + key + "'", lineno);
        return parse_int(tok[1], lineno);
    };

    const auto n = static_cast<int>(expect("n_qubits"));
    const auto n_gates = expect("gates");
    if (n_gates < 0) throw FormatError("negative gate count", lineno);
    std::vector<GateSpec> gates;
    gates.reserve(static_cast<std::size_t>(n_gates));
    for (long long i = 0; i < n_gates; ++i) {
        auto tok = next();
        if (tok.empty()) throw FormatError("empty gate line", lineno);
        GateSpec g;
        try {
            g.kind = parse_kind(tok[0]);
        } catch (const ValidationError& e) {
            throw FormatError(e.what(), lineno);
        }
        const std::size_t want = static_cast<std::size_t>(g.n_targets()) + 2;
        if (tok.size() != want) throw FormatError("wrong field count for gate", lineno);
        g.targets[0] = static_cast<int>(parse_int(tok[1], lineno));
        if (g.n_targets() == 2) g.targets[1] = static_cast<int>(parse_int(tok[2], lineno));
        const auto off = parse_int(tok.back(), lineno);
        if (off < 0) throw FormatError("negative parameter offset", lineno);
        g.param_offset = static_cast<std::size_t>(off);
        gates.push_back(g);
    }
    const auto n_params = expect("params");
    if (n_params < 0) throw FormatError("negative parameter count", lineno);
    std::vector<double> params;
    params.reserve(static_cast<std::size_t>(n_params));
    for (long long i = 0; i < n_params; ++i) {
        auto tok = next();
        if (tok.size() != 1) throw FormatError("expected one value per parameter line", lineno);
        params.push_back(parse_double(tok[0], lineno));
    }
    try {
        return Circuit::from_parts(n, std::move(gates), std::move(params));
    } catch (const std::logic_error& e) {
        throw FormatError(std::string("inconsistent circuit: ") + e.what(), lineno);
    }
}

inline Circuit circuit_from_string(const std::string& s) {
    std::istringstream is(s);
    return read_circuit(is);
}

}  // namespace qcbm
