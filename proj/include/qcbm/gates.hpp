#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qcbm/error.hpp"
#include "qcbm/statevector.hpp"

namespace qcbm {

// Rotation convention everywhere: R_P(theta) = exp(-i * theta/2 * P).

enum class GateKind { U2, RXX, RYY, RZZ, SU4 };

enum class PauliAxis { XX, YY, ZZ };

inline constexpr int param_count(GateKind kind) {
    switch (kind) {
        case GateKind::U2: return 3;
        case GateKind::SU4: return 15;
        default: return 1;
    }
}

inline constexpr int target_count(GateKind kind) { return kind == GateKind::U2 ? 1 : 2; }

inline std::string_view kind_name(GateKind kind) {
    switch (kind) {
        case GateKind::U2: return "U2";
        case GateKind::RXX: return "RXX";
        case GateKind::RYY: return "RYY";
        case GateKind::RZZ: return "RZZ";
        case GateKind::SU4: return "SU4";
    }
    return "?";
}

inline GateKind parse_kind(std::string_view name) {
    if (name == "U2") return GateKind::U2;
    if (name == "RXX") return GateKind::RXX;
    if (name == "RYY") return GateKind::RYY;
    if (name == "RZZ") return GateKind::RZZ;
    if (name == "SU4") return GateKind::SU4;
    throw ValidationError("unknown gate kind '" + std::string(name) + "'");
}

inline Eigen::Matrix2cd rz_matrix(double theta) {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    m(0, 0) = std::polar(1.0, -theta / 2);
    m(1, 1) = std::polar(1.0, theta / 2);
    return m;
}

inline Eigen::Matrix2cd ry_matrix(double theta) {
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    Eigen::Matrix2cd m;
    m << c, -s, s, c;
    return m;
}

// ZYZ Euler form Rz(t2) * Ry(t1) * Rz(t0); t0 acts first. Global phase dropped.
inline Eigen::Matrix2cd u2_matrix(std::span<const double> theta) {
    return rz_matrix(theta[2]) * ry_matrix(theta[1]) * rz_matrix(theta[0]);
}

// Tensor product with `a` on the high bit of the 4x4 index.
inline Eigen::Matrix4cd kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
    Eigen::Matrix4cd m;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return m;
}

inline Eigen::Matrix4cd pauli_product(PauliAxis axis) {
    Eigen::Matrix2cd p;
    switch (axis) {
        case PauliAxis::XX: p << 0, 1, 1, 0; break;
        case PauliAxis::YY: p << 0, cplx(0, -1), cplx(0, 1), 0; break;
        case PauliAxis::ZZ: p << 1, 0, 0, -1; break;
    }
    return kron(p, p);
}

inline Eigen::Matrix4cd pauli_rotation_matrix(PauliAxis axis, double theta) {
    return std::cos(theta / 2) * Eigen::Matrix4cd::Identity() -
           cplx(0, std::sin(theta / 2)) * pauli_product(axis);
}

// Fifteen-parameter two-qubit gate, factors listed in application order:
//   U2(t0:2) x U2(t3:5), then RXX(t6) RYY(t7) RZZ(t8), then U2(t9:11) x U2(t12:14).
// The first U2 of each pair acts on the first target.
inline Eigen::Matrix4cd su4_matrix(std::span<const double> theta) {
    if (theta.size() != 15) throw ValidationError("su4_matrix needs 15 parameters");
    const Eigen::Matrix4cd first = kron(u2_matrix(theta.subspan(0, 3)), u2_matrix(theta.subspan(3, 3)));
    const Eigen::Matrix4cd core = pauli_rotation_matrix(PauliAxis::ZZ, theta[8]) *
                                  pauli_rotation_matrix(PauliAxis::YY, theta[7]) *
                                  pauli_rotation_matrix(PauliAxis::XX, theta[6]);
    const Eigen::Matrix4cd last = kron(u2_matrix(theta.subspan(9, 3)), u2_matrix(theta.subspan(12, 3)));
    return last * core * first;
}

inline Eigen::Matrix4cd two_qubit_matrix(GateKind kind, std::span<const double> theta) {
    switch (kind) {
        case GateKind::RXX: return pauli_rotation_matrix(PauliAxis::XX, theta[0]);
        case GateKind::RYY: return pauli_rotation_matrix(PauliAxis::YY, theta[0]);
        case GateKind::RZZ: return pauli_rotation_matrix(PauliAxis::ZZ, theta[0]);
        case GateKind::SU4: return su4_matrix(theta);
        default: throw ValidationError("not a two-qubit gate kind");
    }
}

struct GateSpec {
    GateKind kind = GateKind::U2;
    std::array<int, 2> targets{0, -1};
    std::size_t param_offset = 0;

    int n_targets() const { return target_count(kind); }
    int n_params() const { return param_count(kind); }
};

// Ordered gate list over a flat parameter vector. Gate g owns
// params[g.param_offset, g.param_offset + g.n_params()).
class Circuit {
public:
    explicit Circuit(int n_qubits = 1) : n_qubits_(n_qubits) {
        if (n_qubits < 1 || n_qubits > kMaxQubits) throw SizeError("n_qubits must be in [1, 24]");
    }

    int n_qubits() const { return n_qubits_; }
    const std::vector<GateSpec>& gates() const { return gates_; }
    const std::vector<double>& params() const { return params_; }
    std::vector<double>& params() { return params_; }
    std::size_t param_count() const { return params_.size(); }

    void set_params(std::vector<double> params) {
        if (params.size() != params_.size()) throw ValidationError("parameter count mismatch");
        params_ = std::move(params);
    }

    // Appends a gate whose parameters follow all existing ones.
    std::size_t add_gate(GateKind kind, int q0, int q1, std::span<const double> theta) {
        GateSpec g{kind, {q0, target_count(kind) == 2 ? q1 : -1}, params_.size()};
        check_targets(g);
        if (static_cast<int>(theta.size()) != qcbm::param_count(kind)) {
            throw ValidationError("wrong number of parameters for " + std::string(kind_name(kind)));
        }
        gates_.push_back(g);
        params_.insert(params_.end(), theta.begin(), theta.end());
        return gates_.size() - 1;
    }

    std::size_t add_gate(GateKind kind, int q0, int q1 = -1) {
        const std::vector<double> zeros(static_cast<std::size_t>(qcbm::param_count(kind)), 0.0);
        return add_gate(kind, q0, q1, zeros);
    }

    // Builds a circuit from explicit specs; checks that parameter slices tile the vector.
    static Circuit from_parts(int n_qubits, std::vector<GateSpec> gates, std::vector<double> params) {
        Circuit c(n_qubits);
        std::vector<int> owner(params.size(), -1);
        for (std::size_t i = 0; i < gates.size(); ++i) {
            const auto& g = gates[i];
            c.check_targets(g);
            if (g.param_offset + static_cast<std::size_t>(g.n_params()) > params.size()) {
                throw ValidationError("gate parameter slice exceeds parameter vector");
            }
            for (int k = 0; k < g.n_params(); ++k) {
                auto& o = owner[g.param_offset + static_cast<std::size_t>(k)];
                if (o != -1) throw ValidationError("gate parameter slices overlap");
                o = static_cast<int>(i);
            }
        }
        for (int o : owner) {
            if (o == -1) throw ValidationError("parameter not owned by any gate");
        }
        c.gates_ = std::move(gates);
        c.params_ = std::move(params);
        return c;
    }

    // Index of the gate owning parameter k.
    std::size_t gate_of_param(std::size_t k) const {
        for (std::size_t i = 0; i < gates_.size(); ++i) {
            const auto& g = gates_[i];
            if (k >= g.param_offset && k < g.param_offset + static_cast<std::size_t>(g.n_params())) return i;
        }
        throw IndexError("parameter index out of range");
    }

private:
    void check_targets(const GateSpec& g) const {
        for (int t = 0; t < g.n_targets(); ++t) {
            if (g.targets[static_cast<std::size_t>(t)] < 0 || g.targets[static_cast<std::size_t>(t)] >= n_qubits_) {
                throw IndexError("gate target out of range");
            }
        }
        if (g.n_targets() == 2 && g.targets[0] == g.targets[1]) throw IndexError("duplicate gate targets");
    }

    int n_qubits_;
    std::vector<GateSpec> gates_;
    std::vector<double> params_;
};

namespace detail {

inline void apply_gate(std::vector<cplx>& amps, const GateSpec& g, std::span<const double> params) {
    const auto theta = params.subspan(g.param_offset, static_cast<std::size_t>(g.n_params()));
    if (g.kind == GateKind::U2) {
        apply_1q(amps, u2_matrix(theta), g.targets[0]);
    } else {
        apply_2q(amps, two_qubit_matrix(g.kind, theta), g.targets[0], g.targets[1]);
    }
}

}  // namespace detail

// U(params)|0...0> for the circuit's gate list.
inline StateVector run_circuit(const Circuit& circuit, std::span<const double> params) {
    if (params.size() != circuit.param_count()) throw ValidationError("parameter count mismatch");
    std::vector<cplx> amps(std::size_t{1} << circuit.n_qubits(), cplx{0.0, 0.0});
    amps[0] = 1.0;
    for (const auto& g : circuit.gates()) detail::apply_gate(amps, g, params);
    return StateVector(circuit.n_qubits(), std::move(amps));
}

inline StateVector run_circuit(const Circuit& circuit) { return run_circuit(circuit, circuit.params()); }

}  // namespace qcbm
