#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qcbm/bits.hpp"
#include "qcbm/error.hpp"

namespace qcbm {

using cplx = std::complex<double>;

inline constexpr int kMaxQubits = 24;

// Dense n-qubit state. Qubit 0 is the least significant bit of the amplitude index.
class StateVector {
public:
    StateVector(int n_qubits, std::vector<cplx> amplitudes)
        : n_qubits_(n_qubits), amplitudes_(std::move(amplitudes)) {
        if (n_qubits < 1 || n_qubits > kMaxQubits) {
            throw SizeError("n_qubits must be in [1, 24]");
        }
        if (amplitudes_.size() != (std::size_t{1} << n_qubits)) {
            throw ValidationError("amplitude count must be 2^n_qubits");
        }
    }

    int n_qubits() const { return n_qubits_; }
    std::size_t dim() const { return amplitudes_.size(); }
    std::span<const cplx> amplitudes() const { return amplitudes_; }
    const cplx& operator[](std::size_t i) const { return amplitudes_[i]; }

    double norm_squared() const {
        double s = 0.0;
        for (const auto& a : amplitudes_) s += std::norm(a);
        return s;
    }

private:
    int n_qubits_;
    std::vector<cplx> amplitudes_;
};

// Probability of each basis index under the Born rule.
struct OutcomeDistribution {
    int n_qubits = 0;
    std::vector<double> probabilities;
};

inline StateVector zero_state(int n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) throw SizeError("n_qubits must be in [1, 24]");
    std::vector<cplx> amps(std::size_t{1} << n_qubits, cplx{0.0, 0.0});
    amps[0] = 1.0;
    return StateVector(n_qubits, std::move(amps));
}

namespace detail {

// In-place kernels used by the simulator hot paths. No validation.

inline void apply_1q(std::vector<cplx>& amps, const Eigen::Matrix2cd& u, int q) {
    const std::size_t stride = std::size_t{1} << q;
    const std::size_t dim = amps.size();
    const cplx u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            const cplx a0 = amps[i];
            const cplx a1 = amps[i + stride];
            amps[i] = u00 * a0 + u01 * a1;
            amps[i + stride] = u10 * a0 + u11 * a1;
        }
    }
}

// Local index of a 4x4 gate is 2*bit(first) + bit(second).
inline void apply_2q(std::vector<cplx>& amps, const Eigen::Matrix4cd& u, int first, int second) {
    const std::size_t m_first = std::size_t{1} << first;
    const std::size_t m_second = std::size_t{1} << second;
    const std::size_t lo = std::min(m_first, m_second);
    const std::size_t hi = std::max(m_first, m_second);
    const std::size_t dim = amps.size();
    cplx m[16];
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) m[4 * r + c] = u(r, c);
    for (std::size_t k = 0; k < dim / 4; ++k) {
        // Insert zero bits at positions lo and hi.
        std::size_t i = k;
        i = ((i & ~(lo - 1)) << 1) | (i & (lo - 1));
        i = ((i & ~(hi - 1)) << 1) | (i & (hi - 1));
        const std::size_t idx[4] = {i, i | m_second, i | m_first, i | m_first | m_second};
        const cplx a[4] = {amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]};
        for (int r = 0; r < 4; ++r) {
            amps[idx[r]] = m[4 * r] * a[0] + m[4 * r + 1] * a[1] + m[4 * r + 2] * a[2] + m[4 * r + 3] * a[3];
        }
    }
}

inline bool is_unitary(const Eigen::MatrixXcd& u, double tol) {
    if (u.rows() != u.cols()) return false;
    const Eigen::MatrixXcd d = u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols());
    return d.cwiseAbs().maxCoeff() <= tol;
}

}  // namespace detail

// Applies a 1- or 2-qubit unitary. For two targets, the first target is the
// high bit of the 4x4 matrix index.
inline StateVector apply_unitary(const StateVector& state, const Eigen::MatrixXcd& u,
                                 std::span<const int> targets) {
    const int k = static_cast<int>(targets.size());
    if (k != 1 && k != 2) throw ValidationError("apply_unitary supports 1 or 2 targets");
    if (u.rows() != (1 << k) || u.cols() != (1 << k)) throw ValidationError("matrix size does not match target count");
    for (int t : targets) {
        if (t < 0 || t >= state.n_qubits()) throw IndexError("target qubit out of range");
    }
    if (k == 2 && targets[0] == targets[1]) throw IndexError("duplicate target qubits");
    if (!detail::is_unitary(u, 1e-10)) throw ValidationError("matrix is not unitary");

    std::vector<cplx> amps(state.amplitudes().begin(), state.amplitudes().end());
    if (k == 1) {
        detail::apply_1q(amps, Eigen::Matrix2cd(u), targets[0]);
    } else {
        detail::apply_2q(amps, Eigen::Matrix4cd(u), targets[0], targets[1]);
    }
    return StateVector(state.n_qubits(), std::move(amps));
}

inline StateVector apply_unitary(const StateVector& state, const Eigen::MatrixXcd& u,
                                 std::initializer_list<int> targets) {
    return apply_unitary(state, u, std::span<const int>(targets.begin(), targets.size()));
}

inline OutcomeDistribution born_probabilities(const StateVector& state) {
    OutcomeDistribution d{state.n_qubits(), std::vector<double>(state.dim())};
    for (std::size_t i = 0; i < state.dim(); ++i) d.probabilities[i] = std::norm(state[i]);
    return d;
}

// Draws i.i.d. outcomes by inverse-CDF lookup.
inline std::vector<Bitstring> sample(std::span<const double> probabilities, std::size_t shots,
                                     std::uint64_t seed) {
    if (shots == 0) throw ValidationError("shots must be >= 1");
    std::vector<double> cdf(probabilities.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        acc += probabilities[i];
        cdf[i] = acc;
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, acc);
    std::vector<Bitstring> out(shots);
    for (auto& x : out) {
        const double u = uni(rng);
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        auto idx = static_cast<std::size_t>(it - cdf.begin());
        if (it == cdf.end()) {
            // u == total mass after rounding; fall back to the last supported outcome.
            idx = probabilities.size() - 1;
            while (idx > 0 && probabilities[idx] == 0.0) --idx;
        }
        x = idx;
    }
    return out;
}

inline std::vector<Bitstring> sample(const StateVector& state, std::size_t shots, std::uint64_t seed) {
    return sample(born_probabilities(state).probabilities, shots, seed);
}

}  // namespace qcbm
