#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "qcbm/error.hpp"
#include "qcbm/gates.hpp"
#include "qcbm/kak.hpp"
#include "qcbm/mps.hpp"

namespace qcbm {

struct DecompositionResult {
    Circuit circuit;
    // fidelity[l] = |<psi_mps| circuit with l+1 layers |0>|^2
    std::vector<double> fidelity;
    // Layers replaced by identity because they would have lowered the fidelity.
    std::vector<int> skipped_layers;
};

namespace detail {

// Fills the columns not listed in `defined` with an orthonormal complement,
// then snaps the result to the nearest unitary.
inline Eigen::Matrix4cd complete_unitary(Eigen::Matrix4cd g, const std::vector<int>& defined) {
    if (defined.size() == 1 && defined.front() == 0) {
        // Only |00> is constrained. Use its Schmidt form v = sum_i l_i u_i (x) w_i
        // so that G = (U (x) W) * R, with R a rotation in the {|00>, |11>} plane.
        // Product columns then give purely local gates.
        Eigen::Matrix2cd v;
        for (int s = 0; s < 2; ++s)
            for (int x = 0; x < 2; ++x) v(s, x) = g(2 * s + x, 0);
        Eigen::JacobiSVD<Eigen::Matrix2cd> svd(v, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Eigen::Vector2d l = svd.singularValues() / svd.singularValues().norm();
        Eigen::Matrix4cd r = Eigen::Matrix4cd::Identity();
        r(0, 0) = l(0);
        r(3, 0) = l(1);
        r(0, 3) = -l(1);
        r(3, 3) = l(0);
        Eigen::Matrix4cd w = Eigen::Matrix4cd::Zero();
        const Eigen::Matrix2cd u = svd.matrixU(), vc = svd.matrixV().conjugate();
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) w.block<2, 2>(2 * i, 2 * j) = u(i, j) * vc;
        return w * r;
    }
    std::vector<Eigen::Vector4cd> basis;
    for (int c : defined) basis.push_back(g.col(c));
    for (int c = 0; c < 4; ++c) {
        if (std::find(defined.begin(), defined.end(), c) != defined.end()) continue;
        Eigen::Vector4cd best;
        double best_norm = -1.0;
        for (int e = 0; e < 4; ++e) {
            Eigen::Vector4cd v = Eigen::Vector4cd::Unit(e);
            for (const auto& b : basis) v -= b.dot(v) * b;
            const double nv = v.norm();
            if (nv > best_norm) {
                best_norm = nv;
                best = v / nv;
            }
        }
        basis.push_back(best);
        g.col(c) = best;
    }
    Eigen::JacobiSVD<Eigen::Matrix4cd> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

// Staircase G_0 .. G_{n-2} on qubit pairs (k, k+1), G_0 applied first, such
// that G_{n-2} ... G_0 |0...0> equals the bond-2 MPS `m` (center 0).
inline std::vector<Eigen::Matrix4cd> staircase_from_mps(const ComplexMps& m) {
    const int n = m.n_sites();
    std::vector<Eigen::Matrix4cd> gates;
    for (int k = 0; k + 1 < n; ++k) {
        const auto& b = m.tensors[static_cast<std::size_t>(k)];
        const Eigen::Index chi_l = b[0].rows();
        if (chi_l > 2 || b[0].cols() > 2) throw NumericalError("staircase_from_mps needs bond dimension <= 2");
        Eigen::Matrix4cd g = Eigen::Matrix4cd::Zero();
        std::vector<int> defined;
        for (Eigen::Index a = 0; a < chi_l; ++a) {
            const int col = 2 * static_cast<int>(a);
            defined.push_back(col);
            for (int s = 0; s < 2; ++s) {
                if (k + 2 < n) {
                    for (Eigen::Index x = 0; x < b[0].cols(); ++x) g(2 * s + static_cast<int>(x), col) = b[static_cast<std::size_t>(s)](a, x);
                } else {
                    const auto& last = m.tensors[static_cast<std::size_t>(k + 1)];
                    for (int x = 0; x < 2; ++x) {
                        g(2 * s + x, col) = (b[static_cast<std::size_t>(s)].row(a) * last[static_cast<std::size_t>(x)])(0, 0);
                    }
                }
            }
        }
        gates.push_back(complete_unitary(g, defined));
    }
    return gates;
}

inline double zero_overlap(const ComplexMps& m) {
    const double a = std::abs(amplitude(m, Bitstring{0}));
    return a * a / norm_squared(m);
}

}  // namespace detail

// Converts an MPS into `layers` staircases of nearest-neighbour SU4 gates.
// Each layer is the exact bond-2 circuit of the current residual state; the
// residual is then disentangled by that layer's inverse. Gates are listed in
// application order: the last extracted layer acts first on |0...0>.
template <class Scalar>
DecompositionResult mps_to_circuit(const Mps<Scalar>& mps, int layers) {
    if (layers < 1) throw ValidationError("mps_to_circuit: layers must be >= 1");
    const int n = mps.n_sites();
    if (n < 2) throw ValidationError("mps_to_circuit: need at least two sites");

    ComplexMps residual;
    if constexpr (std::is_same_v<Scalar, double>) {
        residual = normalize(complexify(mps));
    } else {
        residual = normalize(mps);
    }

    DecompositionResult out{Circuit(n), {}, {}};
    std::vector<std::vector<Eigen::Matrix4cd>> extracted;
    double fid_prev = detail::zero_overlap(residual);
    for (int layer = 0; layer < layers; ++layer) {
        const ComplexMps approx = canonicalize(truncate(residual, 1e-14, 2), 0);
        auto gates = detail::staircase_from_mps(approx);

        ComplexMps next = residual;
        for (int k = n - 2; k >= 0; --k) {
            next = apply_two_site_gate(next, k, Eigen::Matrix4cd(gates[static_cast<std::size_t>(k)].adjoint()), 1e-14);
        }
        next = normalize(std::move(next));
        const double fid = detail::zero_overlap(next);
        if (fid + 1e-12 < fid_prev) {
            gates.assign(static_cast<std::size_t>(n - 1), Eigen::Matrix4cd::Identity());
            out.skipped_layers.push_back(layer);
            out.fidelity.push_back(fid_prev);
        } else {
            residual = std::move(next);
            fid_prev = fid;
            out.fidelity.push_back(fid);
        }
        extracted.push_back(std::move(gates));
    }

    for (auto it = extracted.rbegin(); it != extracted.rend(); ++it) {
        for (int k = 0; k + 1 < n; ++k) {
            const auto kak = kak_decompose((*it)[static_cast<std::size_t>(k)]);
            out.circuit.add_gate(GateKind::SU4, k, k + 1, kak.theta);
        }
    }
    return out;
}

}  // namespace qcbm
