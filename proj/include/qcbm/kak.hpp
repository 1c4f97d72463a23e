#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>

#include "qcbm/error.hpp"
#include "qcbm/gates.hpp"

namespace qcbm {

struct KakResult {
    std::array<double, 15> theta{};
    double global_phase = 0.0;
};

namespace detail {

// Bell basis with phases chosen so that SU(2) x SU(2) maps onto SO(4)
// and XX, YY, ZZ become diagonal.
inline Eigen::Matrix4cd magic_basis() {
    const double h = 1.0 / std::sqrt(2.0);
    const cplx i(0, 1);
    Eigen::Matrix4cd b;
    b << h, h * i, 0, 0,
         0, 0, h * i, h,
         0, 0, h * i, -h,
         h, -h * i, 0, 0;
    return b;
}

// ZYZ angles (t0, t1, t2) with Rz(t2) Ry(t1) Rz(t0) equal to `a` up to phase.
inline std::array<double, 3> zyz_angles(const Eigen::Matrix2cd& a) {
    const cplx det = a.determinant();
    const Eigen::Matrix2cd v = a * std::polar(1.0, -std::arg(det) / 2);
    const double c = std::abs(v(0, 0));
    const double s = std::abs(v(1, 0));
    const double t1 = 2.0 * std::atan2(s, c);
    const double sum = c > 1e-14 ? -2.0 * std::arg(v(0, 0)) : 0.0;
    const double diff = s > 1e-14 ? 2.0 * std::arg(v(1, 0)) : 0.0;
    return {(sum - diff) / 2, t1, (sum + diff) / 2};
}

// Splits k = a (x) b where k is a tensor product of single-qubit unitaries.
inline std::pair<Eigen::Matrix2cd, Eigen::Matrix2cd> split_local(const Eigen::Matrix4cd& k) {
    Eigen::Index r = 0, c = 0;
    k.cwiseAbs().maxCoeff(&r, &c);
    const int a_row = static_cast<int>(r / 2), b_row = static_cast<int>(r % 2);
    const int a_col = static_cast<int>(c / 2), b_col = static_cast<int>(c % 2);
    Eigen::Matrix2cd b = k.block<2, 2>(2 * a_row, 2 * a_col);
    b /= std::sqrt(b.determinant());
    Eigen::Matrix2cd a;
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) a(x, y) = k(2 * x + b_row, 2 * y + b_col) / b(b_row, b_col);
    return {a, b};
}

inline double max_entry_error(const Eigen::Matrix4cd& a, const Eigen::Matrix4cd& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

// Phase phi minimizing |e^{i phi} r - u|.
inline double relative_phase(const Eigen::Matrix4cd& r, const Eigen::Matrix4cd& u) {
    return std::arg((r.adjoint() * u).trace());
}

}  // namespace detail

// Cartan decomposition of a two-qubit unitary into the fifteen-parameter
// SU4 gate form: su4_matrix(theta) * exp(i * global_phase) == u.
inline KakResult kak_decompose(const Eigen::Matrix4cd& u) {
    if (!detail::is_unitary(u, 1e-10)) throw ValidationError("kak_decompose: matrix is not unitary");

    KakResult out;
    // Scalar multiples of the identity map to all-zero angles.
    if (detail::max_entry_error(u, u(0, 0) * Eigen::Matrix4cd::Identity()) < 1e-12) {
        out.global_phase = std::arg(u(0, 0));
        return out;
    }

    const Eigen::Matrix4cd magic = detail::magic_basis();
    const Eigen::Matrix4cd magic_inv = magic.adjoint();
    const Eigen::Matrix4cd u_special = u * std::polar(1.0, -std::arg(u.determinant()) / 4);
    const Eigen::Matrix4cd up = magic_inv * u_special * magic;
    const Eigen::Matrix4cd m = up.transpose() * up;

    // Diagonal entries of XX, YY, ZZ in the magic basis.
    Eigen::Vector4d dxx, dyy, dzz;
    for (int k = 0; k < 4; ++k) {
        const Eigen::Vector4cd col = magic.col(k);
        dxx(k) = (col.adjoint() * pauli_product(PauliAxis::XX) * col)(0).real();
        dyy(k) = (col.adjoint() * pauli_product(PauliAxis::YY) * col)(0).real();
        dzz(k) = (col.adjoint() * pauli_product(PauliAxis::ZZ) * col)(0).real();
    }

    // Re(m) and Im(m) commute; a random real combination separates their
    // joint eigenspaces. Degenerate draws are retried with the next sample.
    std::mt19937_64 rng(0x6b616b5f72657472ULL);
    std::uniform_real_distribution<double> mix(0.5, 2.0);
    double best_err = 1e300;
    for (int attempt = 0; attempt < 32; ++attempt) {
        const Eigen::Matrix4d sym = m.real() + mix(rng) * m.imag();
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(sym);
        Eigen::Matrix4d o = eig.eigenvectors();
        if (o.determinant() < 0) o.col(0) *= -1.0;

        const Eigen::Matrix4cd d = o.transpose().cast<cplx>() * m * o.cast<cplx>();
        Eigen::Matrix4cd off = d;
        off.diagonal().setZero();
        if (off.cwiseAbs().maxCoeff() > 1e-9) continue;

        Eigen::Vector4d phases;
        for (int k = 0; k < 4; ++k) phases(k) = std::arg(d(k, k)) / 2;
        Eigen::Vector4cd f_inv;
        for (int k = 0; k < 4; ++k) f_inv(k) = std::polar(1.0, -phases(k));

        Eigen::Matrix4cd q1c = up * o.cast<cplx>() * f_inv.asDiagonal();
        Eigen::Matrix4d q1 = q1c.real();
        if (q1.determinant() < 0) {
            phases(0) += M_PI;
            q1.col(0) *= -1.0;
        }

        const Eigen::Matrix4cd k_last = magic * q1.cast<cplx>() * magic_inv;
        const Eigen::Matrix4cd k_first = magic * o.transpose().cast<cplx>() * magic_inv;
        const auto [a_first, b_first] = detail::split_local(k_first);
        const auto [a_last, b_last] = detail::split_local(k_last);

        // phases = phi0 - (t6 dxx + t7 dyy + t8 dzz)/2 with orthogonal +-1 vectors.
        const double t6 = -phases.dot(dxx) / 2;
        const double t7 = -phases.dot(dyy) / 2;
        const double t8 = -phases.dot(dzz) / 2;

        std::array<double, 15> theta{};
        const auto put = [&theta](int off, const std::array<double, 3>& a) {
            for (int i = 0; i < 3; ++i) theta[static_cast<std::size_t>(off + i)] = a[static_cast<std::size_t>(i)];
        };
        put(0, detail::zyz_angles(a_first));
        put(3, detail::zyz_angles(b_first));
        theta[6] = t6;
        theta[7] = t7;
        theta[8] = t8;
        put(9, detail::zyz_angles(a_last));
        put(12, detail::zyz_angles(b_last));

        const Eigen::Matrix4cd rec = su4_matrix(theta);
        const double phase = detail::relative_phase(rec, u);
        const double err = detail::max_entry_error(std::polar(1.0, phase) * rec, u);
        if (err < 1e-10) {
            out.theta = theta;
            out.global_phase = phase;
            return out;
        }
        if (err < best_err) {
            best_err = err;
            out.theta = theta;
            out.global_phase = phase;
        }
    }
    if (best_err < 1e-8) return out;
    throw NumericalError("kak_decompose did not converge");
}

}  // namespace qcbm
