#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "qcbm/bits.hpp"
#include "qcbm/error.hpp"

namespace qcbm {

template <class Scalar>
using DynMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Rank-3 site tensor (left bond, physical, right bond) stored as one
// left x right matrix per physical index.
template <class Scalar>
using SiteTensor = std::array<DynMatrix<Scalar>, 2>;

// Open-boundary matrix product state over n qubits. Site k carries qubit k.
// `center` is the orthogonality center: sites left of it are left-isometries,
// sites right of it are right-isometries.
template <class Scalar>
struct Mps {
    std::vector<SiteTensor<Scalar>> tensors;
    int center = 0;

    int n_sites() const { return static_cast<int>(tensors.size()); }
    Eigen::Index left_dim(int k) const { return tensors[static_cast<std::size_t>(k)][0].rows(); }
    Eigen::Index right_dim(int k) const { return tensors[static_cast<std::size_t>(k)][0].cols(); }

    // chi_0 .. chi_n with chi_0 = chi_n = 1.
    std::vector<Eigen::Index> bond_dims() const {
        std::vector<Eigen::Index> out;
        if (tensors.empty()) return out;
        out.push_back(left_dim(0));
        for (int k = 0; k < n_sites(); ++k) out.push_back(right_dim(k));
        return out;
    }

    Eigen::Index max_bond() const {
        const auto d = bond_dims();
        return d.empty() ? 0 : *std::max_element(d.begin(), d.end());
    }

    void validate() const {
        if (tensors.empty()) throw ValidationError("MPS has no sites");
        if (left_dim(0) != 1 || right_dim(n_sites() - 1) != 1) throw ValidationError("MPS boundary bonds must be 1");
        for (int k = 0; k < n_sites(); ++k) {
            const auto& t = tensors[static_cast<std::size_t>(k)];
            if (t[0].rows() != t[1].rows() || t[0].cols() != t[1].cols()) {
                throw ValidationError("physical slices of a site tensor differ in shape");
            }
            if (k + 1 < n_sites() && right_dim(k) != left_dim(k + 1)) throw ValidationError("bond dimension mismatch");
        }
        if (center < 0 || center >= n_sites()) throw ValidationError("canonical center out of range");
    }
};

using RealMps = Mps<double>;
using ComplexMps = Mps<std::complex<double>>;

inline ComplexMps complexify(const RealMps& m) {
    ComplexMps out;
    out.center = m.center;
    for (const auto& t : m.tensors) out.tensors.push_back({t[0].template cast<std::complex<double>>(),
                                                           t[1].template cast<std::complex<double>>()});
    return out;
}

template <class Scalar>
Mps<Scalar> product_state_mps(Bitstring x, int n) {
    if (n < 1 || n > kMaxBits) throw ValidationError("product_state_mps: bad site count");
    Mps<Scalar> m;
    for (int k = 0; k < n; ++k) {
        SiteTensor<Scalar> t{DynMatrix<Scalar>::Zero(1, 1), DynMatrix<Scalar>::Zero(1, 1)};
        t[static_cast<std::size_t>(bit_at(x, k))](0, 0) = Scalar(1);
        m.tensors.push_back(t);
    }
    return m;
}

// Uniform superposition over all 2^n bitstrings (bond dimension 1).
template <class Scalar>
Mps<Scalar> uniform_mps(int n) {
    Mps<Scalar> m;
    const double a = 1.0 / std::sqrt(2.0);
    for (int k = 0; k < n; ++k) m.tensors.push_back({DynMatrix<Scalar>::Constant(1, 1, Scalar(a)),
                                                     DynMatrix<Scalar>::Constant(1, 1, Scalar(a))});
    return m;
}

template <class Scalar>
Scalar amplitude(const Mps<Scalar>& m, Bitstring x) {
    DynMatrix<Scalar> row = m.tensors[0][static_cast<std::size_t>(bit_at(x, 0))];
    for (int k = 1; k < m.n_sites(); ++k) row = row * m.tensors[static_cast<std::size_t>(k)][static_cast<std::size_t>(bit_at(x, k))];
    return row(0, 0);
}

// <a|b>
template <class Scalar>
Scalar overlap(const Mps<Scalar>& a, const Mps<Scalar>& b) {
    if (a.n_sites() != b.n_sites()) throw ValidationError("overlap: site counts differ");
    DynMatrix<Scalar> env = DynMatrix<Scalar>::Ones(1, 1);
    for (int k = 0; k < a.n_sites(); ++k) {
        const auto& ta = a.tensors[static_cast<std::size_t>(k)];
        const auto& tb = b.tensors[static_cast<std::size_t>(k)];
        env = (ta[0].adjoint() * env * tb[0] + ta[1].adjoint() * env * tb[1]).eval();
    }
    return env(0, 0);
}

template <class Scalar>
double norm_squared(const Mps<Scalar>& m) {
    return std::real(std::complex<double>(overlap(m, m)));
}

// Born probability of x; the MPS norm is divided out.
template <class Scalar>
double mps_probability(const Mps<Scalar>& m, Bitstring x) {
    if (m.n_sites() < kMaxBits && (x >> m.n_sites()) != 0) throw ValidationError("bitstring longer than the MPS");
    const double a = std::abs(std::complex<double>(amplitude(m, x)));
    return a * a / norm_squared(m);
}

template <class Scalar>
double mps_probability(const Mps<Scalar>& m, std::span<const std::uint8_t> bits) {
    if (static_cast<int>(bits.size()) != m.n_sites()) throw ValidationError("bitstring length does not match MPS");
    Bitstring x = 0;
    for (std::size_t k = 0; k < bits.size(); ++k)
        if (bits[k]) x |= Bitstring{1} << k;
    return mps_probability(m, x);
}

// Dense amplitudes, index bit k = qubit k. Intended for n <= 24.
template <class Scalar>
std::vector<std::complex<double>> to_dense(const Mps<Scalar>& m) {
    const int n = m.n_sites();
    if (n > 24) throw SizeError("to_dense supports at most 24 sites");
    // rows[x] = product of the first k site matrices along prefix x.
    std::vector<DynMatrix<Scalar>> rows{DynMatrix<Scalar>::Ones(1, 1)};
    for (int k = 0; k < n; ++k) {
        const auto& t = m.tensors[static_cast<std::size_t>(k)];
        std::vector<DynMatrix<Scalar>> next(rows.size() * 2);
        for (std::size_t x = 0; x < rows.size(); ++x) {
            next[x] = rows[x] * t[0];
            next[x + rows.size()] = rows[x] * t[1];
        }
        rows = std::move(next);
    }
    std::vector<std::complex<double>> out(rows.size());
    for (std::size_t x = 0; x < rows.size(); ++x) out[x] = std::complex<double>(rows[x](0, 0));
    return out;
}

namespace detail {

template <class Scalar>
DynMatrix<Scalar> stack_rows(const SiteTensor<Scalar>& t) {
    DynMatrix<Scalar> m(2 * t[0].rows(), t[0].cols());
    m << t[0], t[1];
    return m;
}

template <class Scalar>
DynMatrix<Scalar> stack_cols(const SiteTensor<Scalar>& t) {
    DynMatrix<Scalar> m(t[0].rows(), 2 * t[0].cols());
    m << t[0], t[1];
    return m;
}

template <class Scalar>
SiteTensor<Scalar> unstack_rows(const DynMatrix<Scalar>& m) {
    const auto l = m.rows() / 2;
    return {m.topRows(l), m.bottomRows(l)};
}

template <class Scalar>
SiteTensor<Scalar> unstack_cols(const DynMatrix<Scalar>& m) {
    const auto r = m.cols() / 2;
    return {m.leftCols(r), m.rightCols(r)};
}

template <class Scalar>
struct Svd {
    DynMatrix<Scalar> u;
    Eigen::VectorXd s;
    DynMatrix<Scalar> v;  // m ~= u * diag(s) * v^dagger
    double discarded_weight = 0.0;
};

// Thin SVD keeping singular values with s_i^2 / sum s^2 >= cutoff (at least
// one), at most max_bond of them. The largest-magnitude entry of every left
// singular vector is made real positive so results are reproducible.
template <class Scalar>
Svd<Scalar> truncated_svd(const DynMatrix<Scalar>& m, double cutoff, Eigen::Index max_bond) {
    Eigen::BDCSVD<DynMatrix<Scalar>> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd s = svd.singularValues().template cast<double>();
    const double total = s.squaredNorm();
    // Singular values come sorted in decreasing order.
    Eigen::Index keep = s.size();
    if (cutoff > 0.0 && total > 0.0) {
        keep = 0;
        while (keep < s.size() && s(keep) * s(keep) / total >= cutoff) ++keep;
    }
    if (max_bond > 0) keep = std::min(keep, max_bond);
    keep = std::max<Eigen::Index>(keep, 1);
    Svd<Scalar> out{svd.matrixU().leftCols(keep), s.head(keep), svd.matrixV().leftCols(keep), 0.0};
    out.discarded_weight = total > 0.0 ? s.tail(s.size() - keep).squaredNorm() / total : 0.0;
    for (Eigen::Index j = 0; j < keep; ++j) {
        Eigen::Index i_max = 0;
        out.u.col(j).cwiseAbs().maxCoeff(&i_max);
        const Scalar pivot = out.u(i_max, j);
        const double mag = std::abs(pivot);
        if (mag > 0.0) {
            const Scalar phase = Eigen::numext::conj(pivot) / static_cast<Scalar>(mag);
            out.u.col(j) *= phase;
            out.v.col(j) *= phase;
        }
    }
    return out;
}

template <class Scalar>
DynMatrix<Scalar> thin_q(const DynMatrix<Scalar>& m, DynMatrix<Scalar>& r_out) {
    Eigen::HouseholderQR<DynMatrix<Scalar>> qr(m);
    const Eigen::Index k = std::min(m.rows(), m.cols());
    DynMatrix<Scalar> q = qr.householderQ() * DynMatrix<Scalar>::Identity(m.rows(), k);
    r_out = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
    return q;
}

// Makes site k a left isometry and pushes the remainder into site k+1.
template <class Scalar>
void left_orthonormalize(Mps<Scalar>& m, int k) {
    auto& t = m.tensors[static_cast<std::size_t>(k)];
    auto& next = m.tensors[static_cast<std::size_t>(k + 1)];
    DynMatrix<Scalar> r;
    const DynMatrix<Scalar> q = thin_q(stack_rows(t), r);
    t = unstack_rows(q);
    next[0] = (r * next[0]).eval();
    next[1] = (r * next[1]).eval();
}

// Makes site k a right isometry and pushes the remainder into site k-1.
template <class Scalar>
void right_orthonormalize(Mps<Scalar>& m, int k) {
    auto& t = m.tensors[static_cast<std::size_t>(k)];
    auto& prev = m.tensors[static_cast<std::size_t>(k - 1)];
    DynMatrix<Scalar> r;
    const DynMatrix<Scalar> q = thin_q(DynMatrix<Scalar>(stack_cols(t).adjoint()), r);
    t = unstack_cols(DynMatrix<Scalar>(q.adjoint()));
    const DynMatrix<Scalar> l = r.adjoint();
    prev[0] = (prev[0] * l).eval();
    prev[1] = (prev[1] * l).eval();
}

}  // namespace detail

// Gauge transformation that moves the orthogonality center to `center`.
// The represented state is unchanged.
template <class Scalar>
Mps<Scalar> canonicalize(Mps<Scalar> m, int center) {
    m.validate();
    if (center < 0 || center >= m.n_sites()) throw IndexError("canonicalize: center out of range");
    for (int k = 0; k < center; ++k) detail::left_orthonormalize(m, k);
    for (int k = m.n_sites() - 1; k > center; --k) detail::right_orthonormalize(m, k);
    m.center = center;
    return m;
}

template <class Scalar>
Mps<Scalar> normalize(Mps<Scalar> m) {
    const double n2 = norm_squared(m);
    if (!(n2 > 0.0)) throw NumericalError("cannot normalize a zero MPS");
    const Scalar f = static_cast<Scalar>(1.0 / std::sqrt(n2));
    auto& t = m.tensors[static_cast<std::size_t>(m.center)];
    t[0] *= f;
    t[1] *= f;
    return m;
}

// Left-to-right SVD sweep dropping singular values with s^2/sum(s^2) < cutoff
// and capping bonds at max_bond (0 = no cap). Returns a normalized MPS with
// its center on the last site. discarded, when given, receives the summed
// discarded weight over all bonds.
template <class Scalar>
Mps<Scalar> truncate(const Mps<Scalar>& in, double cutoff, Eigen::Index max_bond = 0, double* discarded = nullptr) {
    Mps<Scalar> m = canonicalize(in, 0);
    double total_discarded = 0.0;
    for (int k = 0; k + 1 < m.n_sites(); ++k) {
        auto& t = m.tensors[static_cast<std::size_t>(k)];
        auto& next = m.tensors[static_cast<std::size_t>(k + 1)];
        auto svd = detail::truncated_svd(detail::stack_rows(t), cutoff, max_bond);
        total_discarded += svd.discarded_weight;
        t = detail::unstack_rows(svd.u);
        const DynMatrix<Scalar> sv = svd.s.template cast<Scalar>().asDiagonal() * svd.v.adjoint();
        next[0] = (sv * next[0]).eval();
        next[1] = (sv * next[1]).eval();
    }
    m.center = m.n_sites() - 1;
    if (discarded) *discarded = total_discarded;
    return normalize(std::move(m));
}

// Applies a two-qubit gate on sites (k, k+1); gate index is 2*bit(k) + bit(k+1).
// The center ends on site k+1.
template <class Scalar>
Mps<Scalar> apply_two_site_gate(const Mps<Scalar>& in, int k, const Eigen::Matrix<Scalar, 4, 4>& gate,
                                double cutoff = 1e-16) {
    if (k < 0 || k + 1 >= in.n_sites()) throw IndexError("apply_two_site_gate: site out of range");
    Mps<Scalar> m = canonicalize(in, k);
    auto& a = m.tensors[static_cast<std::size_t>(k)];
    auto& b = m.tensors[static_cast<std::size_t>(k + 1)];
    DynMatrix<Scalar> theta[2][2];
    for (int s1 = 0; s1 < 2; ++s1)
        for (int s2 = 0; s2 < 2; ++s2) theta[s1][s2] = a[static_cast<std::size_t>(s1)] * b[static_cast<std::size_t>(s2)];
    const auto l = a[0].rows(), r = b[0].cols();
    DynMatrix<Scalar> big = DynMatrix<Scalar>::Zero(2 * l, 2 * r);
    for (int t1 = 0; t1 < 2; ++t1)
        for (int t2 = 0; t2 < 2; ++t2)
            for (int s1 = 0; s1 < 2; ++s1)
                for (int s2 = 0; s2 < 2; ++s2) {
                    const Scalar g = gate(2 * t1 + t2, 2 * s1 + s2);
                    if (g != Scalar(0)) big.block(t1 * l, t2 * r, l, r) += g * theta[s1][s2];
                }
    auto svd = detail::truncated_svd(big, cutoff, 0);
    a = detail::unstack_rows(svd.u);
    const DynMatrix<Scalar> sv = svd.s.template cast<Scalar>().asDiagonal() * svd.v.adjoint();
    b = detail::unstack_cols(sv);
    m.center = k + 1;
    return m;
}

// Random MPS with uniform interior bond `bond` (capped by the exact maximum),
// entries drawn from N(0, std^2), normalized.
template <class Scalar>
Mps<Scalar> random_mps(int n, Eigen::Index bond, std::uint64_t seed, double std_dev = 1.0) {
    if (n < 1 || n > kMaxBits) throw ValidationError("random_mps: bad site count");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, std_dev);
    const auto draw = [&]() -> Scalar {
        if constexpr (std::is_same_v<Scalar, double>) {
            return dist(rng);
        } else {
            const double re = dist(rng);
            return Scalar(re, dist(rng));
        }
    };
    std::vector<Eigen::Index> dims(static_cast<std::size_t>(n) + 1, 1);
    for (int k = 1; k < n; ++k) {
        const Eigen::Index cap = std::min<Eigen::Index>(Eigen::Index{1} << std::min(k, 30), Eigen::Index{1} << std::min(n - k, 30));
        dims[static_cast<std::size_t>(k)] = std::min(bond, cap);
    }
    Mps<Scalar> m;
    for (int k = 0; k < n; ++k) {
        SiteTensor<Scalar> t;
        for (auto& s : t) {
            s.resize(dims[static_cast<std::size_t>(k)], dims[static_cast<std::size_t>(k) + 1]);
            for (Eigen::Index i = 0; i < s.rows(); ++i)
                for (Eigen::Index j = 0; j < s.cols(); ++j) s(i, j) = draw();
        }
        m.tensors.push_back(std::move(t));
    }
    m = canonicalize(std::move(m), 0);
    return normalize(std::move(m));
}

}  // namespace qcbm
