#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "qcbm/data.hpp"
#include "qcbm/error.hpp"
#include "qcbm/mps.hpp"

namespace qcbm {

struct MpsTrainConfig {
    int iterations = 10;          // one iteration = left-to-right plus right-to-left sweep
    double learning_rate = 0.05;
    double cutoff = 5e-5;         // relative squared singular-value cutoff
    Eigen::Index max_bond = 0;    // 0 = unlimited
    std::uint64_t seed = 0;
    Eigen::Index init_bond = 2;
    double init_std = 0.01;
    int steps_per_bond = 1;       // gradient steps on each merged two-site tensor

    void validate() const {
        if (iterations < 1) throw ValidationError("MPS training needs iterations >= 1");
        if (!(cutoff > 0.0)) throw ValidationError("MPS cutoff must be > 0");
        if (!(learning_rate > 0.0)) throw ValidationError("MPS learning rate must be > 0");
        if (steps_per_bond < 1) throw ValidationError("steps_per_bond must be >= 1");
        if (init_bond < 1) throw ValidationError("init_bond must be >= 1");
    }
};

struct MpsTrainResult {
    RealMps mps;
    std::vector<double> nll;  // nll[0] at initialization, nll[i] after iteration i
};

inline constexpr double kProbabilityFloor = 1e-300;

// Mean negative log-likelihood of the samples under the normalized MPS.
template <class Scalar>
double mps_nll(const Mps<Scalar>& m, const BinaryDataset& data) {
    if (data.empty()) throw ValidationError("mps_nll: empty dataset");
    if (data.n_features != m.n_sites()) throw ValidationError("mps_nll: feature count differs from site count");
    const double z = norm_squared(m);
    std::map<Bitstring, std::size_t> counts;
    for (auto x : data.samples) ++counts[x];
    double s = 0.0;
    for (const auto& [x, c] : counts) {
        const double a = std::abs(std::complex<double>(amplitude(m, x)));
        s -= static_cast<double>(c) * std::log(std::max(a * a / z, kProbabilityFloor));
    }
    return s / static_cast<double>(data.size());
}

namespace detail {

struct WeightedSamples {
    std::vector<Bitstring> x;
    std::vector<double> w;  // empirical frequency
};

inline WeightedSamples unique_samples(const BinaryDataset& data) {
    std::map<Bitstring, std::size_t> counts;
    for (auto x : data.samples) ++counts[x];
    WeightedSamples out;
    for (const auto& [x, c] : counts) {
        out.x.push_back(x);
        out.w.push_back(static_cast<double>(c) / static_cast<double>(data.size()));
    }
    return out;
}

// Gradient steps on the merged tensor theta[s1][s2] (each l x r) whose
// environment is orthonormal, so Z = ||theta||^2.
//   dNLL/dtheta = 2 theta / Z - 2 sum_s w_s (L_s R_s^T) / psi_s
inline void descend_two_site(Eigen::MatrixXd (&theta)[2][2], const WeightedSamples& data, int k,
                             const std::vector<Eigen::RowVectorXd>& left, const std::vector<Eigen::VectorXd>& right,
                             double lr, int steps) {
    for (int step = 0; step < steps; ++step) {
        double z = 0.0;
        for (auto& row : theta)
            for (auto& t : row) z += t.squaredNorm();
        Eigen::MatrixXd grad[2][2];
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) grad[a][b] = (2.0 / z) * theta[a][b];
        for (std::size_t s = 0; s < data.x.size(); ++s) {
            const int s1 = bit_at(data.x[s], k), s2 = bit_at(data.x[s], k + 1);
            double psi = (left[s] * theta[s1][s2] * right[s])(0, 0);
            if (std::abs(psi) < 1e-150) psi = psi < 0 ? -1e-150 : 1e-150;
            grad[s1][s2].noalias() -= (2.0 * data.w[s] / psi) * (left[s].transpose() * right[s].transpose());
        }
        double norm2 = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                theta[a][b] -= lr * grad[a][b];
                norm2 += theta[a][b].squaredNorm();
            }
        const double inv = 1.0 / std::sqrt(norm2);
        for (auto& row : theta)
            for (auto& t : row) t *= inv;
    }
}

inline Eigen::MatrixXd join_two_site(const Eigen::MatrixXd (&theta)[2][2]) {
    const auto l = theta[0][0].rows(), r = theta[0][0].cols();
    Eigen::MatrixXd big(2 * l, 2 * r);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) big.block(a * l, b * r, l, r) = theta[a][b];
    return big;
}

}  // namespace detail

// Two-site sweeping gradient descent on the negative log-likelihood with SVD
// re-splitting after every local update.
inline MpsTrainResult train_mps(const BinaryDataset& dataset, const MpsTrainConfig& cfg) {
    cfg.validate();
    if (dataset.empty()) throw ValidationError("train_mps: empty dataset");
    const int n = dataset.n_features;
    if (n < 2) throw ValidationError("train_mps: need at least two features");

    const auto data = detail::unique_samples(dataset);
    const std::size_t n_samples = data.x.size();

    MpsTrainResult out;
    out.mps = random_mps<double>(n, cfg.init_bond, cfg.seed, cfg.init_std);  // center 0
    out.nll.push_back(mps_nll(out.mps, dataset));
    RealMps& m = out.mps;

    const auto site = [&m](int k) -> SiteTensor<double>& { return m.tensors[static_cast<std::size_t>(k)]; };
    const auto merge = [&](int k, Eigen::MatrixXd (&theta)[2][2]) {
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) theta[a][b] = site(k)[static_cast<std::size_t>(a)] * site(k + 1)[static_cast<std::size_t>(b)];
    };

    for (int it = 0; it < cfg.iterations; ++it) {
        // Left to right: center starts at 0.
        {
            // right[k][s]: contraction of sites k..n-1 for sample s (column vector).
            std::vector<std::vector<Eigen::VectorXd>> right(static_cast<std::size_t>(n) + 1,
                                                            std::vector<Eigen::VectorXd>(n_samples));
            for (std::size_t s = 0; s < n_samples; ++s) right[static_cast<std::size_t>(n)][s] = Eigen::VectorXd::Ones(1);
            for (int k = n - 1; k >= 2; --k)
                for (std::size_t s = 0; s < n_samples; ++s)
                    right[static_cast<std::size_t>(k)][s] =
                        site(k)[static_cast<std::size_t>(bit_at(data.x[s], k))] * right[static_cast<std::size_t>(k) + 1][s];
            std::vector<Eigen::RowVectorXd> left(n_samples, Eigen::RowVectorXd::Ones(1));

            for (int k = 0; k + 1 < n; ++k) {
                Eigen::MatrixXd theta[2][2];
                merge(k, theta);
                detail::descend_two_site(theta, data, k, left, right[static_cast<std::size_t>(k) + 2],
                                         cfg.learning_rate, cfg.steps_per_bond);
                auto svd = detail::truncated_svd(detail::join_two_site(theta), cfg.cutoff, cfg.max_bond);
                site(k) = detail::unstack_rows(Eigen::MatrixXd(svd.u));
                const Eigen::MatrixXd sv = svd.s.asDiagonal() * svd.v.transpose();
                site(k + 1) = detail::unstack_cols(sv);
                const double nrm = sv.norm();
                site(k + 1)[0] /= nrm;
                site(k + 1)[1] /= nrm;
                for (std::size_t s = 0; s < n_samples; ++s)
                    left[s] = left[s] * site(k)[static_cast<std::size_t>(bit_at(data.x[s], k))];
            }
            m.center = n - 1;
        }
        // Right to left.
        {
            std::vector<std::vector<Eigen::RowVectorXd>> left(static_cast<std::size_t>(n),
                                                              std::vector<Eigen::RowVectorXd>(n_samples));
            for (std::size_t s = 0; s < n_samples; ++s) left[0][s] = Eigen::RowVectorXd::Ones(1);
            for (int k = 1; k <= n - 2; ++k)
                for (std::size_t s = 0; s < n_samples; ++s)
                    left[static_cast<std::size_t>(k)][s] =
                        left[static_cast<std::size_t>(k) - 1][s] * site(k - 1)[static_cast<std::size_t>(bit_at(data.x[s], k - 1))];
            std::vector<Eigen::VectorXd> right(n_samples, Eigen::VectorXd::Ones(1));

            for (int k = n - 2; k >= 0; --k) {
                Eigen::MatrixXd theta[2][2];
                merge(k, theta);
                detail::descend_two_site(theta, data, k, left[static_cast<std::size_t>(k)], right,
                                         cfg.learning_rate, cfg.steps_per_bond);
                auto svd = detail::truncated_svd(detail::join_two_site(theta), cfg.cutoff, cfg.max_bond);
                site(k + 1) = detail::unstack_cols(Eigen::MatrixXd(svd.v.transpose()));
                const Eigen::MatrixXd us = svd.u * svd.s.asDiagonal();
                site(k) = detail::unstack_rows(us);
                const double nrm = us.norm();
                site(k)[0] /= nrm;
                site(k)[1] /= nrm;
                for (std::size_t s = 0; s < n_samples; ++s)
                    right[s] = site(k + 1)[static_cast<std::size_t>(bit_at(data.x[s], k + 1))] * right[s];
            }
            m.center = 0;
        }
        out.nll.push_back(mps_nll(m, dataset));
    }
    return out;
}

}  // namespace qcbm
