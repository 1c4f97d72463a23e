#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "qcbm/bits.hpp"
#include "qcbm/error.hpp"

namespace qcbm {

// Gaussian mixture kernel bandwidths.
struct KernelConfig {
    std::vector<double> bandwidths{1.0};

    void validate() const {
        if (bandwidths.empty()) throw ValidationError("kernel needs at least one bandwidth");
        for (double s : bandwidths) {
            if (!(s > 0.0)) throw ValidationError("kernel bandwidths must be > 0");
        }
    }
};

// Kernel value as a function of squared Euclidean distance; for 0/1 vectors
// that distance is the Hamming count.
inline double kernel_of_distance(double squared_distance, const KernelConfig& cfg) {
    double s = 0.0;
    for (double sigma : cfg.bandwidths) s += std::exp(-squared_distance / (2.0 * sigma));
    return s / static_cast<double>(cfg.bandwidths.size());
}

inline double kernel(std::span<const std::uint8_t> x, std::span<const std::uint8_t> y, const KernelConfig& cfg) {
    if (x.size() != y.size()) throw ValidationError("kernel: bitstring lengths differ");
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double diff = static_cast<double>(x[i]) - static_cast<double>(y[i]);
        d += diff * diff;
    }
    return kernel_of_distance(d, cfg);
}

inline double kernel(Bitstring x, Bitstring y, const KernelConfig& cfg) {
    return kernel_of_distance(hamming_distance(x, y), cfg);
}

// kernel_of_distance tabulated for d = 0..n_bits.
inline std::vector<double> kernel_table(int n_bits, const KernelConfig& cfg) {
    std::vector<double> t(static_cast<std::size_t>(n_bits) + 1);
    for (int d = 0; d <= n_bits; ++d) t[static_cast<std::size_t>(d)] = kernel_of_distance(d, cfg);
    return t;
}

namespace detail {

using Histogram = std::vector<std::pair<Bitstring, double>>;

inline Histogram histogram(std::span<const Bitstring> samples) {
    std::map<Bitstring, double> counts;
    for (auto x : samples) counts[x] += 1.0;
    const double inv = 1.0 / static_cast<double>(samples.size());
    Histogram h;
    h.reserve(counts.size());
    for (const auto& [x, c] : counts) h.emplace_back(x, c * inv);
    return h;
}

inline double mean_kernel(const Histogram& a, const Histogram& b, const KernelConfig& cfg) {
    std::map<int, double> by_distance;
    for (const auto& [x, wx] : a)
        for (const auto& [y, wy] : b) by_distance[hamming_distance(x, y)] += wx * wy;
    double s = 0.0;
    for (const auto& [d, w] : by_distance) s += w * kernel_of_distance(d, cfg);
    return s;
}

}  // namespace detail

// Biased (V-statistic) MMD between two sample multisets, self-pairs included.
inline double mmd(std::span<const Bitstring> samples_q, std::span<const Bitstring> samples_p,
                  const KernelConfig& cfg) {
    if (samples_q.empty() || samples_p.empty()) throw ValidationError("mmd: empty sample set");
    cfg.validate();
    const auto hq = detail::histogram(samples_q);
    const auto hp = detail::histogram(samples_p);
    return detail::mean_kernel(hq, hq, cfg) + detail::mean_kernel(hp, hp, cfg) -
           2.0 * detail::mean_kernel(hq, hp, cfg);
}

// Unnormalized in-place Walsh-Hadamard transform; length must be a power of two.
inline void walsh_hadamard(std::span<double> v) {
    const std::size_t n = v.size();
    for (std::size_t h = 1; h < n; h <<= 1) {
        for (std::size_t i = 0; i < n; i += 2 * h) {
            for (std::size_t j = i; j < i + h; ++j) {
                const double a = v[j], b = v[j + h];
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
    }
}

// Kernel Gram operator over all 2^n basis states, diagonalized by the
// Walsh-Hadamard transform because the kernel depends only on x XOR y.
class KernelOperator {
public:
    KernelOperator(int n_bits, const KernelConfig& cfg) : n_bits_(n_bits), dim_(std::size_t{1} << n_bits) {
        cfg.validate();
        const auto table = kernel_table(n_bits, cfg);
        spectrum_.resize(dim_);
        for (std::size_t z = 0; z < dim_; ++z) spectrum_[z] = table[static_cast<std::size_t>(std::popcount(z))];
        walsh_hadamard(spectrum_);
        // Gaussian kernels are positive definite; clip rounding noise.
        for (auto& s : spectrum_) s = std::max(s, 0.0);
    }

    int n_bits() const { return n_bits_; }
    std::size_t dim() const { return dim_; }

    // (K v)(x) = sum_y kernel(x, y) v(y).
    std::vector<double> apply(std::span<const double> v) const {
        check(v);
        std::vector<double> w(v.begin(), v.end());
        walsh_hadamard(w);
        for (std::size_t u = 0; u < dim_; ++u) w[u] *= spectrum_[u];
        walsh_hadamard(w);
        const double inv = 1.0 / static_cast<double>(dim_);
        for (auto& x : w) x *= inv;
        return w;
    }

    // v^T K v, nonnegative by construction.
    double quadratic(std::span<const double> v) const {
        check(v);
        std::vector<double> w(v.begin(), v.end());
        walsh_hadamard(w);
        double s = 0.0;
        for (std::size_t u = 0; u < dim_; ++u) s += spectrum_[u] * w[u] * w[u];
        return s / static_cast<double>(dim_);
    }

private:
    void check(std::span<const double> v) const {
        if (v.size() != dim_) throw ValidationError("distribution length must be 2^n_bits");
    }

    int n_bits_;
    std::size_t dim_;
    std::vector<double> spectrum_;
};

inline int log2_exact(std::size_t dim) {
    if (dim == 0 || (dim & (dim - 1)) != 0) throw ValidationError("distribution length must be a power of two");
    return std::countr_zero(dim);
}

// MMD with expectations taken exactly over full outcome distributions.
inline double mmd_exact(std::span<const double> dist_q, std::span<const double> dist_p, const KernelConfig& cfg) {
    if (dist_q.size() != dist_p.size()) throw ValidationError("mmd_exact: outcome spaces differ");
    const KernelOperator op(log2_exact(dist_q.size()), cfg);
    std::vector<double> d(dist_q.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = dist_q[i] - dist_p[i];
    return op.quadratic(d);
}

// Normalized histogram over 2^n_bits outcomes.
inline std::vector<double> empirical_distribution(std::span<const Bitstring> samples, int n_bits) {
    if (samples.empty()) throw ValidationError("empirical_distribution: no samples");
    std::vector<double> p(std::size_t{1} << n_bits, 0.0);
    for (auto x : samples) {
        if (x >= p.size()) throw ValidationError("sample outside outcome space");
        p[x] += 1.0;
    }
    const double inv = 1.0 / static_cast<double>(samples.size());
    for (auto& v : p) v *= inv;
    return p;
}

}  // namespace qcbm
