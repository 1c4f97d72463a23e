#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <vector>

#include "qcbm/bits.hpp"
#include "qcbm/error.hpp"

namespace qcbm {

// Uniform quantizer for one decimal feature.
struct Quantizer {
    double x_min = 0.0;
    double x_max = 1.0;
    int n_bits = 4;

    std::uint32_t top() const { return (std::uint32_t{1} << n_bits) - 1; }
    double step() const { return (x_max - x_min) / static_cast<double>(top()); }

    void validate() const {
        if (!(x_min < x_max)) throw ValidationError("quantizer needs x_min < x_max");
        if (n_bits < 1 || n_bits > 16) throw ValidationError("quantizer n_bits must be in [1, 16]");
    }
};

// S x F bit matrix. Sample s is stored as a Bitstring whose bit q is the
// value on column (qubit) q. Column q carries original feature feature_order[q].
struct BinaryDataset {
    int n_features = 0;
    std::vector<Bitstring> samples;
    std::vector<int> feature_order;
    std::vector<Quantizer> quantizers;  // one per decimal feature, empty for native binary data

    BinaryDataset() = default;
    BinaryDataset(int n, std::vector<Bitstring> rows) : n_features(n), samples(std::move(rows)) {
        if (n < 1 || n > kMaxBits) throw ValidationError("feature count must be in [1, 64]");
        feature_order.resize(static_cast<std::size_t>(n));
        std::iota(feature_order.begin(), feature_order.end(), 0);
        validate();
    }

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
    int bit(std::size_t s, int f) const { return bit_at(samples[s], f); }

    void validate() const {
        if (static_cast<int>(feature_order.size()) != n_features) throw ValidationError("feature_order size mismatch");
        std::vector<int> sorted = feature_order;
        std::sort(sorted.begin(), sorted.end());
        for (int i = 0; i < n_features; ++i) {
            if (sorted[static_cast<std::size_t>(i)] != i) throw ValidationError("feature_order is not a permutation");
        }
        const Bitstring mask = n_features == 64 ? ~Bitstring{0} : ((Bitstring{1} << n_features) - 1);
        for (auto x : samples) {
            if ((x & ~mask) != 0) throw ValidationError("sample has bits beyond n_features");
        }
    }
};

inline bool is_permutation_of_iota(std::span<const int> order) {
    std::vector<int> sorted(order.begin(), order.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (sorted[i] != static_cast<int>(i)) return false;
    }
    return true;
}

// Rearranges columns so that new column q holds current column order[q].
inline BinaryDataset permute_features(const BinaryDataset& data, std::span<const int> order) {
    if (static_cast<int>(order.size()) != data.n_features || !is_permutation_of_iota(order)) {
        throw ValidationError("permute_features: order is not a permutation of the columns");
    }
    BinaryDataset out = data;
    for (std::size_t s = 0; s < data.size(); ++s) {
        Bitstring x = 0;
        for (int q = 0; q < data.n_features; ++q) {
            if (data.bit(s, order[static_cast<std::size_t>(q)])) x |= Bitstring{1} << q;
        }
        out.samples[s] = x;
    }
    for (int q = 0; q < data.n_features; ++q) {
        out.feature_order[static_cast<std::size_t>(q)] =
            data.feature_order[static_cast<std::size_t>(order[static_cast<std::size_t>(q)])];
    }
    return out;
}

inline std::vector<int> inverse_permutation(std::span<const int> order) {
    std::vector<int> inv(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) inv[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
    return inv;
}

// Row-reversing order on a rows x cols grid: every odd row is traversed
// right to left, so consecutive qubits are always grid neighbours.
// For 3x3 this is (0,1,2,5,4,3,6,7,8).
inline std::vector<int> snake_order(int rows, int cols) {
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(rows * cols));
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) order.push_back(r * cols + ((r % 2 == 0) ? c : cols - 1 - c));
    }
    return order;
}

// All distinct bars-and-stripes images, pixels row-major (pixel r*cols+c is
// bit r*cols+c), sorted by basis index.
inline BinaryDataset generate_bas(int rows, int cols) {
    if (rows < 1 || cols < 1) throw ValidationError("generate_bas: rows and cols must be >= 1");
    if (rows * cols > kMaxBits) throw ValidationError("generate_bas: image too large");
    std::set<Bitstring> images;
    for (std::uint64_t pattern = 0; pattern < (std::uint64_t{1} << cols); ++pattern) {
        Bitstring x = 0;  // bars: every column constant
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c)
                if ((pattern >> c) & 1u) x |= Bitstring{1} << (r * cols + c);
        images.insert(x);
    }
    for (std::uint64_t pattern = 0; pattern < (std::uint64_t{1} << rows); ++pattern) {
        Bitstring x = 0;  // stripes: every row constant
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c)
                if ((pattern >> r) & 1u) x |= Bitstring{1} << (r * cols + c);
        images.insert(x);
    }
    return BinaryDataset(rows * cols, std::vector<Bitstring>(images.begin(), images.end()));
}

// Uniform n-bit quantizer. Values outside [x_min, x_max] clamp to the end codes.
inline std::uint32_t quantize(double x, const Quantizer& q, bool* clamped = nullptr) {
    q.validate();
    const double ratio = (x - q.x_min) / (q.x_max - q.x_min);
    const double code = std::clamp(std::floor(static_cast<double>(q.top()) * ratio), 0.0, static_cast<double>(q.top()));
    if (clamped) *clamped = x < q.x_min || x > q.x_max;
    return static_cast<std::uint32_t>(code);
}

inline double dequantize(std::uint32_t v, const Quantizer& q) {
    q.validate();
    if (v > q.top()) throw ValidationError("dequantize: code exceeds bit width");
    return q.x_min + static_cast<double>(v) * q.step();
}

struct QuantizedSeries {
    std::vector<std::uint32_t> codes;
    std::size_t clamped = 0;
};

inline QuantizedSeries quantize_all(std::span<const double> xs, const Quantizer& q) {
    QuantizedSeries out;
    out.codes.reserve(xs.size());
    for (double x : xs) {
        bool c = false;
        out.codes.push_back(quantize(x, q, &c));
        out.clamped += c ? 1 : 0;
    }
    return out;
}

// codes[s][f] -> bits. Feature f occupies columns [f*n_bits, (f+1)*n_bits) with
// its most significant bit on the lowest column of the block.
inline BinaryDataset pack_features(const std::vector<std::vector<std::uint32_t>>& codes, int n_bits) {
    if (codes.empty()) throw ValidationError("pack_features: no samples");
    if (n_bits < 1 || n_bits > 16) throw ValidationError("pack_features: n_bits must be in [1, 16]");
    const std::size_t n_feat = codes.front().size();
    if (n_feat == 0 || static_cast<int>(n_feat) * n_bits > kMaxBits) throw ValidationError("pack_features: bad width");
    std::vector<Bitstring> rows;
    rows.reserve(codes.size());
    for (const auto& row : codes) {
        if (row.size() != n_feat) throw ValidationError("pack_features: ragged input");
        Bitstring x = 0;
        for (std::size_t f = 0; f < n_feat; ++f) {
            if (row[f] >= (std::uint32_t{1} << n_bits)) throw ValidationError("pack_features: value overflows bit width");
            for (int b = 0; b < n_bits; ++b) {
                const int column = static_cast<int>(f) * n_bits + b;
                if ((row[f] >> (n_bits - 1 - b)) & 1u) x |= Bitstring{1} << column;
            }
        }
        rows.push_back(x);
    }
    return BinaryDataset(static_cast<int>(n_feat) * n_bits, std::move(rows));
}

inline std::vector<std::vector<std::uint32_t>> unpack_features(const BinaryDataset& data, int n_bits) {
    if (n_bits < 1 || data.n_features % n_bits != 0) throw ValidationError("unpack_features: width mismatch");
    const int n_feat = data.n_features / n_bits;
    std::vector<std::vector<std::uint32_t>> out(data.size(), std::vector<std::uint32_t>(static_cast<std::size_t>(n_feat)));
    for (std::size_t s = 0; s < data.size(); ++s) {
        for (int f = 0; f < n_feat; ++f) {
            std::uint32_t v = 0;
            for (int b = 0; b < n_bits; ++b) v = (v << 1) | static_cast<std::uint32_t>(data.bit(s, f * n_bits + b));
            out[s][static_cast<std::size_t>(f)] = v;
        }
    }
    return out;
}

enum class SplitMode { Shuffle, Chronological };

struct SplitResult {
    BinaryDataset train;
    BinaryDataset test;
};

// Train gets floor(ratio * S) samples. Shuffle draws them uniformly without
// replacement (original order kept inside each part); Chronological takes the
// leading rows.
inline SplitResult split(const BinaryDataset& data, double ratio, std::uint64_t seed,
                         SplitMode mode = SplitMode::Shuffle) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw ValidationError("split ratio must be in (0, 1)");
    const std::size_t n_train = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(data.size())));
    std::vector<std::size_t> idx(data.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::vector<bool> in_train(data.size(), false);
    if (mode == SplitMode::Shuffle) {
        std::mt19937_64 rng(seed);
        std::shuffle(idx.begin(), idx.end(), rng);
    }
    for (std::size_t i = 0; i < n_train; ++i) in_train[idx[i]] = true;

    SplitResult out{data, data};
    out.train.samples.clear();
    out.test.samples.clear();
    for (std::size_t s = 0; s < data.size(); ++s) {
        (in_train[s] ? out.train.samples : out.test.samples).push_back(data.samples[s]);
    }
    return out;
}

}  // namespace qcbm
