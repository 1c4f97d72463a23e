#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "qcbm/data.hpp"
#include "qcbm/error.hpp"
#include "qcbm/timeseries.hpp"

namespace qcbm {

struct QuantizedSplit {
    BinaryDataset train;
    BinaryDataset test;
    std::size_t clamped_test = 0;  // test values outside the train range
};

// Chronological split of a multi-series table followed by per-series n-bit
// quantization. Ranges come from the training rows only; test values clamp.
inline QuantizedSplit quantize_split(const TimeSeries& series, int n_bits, double ratio) {
    series.validate();
    if (series.values.empty()) throw ValidationError("quantize_split: no series selected");
    if (!(ratio > 0.0 && ratio < 1.0)) throw ValidationError("split ratio must be in (0, 1)");
    const std::size_t len = series.length();
    const auto n_train = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(len)));
    if (n_train == 0 || n_train == len) throw ValidationError("quantize_split: split leaves an empty part");

    std::vector<Quantizer> quantizers;
    for (const auto& v : series.values) {
        const auto [lo, hi] = std::minmax_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n_train));
        Quantizer q{*lo, *hi, n_bits};
        if (!(q.x_min < q.x_max)) throw ValidationError("quantize_split: a series is constant on the training rows");
        q.validate();
        quantizers.push_back(q);
    }

    QuantizedSplit out;
    std::vector<std::vector<std::uint32_t>> train_codes, test_codes;
    for (std::size_t t = 0; t < len; ++t) {
        std::vector<std::uint32_t> row;
        for (std::size_t f = 0; f < quantizers.size(); ++f) {
            bool clamped = false;
            row.push_back(quantize(series.values[f][t], quantizers[f], &clamped));
            if (t >= n_train && clamped) ++out.clamped_test;
        }
        (t < n_train ? train_codes : test_codes).push_back(std::move(row));
    }
    out.train = pack_features(train_codes, n_bits);
    out.test = pack_features(test_codes, n_bits);
    out.train.quantizers = quantizers;
    out.test.quantizers = quantizers;
    return out;
}

}  // namespace qcbm
