#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <random>
#include <span>
#include <vector>

#include "qcbm/adam.hpp"
#include "qcbm/data.hpp"
#include "qcbm/error.hpp"
#include "qcbm/format.hpp"
#include "qcbm/gates.hpp"
#include "qcbm/mmd.hpp"
#include "qcbm/similarity.hpp"
#include "qcbm/statevector.hpp"

namespace qcbm {

inline constexpr double kShift = 1.5707963267948966;  // pi / 2

enum class EvalMode { Shots, Exact };

struct TrainConfig {
    int iterations = 1000;
    std::size_t shots = 1000;
    AdamConfig adam;
    std::size_t minibatch_size = 0;  // 0 = full training set
    EvalMode eval_mode = EvalMode::Shots;
    std::uint64_t seed = 0;
    double init_std = 0.01;
    bool record_wall_time = true;

    void validate(std::size_t train_size) const {
        if (iterations < 1) throw ValidationError("iterations must be >= 1");
        if (shots < 1) throw ValidationError("shots must be >= 1");
        if (minibatch_size > train_size) throw ValidationError("minibatch_size exceeds training set size");
        if (!(init_std >= 0.0)) throw ValidationError("init_std must be >= 0");
        if (!(adam.learning_rate > 0.0)) throw ValidationError("learning rate must be > 0");
    }
};

struct TrainRecord {
    int iteration = 0;
    double mmd_train = 0.0;
    double mmd_test = 0.0;
    double wall_ms = 0.0;
};

struct TrainLog {
    std::vector<TrainRecord> records;  // record i is measured before update i
    std::vector<double> params;        // after the last update
};

// splitmix64 finalizer over a mixed tuple; used so every random draw depends
// only on (master seed, iteration, parameter, role), never on schedule.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    std::uint64_t h = mix(master);
    h = mix(h ^ a);
    h = mix(h ^ b);
    return mix(h ^ c);
}

// Caches the state before every gate so that the output distribution for a
// single shifted parameter costs only the gates at and after its owner.
class ShiftEvaluator {
public:
    ShiftEvaluator(const Circuit& circuit, std::span<const double> params)
        : circuit_(circuit), params_(params.begin(), params.end()) {
        if (params_.size() != circuit.param_count()) throw ValidationError("parameter count mismatch");
        const auto& gates = circuit.gates();
        prefix_.reserve(gates.size() + 1);
        std::vector<cplx> amps(std::size_t{1} << circuit.n_qubits(), cplx{0.0, 0.0});
        amps[0] = 1.0;
        prefix_.push_back(amps);
        for (const auto& g : gates) {
            detail::apply_gate(amps, g, params_);
            prefix_.push_back(amps);
        }
    }

    std::vector<double> probabilities() const { return to_probabilities(prefix_.back()); }

    // Output distribution with params[k] replaced by params[k] + delta.
    std::vector<double> shifted_probabilities(std::size_t k, double delta) const {
        if (k >= params_.size()) throw IndexError("parameter index out of range");
        const std::size_t g = circuit_.gate_of_param(k);
        std::vector<double> shifted(params_);
        shifted[k] += delta;
        std::vector<cplx> amps = prefix_[g];
        const auto& gates = circuit_.gates();
        detail::apply_gate(amps, gates[g], shifted);
        for (std::size_t h = g + 1; h < gates.size(); ++h) detail::apply_gate(amps, gates[h], params_);
        return to_probabilities(amps);
    }

private:
    static std::vector<double> to_probabilities(const std::vector<cplx>& amps) {
        std::vector<double> p(amps.size());
        for (std::size_t i = 0; i < amps.size(); ++i) p[i] = std::norm(amps[i]);
        return p;
    }

    const Circuit& circuit_;
    std::vector<double> params_;
    std::vector<std::vector<cplx>> prefix_;
};

// Exact dMMD/dtheta_k = sum_x (q+ - q-)(x) [K(q - p)](x), with q+- the
// distributions at theta_k +- pi/2.
inline double mmd_gradient_exact(const Circuit& circuit, std::span<const double> params, std::size_t k,
                                 std::span<const double> target, const KernelConfig& cfg) {
    if (k >= params.size()) throw IndexError("parameter index out of range");
    const ShiftEvaluator ev(circuit, params);
    const auto q = ev.probabilities();
    if (target.size() != q.size()) throw ValidationError("target distribution has wrong size");
    std::vector<double> d(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) d[i] = q[i] - target[i];
    const auto w = KernelOperator(circuit.n_qubits(), cfg).apply(d);
    const auto plus = ev.shifted_probabilities(k, kShift);
    const auto minus = ev.shifted_probabilities(k, -kShift);
    double g = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) g += (plus[i] - minus[i]) * w[i];
    return g;
}

inline std::vector<double> mmd_gradient_exact_all(const Circuit& circuit, std::span<const double> params,
                                                  std::span<const double> target, const KernelConfig& cfg) {
    const ShiftEvaluator ev(circuit, params);
    const auto q = ev.probabilities();
    if (target.size() != q.size()) throw ValidationError("target distribution has wrong size");
    std::vector<double> d(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) d[i] = q[i] - target[i];
    const auto w = KernelOperator(circuit.n_qubits(), cfg).apply(d);
    std::vector<double> grad(params.size(), 0.0);
    for (std::size_t k = 0; k < params.size(); ++k) {
        const auto plus = ev.shifted_probabilities(k, kShift);
        const auto minus = ev.shifted_probabilities(k, -kShift);
        for (std::size_t i = 0; i < q.size(); ++i) grad[k] += (plus[i] - minus[i]) * w[i];
    }
    return grad;
}

// Four-term shot estimator of the MMD gradient:
//   E[k(b,x)] - E[k(a,x)] - E[k(b,y)] + E[k(a,y)]
// with b ~ q+, a ~ q-, x ~ q, y ~ data.
inline double shift_gradient_from_samples(std::span<const Bitstring> q, std::span<const Bitstring> plus,
                                          std::span<const Bitstring> minus, std::span<const Bitstring> data,
                                          const KernelConfig& cfg) {
    if (q.empty() || plus.empty() || minus.empty() || data.empty()) {
        throw ValidationError("gradient estimator needs nonempty sample sets");
    }
    const auto hq = detail::histogram(q), hp = detail::histogram(plus), hm = detail::histogram(minus),
               hd = detail::histogram(data);
    return detail::mean_kernel(hp, hq, cfg) - detail::mean_kernel(hm, hq, cfg) - detail::mean_kernel(hp, hd, cfg) +
           detail::mean_kernel(hm, hd, cfg);
}

// Shot-based gradient for parameter k. Samples for q, q+ and q- are drawn
// with seeds derived from `seed`.
inline double mmd_gradient(const Circuit& circuit, std::span<const double> params, std::size_t k,
                           std::span<const Bitstring> batch, const KernelConfig& cfg, std::size_t shots,
                           std::uint64_t seed) {
    if (k >= params.size()) throw IndexError("parameter index out of range");
    const ShiftEvaluator ev(circuit, params);
    const auto q = sample(ev.probabilities(), shots, derive_seed(seed, 0));
    const auto plus = sample(ev.shifted_probabilities(k, kShift), shots, derive_seed(seed, 1));
    const auto minus = sample(ev.shifted_probabilities(k, -kShift), shots, derive_seed(seed, 2));
    return shift_gradient_from_samples(q, plus, minus, batch, cfg);
}

// Appends one SU4 gate per extension edge, in sorted edge order, with
// parameters drawn from N(0, init_std^2).
inline Circuit extend_circuit(const Circuit& base, const SimilarityGraph& graph, double init_std, std::uint64_t seed) {
    if (graph.n_vertices != base.n_qubits()) throw ValidationError("graph vertices differ from circuit qubits");
    if (!(init_std >= 0.0)) throw ValidationError("init_std must be >= 0");
    Circuit out = base;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (const auto& [a, b] : graph.extension_edges()) {
        std::vector<double> theta(15);
        for (auto& t : theta) t = init_std * normal(rng);
        out.add_gate(GateKind::SU4, a, b, theta);
    }
    return out;
}

namespace detail {

inline std::vector<double> target_distribution(const BinaryDataset& data, int n_qubits) {
    if (data.n_features != n_qubits) throw ValidationError("dataset feature count differs from qubit count");
    return empirical_distribution(data.samples, n_qubits);
}

inline double witness_mean(std::span<const double> w, std::span<const Bitstring> samples) {
    double s = 0.0;
    for (auto x : samples) s += w[x];
    return s / static_cast<double>(samples.size());
}

inline std::vector<double> difference(std::span<const double> a, std::span<const double> b) {
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return d;
}

}  // namespace detail

// ADAM on the shot-estimated MMD gradient. Every iteration draws `shots`
// samples from the current circuit (reused across parameters), a mini-batch
// of the training data if configured, and `shots` samples from each shifted
// circuit. The logged train/test MMD are measured before the update.
inline TrainLog train_qcbm(const Circuit& circuit, const BinaryDataset& train_set, const BinaryDataset& test_set,
                           const KernelConfig& kernel_cfg, const TrainConfig& cfg) {
    kernel_cfg.validate();
    if (train_set.empty() || test_set.empty()) throw ValidationError("train and test sets must be nonempty");
    cfg.validate(train_set.size());
    const int n = circuit.n_qubits();
    const auto p_train = detail::target_distribution(train_set, n);
    const auto p_test = detail::target_distribution(test_set, n);
    const KernelOperator op(n, kernel_cfg);
    const bool use_batch = cfg.minibatch_size > 0 && cfg.minibatch_size < train_set.size();

    std::vector<double> params = circuit.params();
    Adam adam(params.size(), cfg.adam);
    std::vector<double> grad(params.size());
    std::vector<std::size_t> indices(train_set.size());
    std::iota(indices.begin(), indices.end(), std::size_t{0});

    TrainLog log;
    log.records.reserve(static_cast<std::size_t>(cfg.iterations));
    for (int it = 0; it < cfg.iterations; ++it) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto iter = static_cast<std::uint64_t>(it);
        const ShiftEvaluator ev(circuit, params);
        const auto q = ev.probabilities();
        const auto q_samples = sample(q, cfg.shots, derive_seed(cfg.seed, iter, 0, 0));
        const auto q_hat = empirical_distribution(q_samples, n);

        TrainRecord rec;
        rec.iteration = it;
        const auto& q_eval = cfg.eval_mode == EvalMode::Shots ? q_hat : q;
        rec.mmd_train = op.quadratic(detail::difference(q_eval, p_train));
        rec.mmd_test = op.quadratic(detail::difference(q_eval, p_test));

        std::vector<double> p_batch;
        if (use_batch) {
            std::mt19937_64 rng(derive_seed(cfg.seed, iter, 0, 1));
            std::vector<Bitstring> batch;
            batch.reserve(cfg.minibatch_size);
            std::vector<std::size_t> chosen;
            std::sample(indices.begin(), indices.end(), std::back_inserter(chosen), cfg.minibatch_size, rng);
            for (auto i : chosen) batch.push_back(train_set.samples[i]);
            p_batch = empirical_distribution(batch, n);
        }
        const auto w = op.apply(detail::difference(q_hat, use_batch ? p_batch : p_train));

        for (std::size_t k = 0; k < params.size(); ++k) {
            const auto plus = sample(ev.shifted_probabilities(k, kShift), cfg.shots, derive_seed(cfg.seed, iter, k + 1, 1));
            const auto minus = sample(ev.shifted_probabilities(k, -kShift), cfg.shots, derive_seed(cfg.seed, iter, k + 1, 2));
            grad[k] = detail::witness_mean(w, plus) - detail::witness_mean(w, minus);
        }
        adam.step(params, grad);
        if (cfg.record_wall_time) {
            rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        }
        log.records.push_back(rec);
    }
    log.params = std::move(params);
    return log;
}

// Trailing moving average; the first window-1 entries average what exists.
inline std::vector<double> moving_average(std::span<const double> xs, std::size_t window) {
    if (window < 1) throw ValidationError("moving average window must be >= 1");
    std::vector<double> out(xs.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sum += xs[i];
        if (i >= window) sum -= xs[i - window];
        out[i] = sum / static_cast<double>(std::min(i + 1, window));
    }
    return out;
}

// Moving-averaged train MMD at the last iteration.
inline double final_train_mmd(const TrainLog& log, std::size_t window = 50) {
    if (log.records.empty()) throw ValidationError("empty training log");
    std::vector<double> xs;
    for (const auto& r : log.records) xs.push_back(r.mmd_train);
    return moving_average(xs, window).back();
}

struct AggregateRow {
    int iteration = 0;
    double train_mean = 0.0, train_std = 0.0;
    double test_mean = 0.0, test_std = 0.0;
};

// Per-seed moving average, then mean and sample standard deviation across seeds.
inline std::vector<AggregateRow> aggregate_logs(std::span<const TrainLog> logs, std::size_t window = 50) {
    if (logs.empty()) throw ValidationError("no logs to aggregate");
    const std::size_t len = logs.front().records.size();
    std::vector<std::vector<double>> train, test;
    for (const auto& log : logs) {
        if (log.records.size() != len) throw ValidationError("logs have different lengths");
        std::vector<double> a, b;
        for (const auto& r : log.records) {
            a.push_back(r.mmd_train);
            b.push_back(r.mmd_test);
        }
        train.push_back(moving_average(a, window));
        test.push_back(moving_average(b, window));
    }
    const auto stats = [](const std::vector<std::vector<double>>& xs, std::size_t i, double& mean, double& sd) {
        mean = 0.0;
        for (const auto& x : xs) mean += x[i];
        mean /= static_cast<double>(xs.size());
        double ss = 0.0;
        for (const auto& x : xs) ss += (x[i] - mean) * (x[i] - mean);
        sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
    };
    std::vector<AggregateRow> out(len);
    for (std::size_t i = 0; i < len; ++i) {
        out[i].iteration = logs.front().records[i].iteration;
        stats(train, i, out[i].train_mean, out[i].train_std);
        stats(test, i, out[i].test_mean, out[i].test_std);
    }
    return out;
}

inline void write_train_log_csv(std::ostream& os, const TrainLog& log) {
    os << "iteration,mmd_train,mmd_test,wall_ms\n";
    for (const auto& r : log.records) {
        os << r.iteration << ',' << format_roundtrip(r.mmd_train) << ',' << format_roundtrip(r.mmd_test) << ','
           << format_roundtrip(r.wall_ms) << '\n';
    }
}

inline void write_aggregate_csv(std::ostream& os, std::span<const AggregateRow> rows) {
    os << "iteration,mmd_train_mean,mmd_train_std,mmd_test_mean,mmd_test_std\n";
    for (const auto& r : rows) {
        os << r.iteration << ',' << format_roundtrip(r.train_mean) << ',' << format_roundtrip(r.train_std) << ','
           << format_roundtrip(r.test_mean) << ',' << format_roundtrip(r.test_std) << '\n';
    }
}

}  // namespace qcbm
