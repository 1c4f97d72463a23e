#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "qcbm/born_machine.hpp"
#include "qcbm/data.hpp"

using namespace qcbm;

namespace {

Circuit random_mixed_circuit(int n, int n_gates, std::mt19937_64& rng, double scale = 3.0) {
    Circuit c(n);
    std::uniform_real_distribution<double> u(-scale, scale);
    const GateKind kinds[] = {GateKind::U2, GateKind::RXX, GateKind::RYY, GateKind::RZZ, GateKind::SU4};
    for (int i = 0; i < n_gates; ++i) {
        const GateKind kind = kinds[rng() % 5];
        const int a = static_cast<int>(rng() % static_cast<unsigned>(n));
        int b = static_cast<int>(rng() % static_cast<unsigned>(n));
        while (b == a) b = static_cast<int>(rng() % static_cast<unsigned>(n));
        std::vector<double> theta(static_cast<std::size_t>(param_count(kind)));
        for (auto& t : theta) t = u(rng);
        c.add_gate(kind, a, kind == GateKind::U2 ? -1 : b, theta);
    }
    return c;
}

std::vector<double> probs(const Circuit& c, std::span<const double> params) {
    return born_probabilities(run_circuit(c, params)).probabilities;
}

std::vector<double> random_target(std::size_t dim, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<double> p(dim);
    for (auto& x : p) x = u(rng);
    const double s = std::accumulate(p.begin(), p.end(), 0.0);
    for (auto& x : p) x /= s;
    return p;
}

BinaryDataset bas22() { return generate_bas(2, 2); }

Circuit su4_chain(int n, double init_std, std::uint64_t seed) {
    return extend_circuit(Circuit(n), all_to_all_graph(linear_graph(n)), init_std, seed);
}

}  // namespace

TEST(ExactGradient, MatchesCentralFiniteDifference) {
    std::mt19937_64 rng(2024);
    const KernelConfig cfg{{0.5, 2.0}};
    for (int trial = 0; trial < 5; ++trial) {
        const auto c = random_mixed_circuit(4, 6, rng);
        const auto target = random_target(16, rng);
        const auto params = c.params();
        const auto grad = mmd_gradient_exact_all(c, params, target, cfg);
        const double h = 1e-5;
        for (std::size_t k = 0; k < params.size(); ++k) {
            auto up = params, down = params;
            up[k] += h;
            down[k] -= h;
            const double fd = (mmd_exact(probs(c, up), target, cfg) - mmd_exact(probs(c, down), target, cfg)) / (2 * h);
            EXPECT_NEAR(grad[k], fd, 1e-6) << "trial " << trial << " param " << k;
            if (k % 7 == 0) {
                EXPECT_NEAR(mmd_gradient_exact(c, params, k, target, cfg), grad[k], 1e-14);
            }
        }
    }
}

TEST(ExactGradient, PhaseOnlyParametersHaveZeroGradient) {
    // On |00>, a leading Rz and RZZ only add phases.
    Circuit c(2);
    const double u2[3] = {0.7, 1.1, 0.4};
    const double zz[1] = {0.9};
    c.add_gate(GateKind::RZZ, 0, 1, zz);
    c.add_gate(GateKind::U2, 0, -1, u2);
    std::mt19937_64 rng(1);
    const auto target = random_target(4, rng);
    const auto g = mmd_gradient_exact_all(c, c.params(), target, KernelConfig{});
    EXPECT_NEAR(g[0], 0.0, 1e-15);
    EXPECT_NEAR(g[1], 0.0, 1e-15);
    EXPECT_GT(std::abs(g[2]), 1e-6);
}

TEST(ExactGradient, Errors) {
    Circuit c(2);
    c.add_gate(GateKind::RXX, 0, 1);
    const std::vector<double> target(4, 0.25), short_target(3, 1.0 / 3);
    EXPECT_THROW(mmd_gradient_exact(c, c.params(), 1, target, KernelConfig{}), IndexError);
    EXPECT_THROW(mmd_gradient_exact(c, c.params(), 0, short_target, KernelConfig{}), ValidationError);
}

TEST(ShotGradient, UnbiasedWithinThreeStandardErrors) {
    std::mt19937_64 rng(77);
    const auto c = random_mixed_circuit(4, 5, rng, 1.5);
    const auto params = c.params();
    std::vector<Bitstring> batch;
    for (int i = 0; i < 40; ++i) batch.push_back(rng() % 16);
    const auto target = empirical_distribution(batch, 4);
    const KernelConfig cfg{{1.0}};
    for (std::size_t k : {std::size_t{0}, params.size() / 2, params.size() - 1}) {
        const double exact = mmd_gradient_exact(c, params, k, target, cfg);
        std::vector<double> est;
        for (std::uint64_t r = 0; r < 10; ++r) est.push_back(mmd_gradient(c, params, k, batch, cfg, 100000, 500 + r));
        const double mean = std::accumulate(est.begin(), est.end(), 0.0) / 10.0;
        double ss = 0.0;
        for (double e : est) ss += (e - mean) * (e - mean);
        const double se = std::sqrt(ss / 9.0) / std::sqrt(10.0);
        EXPECT_LT(std::abs(mean - exact), 3.0 * se + 1e-12) << "param " << k;
    }
}

TEST(ShotGradient, FourTermEqualsWitnessForm) {
    std::mt19937_64 rng(5);
    const KernelConfig cfg{{0.25, 4.0}};
    const KernelOperator op(3, cfg);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Bitstring> q(50 + rng() % 50), plus(30 + rng() % 50), minus(20 + rng() % 50), data(5 + rng() % 20);
        for (auto* v : {&q, &plus, &minus, &data})
            for (auto& x : *v) x = rng() % 8;
        const auto qh = empirical_distribution(q, 3), ph = empirical_distribution(data, 3);
        std::vector<double> d(8);
        for (std::size_t i = 0; i < 8; ++i) d[i] = qh[i] - ph[i];
        const auto w = op.apply(d);
        const double witness = detail::witness_mean(w, plus) - detail::witness_mean(w, minus);
        EXPECT_NEAR(shift_gradient_from_samples(q, plus, minus, data, cfg), witness, 1e-13);
    }
    const std::vector<Bitstring> some{1}, none;
    EXPECT_THROW(shift_gradient_from_samples(some, some, none, some, cfg), ValidationError);
}

TEST(DeriveSeed, DistinctAcrossRoles) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t it = 0; it < 20; ++it)
        for (std::uint64_t k = 0; k < 20; ++k)
            for (std::uint64_t role = 0; role < 3; ++role) seen.insert(derive_seed(7, it, k, role));
    EXPECT_EQ(seen.size(), 20u * 20u * 3u);
    EXPECT_EQ(derive_seed(7, 1, 2, 3), derive_seed(7, 1, 2, 3));
}

TEST(ExtendCircuit, EmptyExtensionIsIdentical) {
    std::mt19937_64 rng(3);
    const auto base = random_mixed_circuit(5, 4, rng);
    const auto ext = extend_circuit(base, linear_graph(5), 0.01, 1);
    EXPECT_EQ(ext.params(), base.params());
    EXPECT_EQ(ext.gates().size(), base.gates().size());
}

TEST(ExtendCircuit, ParameterCountsAndOrder) {
    const Circuit base(9);
    const auto lin = linear_graph(9);
    const auto ext = extend_circuit(base, random_extension_graph(10, 4, lin), 0.01, 2);
    EXPECT_EQ(ext.param_count(), 150u);
    const auto all = extend_circuit(base, all_to_all_graph(lin), 0.01, 2);
    EXPECT_EQ(all.param_count(), 28u * 15u);
    Edge prev{-1, -1};
    for (const auto& g : all.gates()) {
        const Edge e{g.targets[0], g.targets[1]};
        EXPECT_LT(prev, e);
        prev = e;
    }
    EXPECT_THROW(extend_circuit(base, linear_graph(8), 0.01, 2), ValidationError);
    EXPECT_THROW(extend_circuit(base, lin, -1.0, 2), ValidationError);
}

TEST(ExtendCircuit, ZeroStdPreservesDistribution) {
    std::mt19937_64 rng(9);
    const auto base = random_mixed_circuit(5, 8, rng);
    const auto ext = extend_circuit(base, all_to_all_graph(linear_graph(5)), 0.0, 3);
    const auto a = probs(base, base.params()), b = probs(ext, ext.params());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
}

TEST(ExtendCircuit, NearIdentityChangesMmdLittle) {
    std::mt19937_64 rng(10);
    const auto base = random_mixed_circuit(6, 10, rng);
    const auto target = random_target(64, rng);
    const KernelConfig cfg{{0.25, 4.0}};
    const double before = mmd_exact(probs(base, base.params()), target, cfg);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto ext = extend_circuit(base, all_to_all_graph(linear_graph(6)), 0.01, seed);
        EXPECT_LT(std::abs(mmd_exact(probs(ext, ext.params()), target, cfg) - before), 0.01);
    }
}

TEST(TrainQcbm, DeterministicWithoutTiming) {
    const auto data = bas22();
    const auto s = split(data, 0.5, 1);
    TrainConfig cfg;
    cfg.iterations = 20;
    cfg.shots = 200;
    cfg.seed = 11;
    cfg.record_wall_time = false;
    const auto c = su4_chain(4, 0.1, 5);
    const auto a = train_qcbm(c, s.train, s.test, KernelConfig{}, cfg);
    const auto b = train_qcbm(c, s.train, s.test, KernelConfig{}, cfg);
    ASSERT_EQ(a.records.size(), 20u);
    EXPECT_EQ(a.params, b.params);
    std::ostringstream sa, sb;
    write_train_log_csv(sa, a);
    write_train_log_csv(sb, b);
    EXPECT_EQ(sa.str(), sb.str());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        EXPECT_EQ(a.records[i].iteration, static_cast<int>(i));
        EXPECT_EQ(a.records[i].wall_ms, 0.0);
    }
    cfg.seed = 12;
    EXPECT_NE(train_qcbm(c, s.train, s.test, KernelConfig{}, cfg).params, a.params);
}

TEST(TrainQcbm, FirstRecordMeasuredBeforeUpdate) {
    const auto data = bas22();
    const auto s = split(data, 0.5, 1);
    TrainConfig cfg;
    cfg.iterations = 3;
    cfg.eval_mode = EvalMode::Exact;
    const auto c = su4_chain(4, 0.3, 8);
    const auto log = train_qcbm(c, s.train, s.test, KernelConfig{}, cfg);
    const auto q = probs(c, c.params());
    EXPECT_NEAR(log.records[0].mmd_train, mmd_exact(q, empirical_distribution(s.train.samples, 4), KernelConfig{}), 1e-12);
    EXPECT_NEAR(log.records[0].mmd_test, mmd_exact(q, empirical_distribution(s.test.samples, 4), KernelConfig{}), 1e-12);
}

TEST(TrainQcbm, ZeroParameterCircuitGivesFlatLog) {
    const auto data = bas22();
    const auto s = split(data, 0.5, 1);
    TrainConfig cfg;
    cfg.iterations = 10;
    const auto log = train_qcbm(Circuit(4), s.train, s.test, KernelConfig{}, cfg);
    EXPECT_TRUE(log.params.empty());
    for (const auto& r : log.records) {
        EXPECT_EQ(r.mmd_train, log.records[0].mmd_train);
        EXPECT_EQ(r.mmd_test, log.records[0].mmd_test);
    }
}

TEST(TrainQcbm, ReducesMmdOnSmallBarsAndStripes) {
    const auto data = bas22();
    TrainConfig cfg;
    cfg.iterations = 150;
    cfg.adam.learning_rate = 0.05;
    cfg.eval_mode = EvalMode::Exact;
    cfg.seed = 3;
    const auto log = train_qcbm(su4_chain(4, 0.01, 3), data, data, KernelConfig{}, cfg);
    EXPECT_LT(final_train_mmd(log, 10), 0.5 * log.records[0].mmd_train);
}

TEST(TrainQcbm, MinibatchRunsAndValidates) {
    const auto data = generate_bas(3, 3);
    TrainConfig cfg;
    cfg.iterations = 5;
    cfg.shots = 100;
    cfg.minibatch_size = 4;
    const auto log = train_qcbm(su4_chain(9, 0.01, 1), data, data, KernelConfig{}, cfg);
    EXPECT_EQ(log.records.size(), 5u);
    cfg.minibatch_size = 15;
    EXPECT_THROW(train_qcbm(su4_chain(9, 0.01, 1), data, data, KernelConfig{}, cfg), ValidationError);
    cfg.minibatch_size = 0;
    cfg.iterations = 0;
    EXPECT_THROW(train_qcbm(Circuit(9), data, data, KernelConfig{}, cfg), ValidationError);
    cfg.iterations = 1;
    EXPECT_THROW(train_qcbm(Circuit(4), data, data, KernelConfig{}, cfg), ValidationError);
}

TEST(MovingAverage, TrailingWindow) {
    const std::vector<double> xs{1, 2, 3, 4, 5};
    const auto m = moving_average(xs, 2);
    EXPECT_EQ(m, (std::vector<double>{1, 1.5, 2.5, 3.5, 4.5}));
    const auto full = moving_average(xs, 10);
    EXPECT_DOUBLE_EQ(full.back(), 3.0);
    EXPECT_EQ(moving_average(xs, 1), xs);
    EXPECT_THROW(moving_average(xs, 0), ValidationError);
}

TEST(Aggregate, MeanAndSampleStd) {
    TrainLog a, b;
    for (int i = 0; i < 3; ++i) {
        a.records.push_back({i, 1.0 * i, 2.0, 0.0});
        b.records.push_back({i, 3.0 * i, 4.0, 0.0});
    }
    const std::vector<TrainLog> logs{a, b};
    const auto rows = aggregate_logs(logs, 1);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_DOUBLE_EQ(rows[2].train_mean, 4.0);
    EXPECT_DOUBLE_EQ(rows[2].train_std, std::sqrt(8.0));
    EXPECT_DOUBLE_EQ(rows[0].test_mean, 3.0);
    EXPECT_DOUBLE_EQ(rows[0].test_std, std::sqrt(2.0));
    EXPECT_DOUBLE_EQ(final_train_mmd(b, 2), 4.5);
    b.records.pop_back();
    const std::vector<TrainLog> ragged{a, b};
    EXPECT_THROW(aggregate_logs(ragged), ValidationError);
}

TEST(Csv, LogAndAggregateLayout) {
    TrainLog log;
    log.records = {{0, 0.5, 0.25, 1.5}};
    std::ostringstream os;
    write_train_log_csv(os, log);
    EXPECT_EQ(os.str(), "iteration,mmd_train,mmd_test,wall_ms\n0,0.5,0.25,1.5\n");
    const std::vector<AggregateRow> rows{{0, 0.5, 0.0, 0.25, 0.125}};
    std::ostringstream oa;
    write_aggregate_csv(oa, rows);
    EXPECT_EQ(oa.str(), "iteration,mmd_train_mean,mmd_train_std,mmd_test_mean,mmd_test_std\n0,0.5,0,0.25,0.125\n");
}
