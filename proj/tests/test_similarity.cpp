#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "qcbm/data.hpp"
#include "qcbm/similarity.hpp"

using namespace qcbm;

namespace {

std::vector<int> column(const BinaryDataset& d, int f) {
    std::vector<int> c;
    for (auto x : d.samples) c.push_back(static_cast<int>((x >> f) & 1u));
    return c;
}

// H(X|Y) + H(Y|X) from conditional frequencies.
double vi_oracle(const std::vector<int>& x, const std::vector<int>& y) {
    std::map<std::pair<int, int>, double> joint;
    std::map<int, double> px, py;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        joint[{x[i], y[i]}] += 1.0 / n;
        px[x[i]] += 1.0 / n;
        py[y[i]] += 1.0 / n;
    }
    double h_x_given_y = 0.0, h_y_given_x = 0.0;
    for (const auto& [k, p] : joint) {
        h_x_given_y -= p * std::log(p / py[k.second]);
        h_y_given_x -= p * std::log(p / px[k.first]);
    }
    return h_x_given_y + h_y_given_x;
}

BinaryDataset random_dataset(int n_features, std::size_t rows, std::mt19937_64& rng) {
    std::vector<Bitstring> xs(rows);
    const Bitstring mask = (Bitstring{1} << n_features) - 1;
    for (auto& x : xs) x = rng() & mask;
    // Correlate some columns so distances are not all near 0.5.
    for (auto& x : xs) {
        if (rng() % 2) x = (x & ~Bitstring{2}) | ((x & 1u) << 1);
        if (rng() % 5 == 0) x &= ~Bitstring{4};
    }
    return BinaryDataset(n_features, xs);
}

BinaryDataset bas_train_split() {
    const auto bas = permute_features(generate_bas(3, 3), snake_order(3, 3));
    return split(bas, 0.8, 42).train;
}

}  // namespace

TEST(Hamming, HandComputedExample) {
    // Columns: f0 = 1100, f1 = 1010, f2 = 0010.
    const BinaryDataset d(3, {0b011, 0b001, 0b110, 0b000});
    const auto m = hamming_matrix(d);
    EXPECT_DOUBLE_EQ(m(0, 1), 0.5);
    EXPECT_DOUBLE_EQ(m(0, 2), 0.75);
    EXPECT_DOUBLE_EQ(m(1, 2), 0.25);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(m(i, i), 0.0);
    EXPECT_TRUE(m.isApprox(m.transpose()));
    EXPECT_THROW(hamming_matrix(BinaryDataset(3, {})), ValidationError);
}

TEST(Vi, IdentityIndependenceAndComplement) {
    // f0 and f1 independent and uniform, f2 = f0, f3 = not f0.
    std::vector<Bitstring> xs;
    for (Bitstring a = 0; a < 2; ++a)
        for (Bitstring b = 0; b < 2; ++b) xs.push_back(a | (b << 1) | (a << 2) | ((1 - a) << 3));
    const BinaryDataset d(4, xs);
    const auto raw = vi_matrix(d, false);
    const auto norm = vi_matrix(d, true);
    EXPECT_NEAR(raw(0, 1), 2.0 * std::log(2.0), 1e-12);
    EXPECT_NEAR(norm(0, 1), 1.0, 1e-12);
    EXPECT_NEAR(raw(0, 2), 0.0, 1e-12);
    EXPECT_NEAR(raw(0, 3), 0.0, 1e-12);
    EXPECT_NEAR(norm(0, 3), 0.0, 1e-12);
}

TEST(Vi, ConstantColumnConvention) {
    // f0 = 0 always, f1 = 1 always, f2 = 0 always, f3 varies.
    const BinaryDataset d(4, {0b0010, 0b1010});
    const auto m = vi_matrix(d);
    EXPECT_EQ(m(0, 2), 0.0);
    EXPECT_EQ(m(0, 1), 1.0);
    EXPECT_NEAR(m(0, 3), 1.0, 1e-12);
}

TEST(Vi, MatchesConditionalEntropyOracle) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const auto d = random_dataset(5, 5 + rng() % 60, rng);
        const auto raw = vi_matrix(d, false);
        const auto norm = vi_matrix(d, true);
        for (int i = 0; i < 5; ++i) {
            for (int j = i + 1; j < 5; ++j) {
                const auto ci = column(d, i), cj = column(d, j);
                const double vi = vi_oracle(ci, cj);
                EXPECT_NEAR(raw(i, j), vi, 1e-12);
                // H(X,Y) = H(X|Y) + H(Y|X) + I(X;Y) >= VI; normalized lies in [0,1].
                EXPECT_GE(norm(i, j), 0.0);
                EXPECT_LE(norm(i, j), 1.0);
            }
        }
    }
}

TEST(Distances, SymmetricBoundedAndMetric) {
    std::mt19937_64 rng(33);
    int triples = 0;
    while (triples < 1000) {
        const auto d = random_dataset(6, 3 + rng() % 40, rng);
        for (const auto& m : {hamming_matrix(d), vi_matrix(d), vi_matrix(d, false)}) {
            EXPECT_LT((m - m.transpose()).cwiseAbs().maxCoeff(), 1e-15);
            for (int i = 0; i < 6; ++i) EXPECT_EQ(m(i, i), 0.0);
            for (int a = 0; a < 6; ++a)
                for (int b = 0; b < 6; ++b)
                    for (int c = 0; c < 6; ++c) {
                        EXPECT_LE(m(a, c), m(a, b) + m(b, c) + 1e-12);
                        ++triples;
                    }
        }
        const auto h = hamming_matrix(d);
        EXPECT_GE(h.minCoeff(), 0.0);
        EXPECT_LE(h.maxCoeff(), 1.0);
    }
}

TEST(Vi, SelfDistanceZero) {
    std::mt19937_64 rng(2);
    const auto d = random_dataset(3, 30, rng);
    // Duplicate column 0 into a fresh feature.
    std::vector<Bitstring> xs;
    for (auto x : d.samples) xs.push_back(x | ((x & 1u) << 3));
    const auto m = vi_matrix(BinaryDataset(4, xs));
    EXPECT_NEAR(m(0, 3), 0.0, 1e-12);
}

TEST(ThresholdGraph, BarsAndStripesExtensionCount) {
    const auto train = bas_train_split();
    ASSERT_EQ(train.size(), 11u);
    // Brute-force count of non-chain pairs differing on at most half the images.
    std::size_t expected = 0;
    for (int i = 0; i < 9; ++i) {
        for (int j = i + 2; j < 9; ++j) {
            const auto ci = column(train, i), cj = column(train, j);
            std::size_t differ = 0;
            for (std::size_t s = 0; s < ci.size(); ++s) differ += ci[s] != cj[s];
            if (2 * differ <= train.size()) ++expected;
        }
    }
    const auto g = threshold_graph(hamming_matrix(train), 0.5, linear_graph(9));
    EXPECT_EQ(g.extension_edges().size(), expected);
    EXPECT_EQ(g.extension_edges().size(), 10u);
    EXPECT_EQ(g.baseline_edges.size(), 8u);
}

TEST(ThresholdGraph, ExtremesAndErrors) {
    std::mt19937_64 rng(5);
    const auto d = random_dataset(5, 20, rng);
    const auto m = vi_matrix(d);
    const auto base = linear_graph(5);
    EXPECT_EQ(threshold_graph(m, 1.0, base).edges.size(), 10u);
    EXPECT_THROW(threshold_graph(m, -0.1, base), ValidationError);
    EXPECT_THROW(threshold_graph(m, 1.5, base), ValidationError);
    EXPECT_THROW(threshold_graph(m, 0.5, linear_graph(4)), ValidationError);
    const DistanceMatrix tie = DistanceMatrix::Constant(3, 3, 0.5);
    EXPECT_EQ(threshold_graph(tie, 0.5, linear_graph(3)).edges.size(), 3u);
}

TEST(ConnectionsVsThreshold, NonDecreasing) {
    const auto train = bas_train_split();
    const auto grid = threshold_grid(0.0, 1.0, 100);
    ASSERT_EQ(grid.size(), 100u);
    EXPECT_EQ(grid.front(), 0.0);
    EXPECT_EQ(grid.back(), 1.0);
    for (const auto& m : {hamming_matrix(train), vi_matrix(train)}) {
        const auto curve = connections_vs_threshold(m, grid);
        for (std::size_t i = 1; i < curve.size(); ++i) EXPECT_GE(curve[i].second, curve[i - 1].second);
        EXPECT_EQ(curve.back().second, 36u);
    }
    const std::vector<double> unsorted{0.5, 0.1};
    EXPECT_THROW(connections_vs_threshold(hamming_matrix(train), unsorted), ValidationError);
    EXPECT_THROW(threshold_grid(0, 1, 1), ValidationError);
}

TEST(Presets, EdgeCounts) {
    const auto lin = linear_graph(9);
    EXPECT_EQ(lin.edges.size(), 8u);
    EXPECT_TRUE(lin.extension_edges().empty());
    const auto order = snake_order(3, 3);
    const auto nn = grid_nn_graph(3, 3, order, lin);
    EXPECT_EQ(nn.edges.size(), 12u);
    EXPECT_EQ(nn.extension_edges().size(), 4u);
    const auto all = all_to_all_graph(lin);
    EXPECT_EQ(all.extension_edges().size(), 28u);
    const auto rnd = random_extension_graph(10, 7, lin);
    EXPECT_EQ(rnd.extension_edges().size(), 10u);
    EXPECT_EQ(random_extension_graph(10, 7, lin).edges, rnd.edges);
    EXPECT_NE(random_extension_graph(10, 8, lin).edges, rnd.edges);
    EXPECT_THROW(random_extension_graph(29, 7, lin), ValidationError);
    EXPECT_THROW(grid_nn_graph(2, 4, order, lin), ValidationError);
    EXPECT_THROW(linear_graph(0), ValidationError);
}

TEST(Presets, GridNeighboursUnderSnakeOrder) {
    // Snake order puts qubit q on cell (0,1,2,5,4,3,6,7,8)[q]; the vertical
    // cell pairs 0-3, 1-4, 4-7 and 5-8 are the only ones not on the chain.
    const auto nn = grid_nn_graph(3, 3, snake_order(3, 3), linear_graph(9));
    const std::set<Edge> expected_ext{{0, 5}, {1, 4}, {4, 7}, {3, 8}};
    const auto ext = nn.extension_edges();
    EXPECT_EQ(std::set<Edge>(ext.begin(), ext.end()), expected_ext);
}

TEST(GraphIo, Roundtrip) {
    const auto g = random_extension_graph(6, 3, linear_graph(7));
    std::stringstream ss;
    write_graph(ss, g);
    const auto r = read_graph(ss);
    EXPECT_EQ(r.n_vertices, 7);
    EXPECT_EQ(r.edges, g.edges);
    EXPECT_EQ(r.baseline_edges, g.baseline_edges);
}

TEST(GraphIo, MalformedInput) {
    std::istringstream a("# n_vertices=3\n0 1 baseline\n1 1 ext\n");
    try {
        read_graph(a);
        FAIL();
    } catch (const FormatError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }
    std::istringstream b("0 1 maybe\n");
    EXPECT_THROW(read_graph(b), FormatError);
    std::istringstream c("# n_vertices=2\n0 5 ext\n");
    EXPECT_THROW(read_graph(c), FormatError);
    std::istringstream d("x 1\n");
    EXPECT_THROW(read_graph(d), FormatError);
}

TEST(Csv, DistanceAndCurveLayout) {
    DistanceMatrix m(2, 2);
    m << 0, 0.25, 0.25, 0;
    std::ostringstream a;
    write_distance_csv(a, m);
    EXPECT_EQ(a.str(), "0,0.25\n0.25,0\n");
    std::ostringstream b;
    write_threshold_curve_csv(b, {{0.0, 0}, {0.5, 3}});
    EXPECT_EQ(b.str(), "threshold,connections\n0,0\n0.5,3\n");
}
