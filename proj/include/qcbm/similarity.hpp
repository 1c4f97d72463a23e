#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qcbm/data.hpp"
#include "qcbm/error.hpp"
#include "qcbm/format.hpp"

namespace qcbm {

// Symmetric F x F feature distance matrix.
using DistanceMatrix = Eigen::MatrixXd;

using Edge = std::pair<int, int>;  // always first < second

inline Edge make_edge(int a, int b) {
    if (a == b) throw ValidationError("self-loops are not allowed");
    return a < b ? Edge{a, b} : Edge{b, a};
}

// Undirected graph over qubits. baseline_edges marks the pretrained chain;
// every other edge is an extension edge.
struct SimilarityGraph {
    int n_vertices = 0;
    std::set<Edge> edges;
    std::set<Edge> baseline_edges;

    std::vector<Edge> extension_edges() const {
        std::vector<Edge> out;
        for (const auto& e : edges) {
            if (!baseline_edges.contains(e)) out.push_back(e);
        }
        return out;  // sorted by (min, max) because std::set is
    }

    void add_edge(int a, int b) {
        check_vertex(a);
        check_vertex(b);
        edges.insert(make_edge(a, b));
    }

    void validate() const {
        for (const auto& [a, b] : edges) {
            if (a >= b) throw ValidationError("edge endpoints must be ordered and distinct");
            check_vertex(a);
            check_vertex(b);
        }
        for (const auto& e : baseline_edges) {
            if (!edges.contains(e)) throw ValidationError("baseline edge missing from edge set");
        }
    }

private:
    void check_vertex(int v) const {
        if (v < 0 || v >= n_vertices) throw IndexError("graph vertex out of range");
    }
};

inline DistanceMatrix hamming_matrix(const BinaryDataset& data) {
    if (data.empty()) throw ValidationError("hamming_matrix: empty dataset");
    const int f = data.n_features;
    DistanceMatrix d = DistanceMatrix::Zero(f, f);
    const double n = static_cast<double>(data.size());
    for (int i = 0; i < f; ++i) {
        for (int j = i + 1; j < f; ++j) {
            std::size_t differ = 0;  // c01 + c10
            for (auto x : data.samples) differ += static_cast<std::size_t>(bit_at(x, i) != bit_at(x, j));
            d(i, j) = d(j, i) = static_cast<double>(differ) / n;
        }
    }
    return d;
}

namespace detail {

inline double plogp_sum(std::span<const double> counts, double n) {
    double h = 0.0;
    for (double c : counts) {
        if (c > 0) {
            const double p = c / n;
            h -= p * std::log(p);
        }
    }
    return h;
}

// Variation of information between two binary columns, in nats.
inline double pair_vi(const BinaryDataset& data, int a, int b, bool normalized) {
    std::array<double, 4> joint{};
    for (auto x : data.samples) joint[static_cast<std::size_t>(2 * bit_at(x, a) + bit_at(x, b))] += 1.0;
    const double n = static_cast<double>(data.size());
    const std::array<double, 2> ma{joint[0] + joint[1], joint[2] + joint[3]};
    const std::array<double, 2> mb{joint[0] + joint[2], joint[1] + joint[3]};
    const double h_joint = plogp_sum(joint, n);
    const double h_a = plogp_sum(ma, n);
    const double h_b = plogp_sum(mb, n);
    const double vi = std::max(0.0, 2.0 * h_joint - h_a - h_b);
    if (!normalized) return vi;
    if (h_joint <= 0.0) {
        // Both columns constant: identical -> 0, different constants -> 1.
        return (joint[1] == 0.0 && joint[2] == 0.0) ? 0.0 : 1.0;
    }
    return std::clamp(vi / h_joint, 0.0, 1.0);
}

}  // namespace detail

// VI(X,Y) = H(X|Y) + H(Y|X), natural log; the normalized form divides by H(X,Y).
inline DistanceMatrix vi_matrix(const BinaryDataset& data, bool normalized = true) {
    if (data.empty()) throw ValidationError("vi_matrix: empty dataset");
    const int f = data.n_features;
    DistanceMatrix d = DistanceMatrix::Zero(f, f);
    for (int i = 0; i < f; ++i) {
        for (int j = i + 1; j < f; ++j) d(i, j) = d(j, i) = detail::pair_vi(data, i, j, normalized);
    }
    return d;
}

// Entries equal to the threshold (within rounding) count as connected.
inline constexpr double kThresholdTieTolerance = 1e-12;

inline SimilarityGraph threshold_graph(const DistanceMatrix& m, double threshold, const SimilarityGraph& baseline) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) throw ValidationError("threshold must be in [0, 1]");
    if (m.rows() != m.cols() || m.rows() != baseline.n_vertices) {
        throw ValidationError("threshold_graph: matrix size does not match graph");
    }
    SimilarityGraph g = baseline;
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = i + 1; j < m.cols(); ++j) {
            if (m(i, j) <= threshold + kThresholdTieTolerance) g.edges.insert({i, j});
        }
    }
    return g;
}

inline std::size_t count_connections(const DistanceMatrix& m, double threshold) {
    std::size_t count = 0;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = i + 1; j < m.cols(); ++j) count += m(i, j) <= threshold + kThresholdTieTolerance ? 1 : 0;
    return count;
}

// Number of feature pairs within each threshold (baseline not included).
inline std::vector<std::pair<double, std::size_t>> connections_vs_threshold(const DistanceMatrix& m,
                                                                            std::span<const double> thresholds) {
    if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
        throw ValidationError("threshold grid must be sorted ascending");
    }
    std::vector<std::pair<double, std::size_t>> out;
    out.reserve(thresholds.size());
    for (double t : thresholds) out.emplace_back(t, count_connections(m, t));
    return out;
}

// Evenly spaced grid over [lo, hi] with `points` entries.
inline std::vector<double> threshold_grid(double lo, double hi, int points) {
    if (points < 2) throw ValidationError("threshold grid needs at least 2 points");
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
    return g;
}

// --- preset connectivities ---

// Chain (q, q+1); all edges are baseline edges.
inline SimilarityGraph linear_graph(int n) {
    if (n < 1) throw ValidationError("linear_graph: n must be >= 1");
    SimilarityGraph g;
    g.n_vertices = n;
    for (int q = 0; q + 1 < n; ++q) g.edges.insert({q, q + 1});
    g.baseline_edges = g.edges;
    return g;
}

// Baseline plus every 4-neighbourhood pair of a rows x cols grid. Qubit q sits
// on grid cell order[q] (row-major cell numbering).
inline SimilarityGraph grid_nn_graph(int rows, int cols, std::span<const int> order, const SimilarityGraph& baseline) {
    const int n = rows * cols;
    if (rows < 1 || cols < 1 || n != baseline.n_vertices || static_cast<int>(order.size()) != n ||
        !is_permutation_of_iota(order)) {
        throw ValidationError("grid_nn_graph: grid, order and baseline sizes disagree");
    }
    SimilarityGraph g = baseline;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            const int ca = order[static_cast<std::size_t>(a)], cb = order[static_cast<std::size_t>(b)];
            const int dr = std::abs(ca / cols - cb / cols), dc = std::abs(ca % cols - cb % cols);
            if (dr + dc == 1) g.edges.insert({a, b});
        }
    }
    return g;
}

inline SimilarityGraph all_to_all_graph(const SimilarityGraph& baseline) {
    SimilarityGraph g = baseline;
    for (int a = 0; a < g.n_vertices; ++a)
        for (int b = a + 1; b < g.n_vertices; ++b) g.edges.insert({a, b});
    return g;
}

// Baseline plus `count` distinct non-baseline edges drawn uniformly.
inline SimilarityGraph random_extension_graph(std::size_t count, std::uint64_t seed, const SimilarityGraph& baseline) {
    std::vector<Edge> candidates;
    for (int a = 0; a < baseline.n_vertices; ++a)
        for (int b = a + 1; b < baseline.n_vertices; ++b)
            if (!baseline.edges.contains({a, b})) candidates.push_back({a, b});
    if (count > candidates.size()) throw ValidationError("random_extension: not enough free edges");
    std::mt19937_64 rng(seed);
    std::shuffle(candidates.begin(), candidates.end(), rng);
    SimilarityGraph g = baseline;
    for (std::size_t i = 0; i < count; ++i) g.edges.insert(candidates[i]);
    return g;
}

// Renames vertex q to labels[q].
inline SimilarityGraph relabel(const SimilarityGraph& g, std::span<const int> labels) {
    if (static_cast<int>(labels.size()) != g.n_vertices) throw ValidationError("relabel: size mismatch");
    SimilarityGraph out;
    out.n_vertices = g.n_vertices;
    for (const auto& [a, b] : g.edges) {
        const auto e = make_edge(labels[static_cast<std::size_t>(a)], labels[static_cast<std::size_t>(b)]);
        out.edges.insert(e);
        if (g.baseline_edges.contains({a, b})) out.baseline_edges.insert(e);
    }
    return out;
}

// --- file formats ---

// F x F, row-major, 12 significant digits.
inline void write_distance_csv(std::ostream& os, const DistanceMatrix& m) {
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) os << (j ? "," : "") << format_sig(m(i, j), 12);
        os << '\n';
    }
}

inline void write_threshold_curve_csv(std::ostream& os, const std::vector<std::pair<double, std::size_t>>& curve) {
    os << "threshold,connections\n";
    for (const auto& [t, c] : curve) os << format_sig(t, 12) << ',' << c << '\n';
}

// "# n_vertices=<n>" then one "i j baseline|ext" line per edge.
inline void write_graph(std::ostream& os, const SimilarityGraph& g) {
    os << "# n_vertices=" << g.n_vertices << '\n';
    for (const auto& e : g.edges) {
        os << e.first << ' ' << e.second << ' ' << (g.baseline_edges.contains(e) ? "baseline" : "ext") << '\n';
    }
}

inline SimilarityGraph read_graph(std::istream& is) {
    SimilarityGraph g;
    g.n_vertices = -1;
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::pair<Edge, bool>> pending;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto pos = line.find("n_vertices=");
            if (pos != std::string::npos) g.n_vertices = static_cast<int>(parse_int(line.substr(pos + 11), lineno));
            continue;
        }
        std::istringstream ls(line);
        std::string a, b, tag;
        ls >> a >> b >> tag;
        if (a.empty() || b.empty()) throw FormatError("edge line needs two vertices", lineno);
        if (!tag.empty() && tag != "baseline" && tag != "ext") throw FormatError("edge tag must be baseline or ext", lineno);
        const int ia = static_cast<int>(parse_int(a, lineno)), ib = static_cast<int>(parse_int(b, lineno));
        if (ia == ib) throw FormatError("self-loop in graph file", lineno);
        pending.push_back({make_edge(ia, ib), tag == "baseline"});
    }
    if (g.n_vertices < 0) {
        int mx = -1;
        for (const auto& [e, base] : pending) mx = std::max(mx, e.second);
        g.n_vertices = mx + 1;
    }
    for (const auto& [e, base] : pending) {
        if (e.first < 0 || e.second >= g.n_vertices) throw FormatError("edge vertex out of range");
        g.edges.insert(e);
        if (base) g.baseline_edges.insert(e);
    }
    return g;
}

}  // namespace qcbm
