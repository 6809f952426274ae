#pragma once

// Independent reference computations shared by the unit and acceptance
// suites. None of these reuse library code paths beyond graph construction.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include "stochsync/dynamics.hpp"
#include "stochsync/graph.hpp"

namespace oracle {

// Determinant of the Laplacian with its last row and column removed
// (matrix-tree theorem), built directly from the edge list.
inline double spanning_tree_count(const stochsync::Graph& g) {
    const std::size_t n = g.node_count() - 1;
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    for (const auto& e : g.edges()) {
        const std::size_t i = e.tail, j = e.head;
        if (i < n) a[i][i] += 1.0;
        if (j < n) a[j][j] += 1.0;
        if (i < n && j < n) {
            a[i][j] -= 1.0;
            a[j][i] -= 1.0;
        }
    }
    double det = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t r = k + 1; r < n; ++r)
            if (std::abs(a[r][k]) > std::abs(a[p][k])) p = r;
        if (std::abs(a[p][k]) < 1e-12) return 0.0;
        if (p != k) {
            std::swap(a[p], a[k]);
            det = -det;
        }
        det *= a[k][k];
        for (std::size_t r = k + 1; r < n; ++r) {
            const double f = a[r][k] / a[k][k];
            for (std::size_t c = k; c < n; ++c) a[r][c] -= f * a[k][c];
        }
    }
    return det;
}

// Connected graphs on 2..7 nodes: paths, cycles, complete graphs up to K6,
// the five-node example graph, and random draws.
inline std::vector<stochsync::Graph> graph_corpus(std::size_t random_count, std::uint64_t seed) {
    using stochsync::Edge;
    using stochsync::Graph;
    std::vector<Graph> out;
    for (std::size_t n = 2; n <= 7; ++n) {
        std::vector<Edge> path, cycle, complete;
        for (std::size_t i = 0; i + 1 < n; ++i) path.push_back({i, i + 1});
        out.emplace_back(n, path);
        if (n >= 3) {
            cycle = path;
            cycle.push_back({n - 1, 0});
            out.emplace_back(n, cycle);
        }
        if (n <= 6) {
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j) complete.push_back({i, j});
            out.emplace_back(n, complete);
        }
    }
    out.push_back(Graph::from_one_based(5, {{1, 2}, {2, 3}, {3, 4}, {1, 4}, {4, 5}}));

    std::mt19937_64 rng(seed);
    std::size_t added = 0;
    while (added < random_count) {
        const std::size_t n = 2 + rng() % 6;
        std::vector<Edge> edges;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (rng() % 2) edges.push_back({i, j});
        Graph g(n, edges);
        if (stochsync::is_connected(g) && g.edge_count() <= stochsync::kSpanningTreeEdgeLimit) {
            out.push_back(std::move(g));
            ++added;
        }
    }
    return out;
}

// E|Z|, Z ~ N(mu, variance), by composite Simpson on mu +- 12 sigma, split at 0.
inline double folded_mean_by_quadrature(double mu, double variance) {
    const double sigma = std::sqrt(variance);
    const double lo = mu - 12.0 * sigma, hi = mu + 12.0 * sigma;
    const std::size_t n = 20000;
    const auto f = [&](double x) {
        const double z = (x - mu) / sigma;
        return std::abs(x) * std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
    };
    const auto simpson = [&](double a, double b, std::size_t k) {
        if (b <= a) return 0.0;
        const double w = (b - a) / static_cast<double>(k);
        double s = f(a) + f(b);
        for (std::size_t i = 1; i < k; ++i) s += f(a + static_cast<double>(i) * w) * (i % 2 ? 4.0 : 2.0);
        return s * w / 3.0;
    };
    if (lo < 0.0 && hi > 0.0) return simpson(lo, 0.0, n) + simpson(0.0, hi, n);
    return simpson(lo, hi, 2 * n);
}

// Random connected 5-node scenario with mixed-sign Gaussian weights.
inline stochsync::Scenario random_five_node_scenario(std::mt19937_64& rng) {
    using namespace stochsync;
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Edge> edges;
    for (std::size_t i = 1; i < 5; ++i) edges.push_back({static_cast<std::size_t>(rng() % i), i});
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = i + 1; j < 5; ++j) {
            const bool present = std::any_of(edges.begin(), edges.end(), [&](const Edge& e) {
                return (e.tail == i && e.head == j) || (e.tail == j && e.head == i);
            });
            if (!present && rng() % 3 == 0) edges.push_back({i, j});
        }
    Scenario sc;
    sc.graph = Graph(5, edges);
    sc.coupling = CouplingSpec({{1.0, 1.0, 0.0, TermKind::sine}, {0.3, 3.0, 0.0, TermKind::sine}});
    sc.kappa = 5.0 * (1.0 + u(rng));
    sc.tau = 0.01;
    GaussianUncertainty m;
    for (std::size_t l = 0; l < edges.size(); ++l) m.edge_means.push_back(2.0 * u(rng));
    m.edge_variance = 0.3;
    for (int i = 0; i < 5; ++i) {
        m.freq_const.push_back(3.0 * u(rng));
        m.freq_noise_means.push_back(u(rng));
        m.freq_noise_variances.push_back(1.0 + u(rng));
    }
    sc.model = m;
    return sc;
}

// Largest deviation between per-node stepping and edge-form stepping, one
// step at a time from the node trajectory, over `steps` shared draws.
inline double step_form_discrepancy(const stochsync::Scenario& sc, std::uint64_t seed, std::size_t steps) {
    using namespace stochsync;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    Stream stream(seed ^ 0x5bd1e995ULL);
    PhaseState s;
    for (std::size_t i = 0; i < sc.graph.node_count(); ++i) s.phases.push_back(u(rng));
    double worst = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        const auto rel = relative_phases(sc.graph, s);
        const StepDraws d = draw_step(sc.model, sc.graph, stream);
        s = apply_step(sc.graph, sc.coupling, sc.kappa, sc.tau, s, d);
        const auto compact = apply_step_compact(sc.graph, sc.coupling, sc.kappa, sc.tau, rel, d);
        const auto from_nodes = relative_phases(sc.graph, s);
        for (std::size_t l = 0; l < rel.size(); ++l)
            worst = std::max(worst, std::abs(wrap_angle(from_nodes[l] - compact[l])));
    }
    return worst;
}

}  // namespace oracle
