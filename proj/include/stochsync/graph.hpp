#pragma once

/// Undirected graphs with oriented edges: incidence matrix, graph and edge
/// Laplacians, a cyclic Jacobi eigensolver for the small symmetric matrices
/// they produce, and spanning-tree enumeration.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace stochsync {

/// Dense row-major matrix. Only what the spectral routines need.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
        return t;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("Matrix product: inner dimensions differ");
        Matrix p(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const double aik = a(i, k);
                if (aik == 0.0) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) p(i, j) += aik * b(k, j);
            }
        return p;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

struct Edge {
    std::size_t tail = 0;
    std::size_t head = 0;
    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected graph on nodes 0..n-1 whose edges carry an arbitrary but fixed
/// orientation (tail -> head). The orientation only fixes signs in the
/// incidence matrix.
class Graph {
public:
    Graph() = default;

    Graph(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
        if (n_ == 0) throw std::invalid_argument("graph must have at least one node");
        for (std::size_t l = 0; l < edges_.size(); ++l) {
            const auto [t, h] = edges_[l];
            if (t >= n_ || h >= n_) {
                std::ostringstream msg;
                msg << "edge " << l << " references node outside [0, " << n_ << ")";
                throw std::invalid_argument(msg.str());
            }
            if (t == h) {
                std::ostringstream msg;
                msg << "edge " << l << " is a self-loop on node " << t;
                throw std::invalid_argument(msg.str());
            }
            for (std::size_t q = 0; q < l; ++q) {
                const auto& e = edges_[q];
                if ((e.tail == t && e.head == h) || (e.tail == h && e.head == t)) {
                    std::ostringstream msg;
                    msg << "edge " << l << " duplicates edge " << q;
                    throw std::invalid_argument(msg.str());
                }
            }
        }
    }

    /// Build from 1-based (tail, head) pairs as written in scenario files.
    static Graph from_one_based(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
        std::vector<Edge> edges;
        edges.reserve(pairs.size());
        for (const auto& [t, h] : pairs) {
            if (t == 0 || h == 0) throw std::invalid_argument("node labels are 1-based; found 0");
            edges.push_back({t - 1, h - 1});
        }
        return Graph(n, std::move(edges));
    }

    std::size_t node_count() const noexcept { return n_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const Edge& edge(std::size_t l) const { return edges_.at(l); }

    friend bool operator==(const Graph&, const Graph&) = default;

private:
    std::size_t n_ = 0;
    std::vector<Edge> edges_;
};

/// n x m matrix: +1 at the head of each edge, -1 at its tail.
inline Matrix incidence_matrix(const Graph& g) {
    Matrix b(g.node_count(), g.edge_count());
    for (std::size_t l = 0; l < g.edge_count(); ++l) {
        b(g.edge(l).head, l) = 1.0;
        b(g.edge(l).tail, l) = -1.0;
    }
    return b;
}

inline Matrix graph_laplacian(const Graph& g) {
    const Matrix b = incidence_matrix(g);
    return b * b.transposed();
}

inline Matrix edge_laplacian(const Graph& g) {
    const Matrix b = incidence_matrix(g);
    return b.transposed() * b;
}

namespace detail {

// Union-find over node indices, used for connectivity and cycle tests.
class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent_[b] = a;
        return true;
    }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace detail

inline bool is_connected(const Graph& g) {
    detail::DisjointSets sets(g.node_count());
    std::size_t components = g.node_count();
    for (const auto& e : g.edges())
        if (sets.unite(e.tail, e.head)) --components;
    return components == 1;
}

inline bool is_tree(const Graph& g) {
    return g.edge_count() + 1 == g.node_count() && is_connected(g);
}

/// Connected, max degree two, and acyclic.
inline bool is_line(const Graph& g) {
    if (!is_tree(g)) return false;
    std::vector<std::size_t> degree(g.node_count(), 0);
    for (const auto& e : g.edges()) {
        ++degree[e.tail];
        ++degree[e.head];
    }
    return std::all_of(degree.begin(), degree.end(), [](std::size_t d) { return d <= 2; });
}

/// Two-colourability; equivalently, the graph has no odd cycle.
inline bool is_bipartite(const Graph& g) {
    const std::size_t n = g.node_count();
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& e : g.edges()) {
        adj[e.tail].push_back(e.head);
        adj[e.head].push_back(e.tail);
    }
    std::vector<int> colour(n, -1);
    std::vector<std::size_t> queue;
    for (std::size_t start = 0; start < n; ++start) {
        if (colour[start] != -1) continue;
        colour[start] = 0;
        queue.assign(1, start);
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            const std::size_t u = queue[qi];
            for (std::size_t v : adj[u]) {
                if (colour[v] == -1) {
                    colour[v] = 1 - colour[u];
                    queue.push_back(v);
                } else if (colour[v] == colour[u]) {
                    return false;
                }
            }
        }
    }
    return true;
}

struct SpectralSummary {
    std::vector<double> eigenvalues;  // ascending
    std::optional<double> lambda_min_positive;
    double lambda_max = 0.0;
};

inline constexpr double kSymmetryTolerance = 1e-10;
inline constexpr double kJacobiOffDiagonalTolerance = 1e-12;

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops below
/// 1e-12 (scaled by the matrix norm when that exceeds one).
inline SpectralSummary symmetric_eigenvalues(const Matrix& input) {
    const std::size_t n = input.rows();
    if (input.cols() != n) throw std::invalid_argument("symmetric_eigenvalues: matrix is not square");

    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(input(i, j)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double diff = std::abs(input(i, j) - input(j, i));
            if (diff > kSymmetryTolerance * std::max(1.0, scale)) {
                std::ostringstream msg;
                msg << "symmetric_eigenvalues: matrix is not symmetric at (" << i << ", " << j
                    << "), |a_ij - a_ji| = " << diff;
                throw std::invalid_argument(msg.str());
            }
        }

    Matrix a = input;
    auto off_norm = [&a, n] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
        return std::sqrt(s);
    };
    const double tol = kJacobiOffDiagonalTolerance * std::max(1.0, scale);

    for (int sweep = 0; sweep < 100 && off_norm() > tol; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }

    SpectralSummary out;
    out.eigenvalues.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.eigenvalues[i] = a(i, i);
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
    if (n > 0) out.lambda_max = out.eigenvalues.back();
    const double zero_tol = 1e-9 * std::max(1.0, std::abs(out.lambda_max));
    for (double ev : out.eigenvalues)
        if (ev > zero_tol) {
            out.lambda_min_positive = ev;
            break;
        }
    return out;
}

inline constexpr std::size_t kSpanningTreeEdgeLimit = 20;

/// All spanning trees, by include/exclude recursion over the edge list.
/// An edge is included only if it joins two components and excluded only if
/// the remaining edges can still connect the graph, so every leaf is a tree.
inline std::vector<Graph> spanning_trees(const Graph& g) {
    if (g.edge_count() > kSpanningTreeEdgeLimit) {
        std::ostringstream msg;
        msg << "spanning_trees: " << g.edge_count() << " edges exceeds the enumeration limit of "
            << kSpanningTreeEdgeLimit << "; sampling mode is not supported";
        throw std::invalid_argument(msg.str());
    }
    if (!is_connected(g)) throw std::invalid_argument("spanning_trees: graph is disconnected");

    const std::size_t n = g.node_count();
    const std::size_t m = g.edge_count();
    std::vector<Graph> trees;
    std::vector<std::size_t> chosen;

    auto can_connect = [&](std::size_t from) {
        detail::DisjointSets sets(n);
        std::size_t components = n;
        for (std::size_t l : chosen)
            if (sets.unite(g.edge(l).tail, g.edge(l).head)) --components;
        for (std::size_t l = from; l < m; ++l)
            if (sets.unite(g.edge(l).tail, g.edge(l).head)) --components;
        return components == 1;
    };

    auto recurse = [&](auto&& self, std::size_t next) -> void {
        if (chosen.size() == n - 1) {
            std::vector<Edge> edges;
            edges.reserve(chosen.size());
            for (std::size_t l : chosen) edges.push_back(g.edge(l));
            trees.emplace_back(n, std::move(edges));
            return;
        }
        if (next == m) return;

        detail::DisjointSets sets(n);
        for (std::size_t l : chosen) sets.unite(g.edge(l).tail, g.edge(l).head);
        if (sets.find(g.edge(next).tail) != sets.find(g.edge(next).head)) {
            chosen.push_back(next);
            self(self, next + 1);
            chosen.pop_back();
        }
        if (can_connect(next + 1)) self(self, next + 1);
    };
    recurse(recurse, 0);
    return trees;
}

/// Minimum over spanning trees of the smallest edge-Laplacian eigenvalue.
inline double min_spanning_tree_eigenvalue(const Graph& g) {
    double best = std::numeric_limits<double>::infinity();
    for (const Graph& tree : spanning_trees(g)) {
        const SpectralSummary s = symmetric_eigenvalues(edge_laplacian(tree));
        if (!s.eigenvalues.empty()) best = std::min(best, s.eigenvalues.front());
    }
    if (!std::isfinite(best)) throw std::invalid_argument("min_spanning_tree_eigenvalue: graph has no edges");
    return best;
}

inline double max_edge_laplacian_eigenvalue(const Graph& g) {
    return symmetric_eigenvalues(edge_laplacian(g)).lambda_max;
}

}  // namespace stochsync
