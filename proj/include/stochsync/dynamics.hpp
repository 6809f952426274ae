#pragma once

/// Discrete-time phase-coupled oscillator chain: circle arithmetic, the
/// per-node update under Gaussian or Bernoulli edge uncertainty, the
/// equivalent relative-phase (edge) form, and trajectory recording.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "stochsync/coupling.hpp"
#include "stochsync/graph.hpp"
#include "stochsync/stochastic.hpp"

namespace stochsync {

/// Representative of x mod 2pi in (-pi, pi].
inline double wrap_angle(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("wrap_angle: non-finite angle");
    double r = std::remainder(x, kTwoPi);
    if (r <= -kPi) r += kTwoPi;
    if (r > kPi) r -= kTwoPi;
    return r;
}

/// Shorter arc length between two angles, in [0, pi].
inline double geodesic_distance(double a, double b) { return std::abs(wrap_angle(a - b)); }

struct PhaseState {
    std::vector<double> phases;
    std::size_t step = 0;
};

/// Per-edge wrapped relative phase, head minus tail.
inline std::vector<double> relative_phases(const Graph& g, std::span<const double> phases) {
    if (phases.size() != g.node_count()) throw std::invalid_argument("relative_phases: phase vector has wrong length");
    std::vector<double> rel(g.edge_count());
    for (std::size_t l = 0; l < rel.size(); ++l) rel[l] = wrap_angle(phases[g.edge(l).head] - phases[g.edge(l).tail]);
    return rel;
}

inline std::vector<double> relative_phases(const Graph& g, const PhaseState& s) { return relative_phases(g, s.phases); }

inline double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

struct Scenario {
    Graph graph;
    CouplingSpec coupling;
    ArcPartition arcs;
    double kappa = 1.0;
    double tau = 0.001;
    UncertaintyModel model;
    std::vector<double> initial_phases;  // empty: uniform random from the seed
    std::size_t steps = 0;
    SeedPolicy seed;

    void validate() const {
        if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
        if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
        if (coupling.terms().empty()) throw std::invalid_argument("coupling has no terms");
        arcs.validate();
        std::visit([this](const auto& m) { m.validate(graph); }, model);
        if (!initial_phases.empty() && initial_phases.size() != graph.node_count()) {
            std::ostringstream msg;
            msg << "initial_phases has " << initial_phases.size() << " entries but the graph has "
                << graph.node_count() << " nodes";
            throw std::invalid_argument(msg.str());
        }
    }

    bool is_gaussian() const { return std::holds_alternative<GaussianUncertainty>(model); }
    bool is_bernoulli() const { return std::holds_alternative<BernoulliModel>(model); }
};

/// The random inputs of one step: a weight per edge and a frequency per node.
struct StepDraws {
    std::vector<double> edge_weights;
    std::vector<double> frequencies;
};

/// Draw order per step: edges in listing order, then nodes in index order.
/// The Bernoulli model draws only the edge mask.
inline StepDraws draw_step(const UncertaintyModel& model, const Graph& g, Stream& stream) {
    if (const auto* gm = std::get_if<GaussianUncertainty>(&model))
        return {sample_edge_weights(*gm, stream), sample_frequencies(*gm, stream)};
    const auto& bm = std::get<BernoulliModel>(model);
    return {sample_bernoulli_mask(bm, g.edge_count(), stream), bm.freq_const};
}

/// Per-node update:
///   theta_i <- wrap(theta_i + tau w_i - kappa tau sum_j a_ij Psi(theta_i - theta_j))
/// with one weight per undirected edge shared by both endpoints. Psi sees
/// the wrapped difference.
inline PhaseState apply_step(const Graph& g, const CouplingSpec& psi, double kappa, double tau, const PhaseState& s,
                             const StepDraws& draws) {
    const std::size_t n = g.node_count();
    std::vector<double> coupling_sum(n, 0.0);
    for (std::size_t l = 0; l < g.edge_count(); ++l) {
        const auto [t, h] = g.edge(l);
        const double w = draws.edge_weights[l];
        coupling_sum[h] += w * psi(wrap_angle(s.phases[h] - s.phases[t]));
        coupling_sum[t] += w * psi(wrap_angle(s.phases[t] - s.phases[h]));
    }
    PhaseState next{std::vector<double>(n), s.step + 1};
    for (std::size_t i = 0; i < n; ++i)
        next.phases[i] = wrap_angle(s.phases[i] + tau * draws.frequencies[i] - kappa * tau * coupling_sum[i]);
    return next;
}

/// Edge-space form of the same step for odd Psi:
///   Theta <- wrap(Theta + tau B^T w - kappa tau B^T B diag(a) Psi(Theta)).
inline std::vector<double> apply_step_compact(const Graph& g, const CouplingSpec& psi, double kappa, double tau,
                                              std::span<const double> rel, const StepDraws& draws) {
    const std::size_t n = g.node_count();
    std::vector<double> node_push(n, 0.0);  // B diag(a) Psi(Theta)
    for (std::size_t l = 0; l < g.edge_count(); ++l) {
        const double v = draws.edge_weights[l] * psi(rel[l]);
        node_push[g.edge(l).head] += v;
        node_push[g.edge(l).tail] -= v;
    }
    std::vector<double> out(g.edge_count());
    for (std::size_t l = 0; l < out.size(); ++l) {
        const auto [t, h] = g.edge(l);
        const double freq = draws.frequencies[h] - draws.frequencies[t];
        const double push = node_push[h] - node_push[t];
        out[l] = wrap_angle(rel[l] + tau * freq - kappa * tau * push);
    }
    return out;
}

inline PhaseState step_uncertain(const Scenario& sc, const PhaseState& s, Stream& stream) {
    if (!sc.is_gaussian()) throw std::invalid_argument("step_uncertain needs a Gaussian uncertainty model");
    return apply_step(sc.graph, sc.coupling, sc.kappa, sc.tau, s, draw_step(sc.model, sc.graph, stream));
}

inline PhaseState step_random(const Scenario& sc, const PhaseState& s, Stream& stream) {
    if (!sc.is_bernoulli()) throw std::invalid_argument("step_random needs a Bernoulli model");
    return apply_step(sc.graph, sc.coupling, sc.kappa, sc.tau, s, draw_step(sc.model, sc.graph, stream));
}

inline PhaseState step(const Scenario& sc, const PhaseState& s, Stream& stream) {
    return apply_step(sc.graph, sc.coupling, sc.kappa, sc.tau, s, draw_step(sc.model, sc.graph, stream));
}

/// Configured initial phases (wrapped), or uniform on (-pi, pi] from a
/// stream reserved for initialisation.
inline PhaseState initial_state(const Scenario& sc, std::uint64_t trial = 0) {
    PhaseState s;
    if (!sc.initial_phases.empty()) {
        s.phases.reserve(sc.initial_phases.size());
        for (double x : sc.initial_phases) s.phases.push_back(wrap_angle(x));
        return s;
    }
    Stream init = sc.seed.stream(trial, SeedPolicy::Purpose::initial_phases);
    s.phases.resize(sc.graph.node_count());
    for (auto& x : s.phases) x = kPi - kTwoPi * init.uniform();
    return s;
}

struct Trajectory {
    std::vector<std::vector<double>> states;
    std::vector<std::vector<double>> relative;
    std::vector<double> max_relative;

    std::size_t size() const noexcept { return states.size(); }

    void push(const Graph& g, PhaseState s) {
        relative.push_back(relative_phases(g, s));
        max_relative.push_back(max_abs(relative.back()));
        states.push_back(std::move(s.phases));
    }
};

/// Runs `steps` steps of trial `trial` from the configured start state.
inline Trajectory simulate(const Scenario& sc, std::uint64_t trial, std::size_t steps) {
    sc.validate();
    Stream stream = sc.seed.stream(trial);
    Trajectory traj;
    traj.states.reserve(steps + 1);
    traj.relative.reserve(steps + 1);
    traj.max_relative.reserve(steps + 1);
    PhaseState s = initial_state(sc, trial);
    traj.push(sc.graph, s);
    for (std::size_t k = 0; k < steps; ++k) {
        s = step(sc, s, stream);
        traj.push(sc.graph, s);
    }
    return traj;
}

inline Trajectory simulate(const Scenario& sc) { return simulate(sc, 0, sc.steps); }

namespace detail {

inline void put_g9(std::ostream& os, double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    os << buf;
}

}  // namespace detail

/// CSV: step, theta_1..theta_n, rel_<tail>_<head> per edge (1-based), max_rel.
inline void write_trajectory_csv(std::ostream& os, const Graph& g, const Trajectory& traj) {
    os << "step";
    for (std::size_t i = 0; i < g.node_count(); ++i) os << ",theta_" << i + 1;
    for (const auto& e : g.edges()) os << ",rel_" << e.tail + 1 << '_' << e.head + 1;
    os << ",max_rel\n";
    for (std::size_t k = 0; k < traj.size(); ++k) {
        os << k;
        for (double x : traj.states[k]) {
            os << ',';
            detail::put_g9(os, x);
        }
        for (double x : traj.relative[k]) {
            os << ',';
            detail::put_g9(os, x);
        }
        os << ',';
        detail::put_g9(os, traj.max_relative[k]);
        os << '\n';
    }
}

}  // namespace stochsync
