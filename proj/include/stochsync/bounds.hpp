#pragma once

/// Closed-form sufficient conditions on the coupling gain kappa and the
/// sampling time tau for stochastic phase-cohesiveness.
///
/// Each calculator comes in two layers. The core form takes a BoundInputs
/// record of already-reduced scalars (so published, rounded intermediates can
/// be plugged in directly); the scenario form derives those scalars from a
/// graph, coupling, arc partition and uncertainty model.
///
/// Feasibility failures never throw: the report is returned with
/// `feasible == false` and a diagnosis naming the failing clause.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stochsync/coupling.hpp"
#include "stochsync/graph.hpp"
#include "stochsync/stochastic.hpp"

namespace stochsync {

struct BoundInputs {
    double mu_min = 0.0;           // min |edge mean| (connection probability for random networks)
    double mu_max = 0.0;           // max |edge mean|
    double noise_term = 0.0;       // sqrt(2 sigma^2 / pi)
    double psi_gamma = 0.0;        // |Psi(gamma)|
    double psi_max = 0.0;          // max |Psi|
    double psi_bar = 0.0;          // bound on |Psi_r| near the origin (relaxed case)
    double lambda_min_tree = 0.0;  // min over spanning trees of lambda_min(L_e(tree))
    double lambda_max_edge = 0.0;  // lambda_max(L_e(G))
    double freq_gap = 0.0;         // largest expected frequency gap
    double gamma = 0.0;
    double gamma_max = 0.0;
    std::size_t edge_count = 0;
};

struct BoundsReport {
    std::string name;
    bool feasible = true;
    std::optional<double> kappa_min;
    double kappa = 0.0;  // gain at which tau_max is evaluated
    std::optional<double> tau_max;
    std::vector<std::pair<std::string, double>> intermediates;
    std::vector<std::string> warnings;
    std::string diagnosis;

    std::optional<double> intermediate(const std::string& key) const {
        for (const auto& [k, v] : intermediates)
            if (k == key) return v;
        return std::nullopt;
    }
};

inline double noise_term(double variance) { return std::sqrt(2.0 * variance / std::numbers::pi); }

namespace detail {

inline void record_inputs(BoundsReport& r, const BoundInputs& in) {
    r.intermediates = {{"mu_m", in.mu_min},
                       {"mu_M", in.mu_max},
                       {"sqrt_term", in.noise_term},
                       {"psi_gamma", in.psi_gamma},
                       {"psi_max", in.psi_max},
                       {"lambda_min_tree", in.lambda_min_tree},
                       {"lambda_max_edge", in.lambda_max_edge},
                       {"e_max_gap", in.freq_gap},
                       {"gamma", in.gamma}};
}

}  // namespace detail

/// In-phase set, positive edge means.
///   kappa > E / ((mu_m - s) |Psi(gamma)| lambda_min_tree)
///   tau   < gamma / (kappa (mu_M + s) Psi_max lambda_max + E)
inline BoundsReport theorem1_inphase(const BoundInputs& in, double kappa) {
    BoundsReport r;
    r.name = "theorem1_inphase";
    detail::record_inputs(r, in);
    r.kappa = kappa;
    const double margin = in.mu_min - in.noise_term;
    r.intermediates.emplace_back("mean_margin", margin);
    if (!(margin > 0.0)) {
        r.feasible = false;
        std::ostringstream d;
        d << "mu_m = " << in.mu_min << " does not exceed sqrt(2 sigma^2/pi) = " << in.noise_term << " (short by "
          << -margin << ")";
        r.diagnosis = d.str();
        return r;
    }
    r.kappa_min = in.freq_gap / (margin * in.psi_gamma * in.lambda_min_tree);
    r.tau_max = in.gamma / (kappa * (in.mu_max + in.noise_term) * in.psi_max * in.lambda_max_edge + in.freq_gap);
    return r;
}

/// Anti-phase set, negative edge means. `bipartite` is the structural test
/// for whether every relative phase can exceed gamma_max at once.
///   kappa > E / (|Psi(gamma)| mu_m lambda_min_tree)
///   tau   < (pi - gamma_max) / (kappa Psi_max mu_M lambda_max + E)
inline BoundsReport theorem1_antiphase(const BoundInputs& in, double kappa, bool bipartite = true) {
    BoundsReport r;
    r.name = "theorem1_antiphase";
    detail::record_inputs(r, in);
    r.intermediates.emplace_back("gamma_max", in.gamma_max);
    r.kappa = kappa;
    if (!bipartite && in.gamma_max > kPi / 2.0)
        r.warnings.emplace_back(
            "graph has an odd cycle and gamma_max > pi/2: not every relative phase can lie in the anti-phase arc");
    if (!(in.mu_min > 0.0)) {
        r.feasible = false;
        r.diagnosis = "smallest |edge mean| is zero";
        return r;
    }
    r.kappa_min = in.freq_gap / (in.psi_gamma * in.mu_min * in.lambda_min_tree);
    r.tau_max = (kPi - in.gamma_max) / (kappa * in.psi_max * in.mu_max * in.lambda_max_edge + in.freq_gap);
    return r;
}

/// Ultimate (bounded mean return time) version of the in-phase bound at
/// sampling time `tau`.
inline BoundsReport corollary1_ultimate(const BoundInputs& in, double tau, double kappa) {
    BoundsReport r;
    r.name = "corollary1_ultimate";
    detail::record_inputs(r, in);
    r.kappa = kappa;
    const double margin = in.mu_min - in.noise_term;
    const double numerator = in.gamma - 1.0 / (static_cast<double>(in.edge_count) * in.psi_max);
    r.intermediates.emplace_back("mean_margin", margin);
    r.intermediates.emplace_back("tau_numerator", numerator);
    if (!(margin > 0.0)) {
        r.feasible = false;
        r.diagnosis = "mu_m does not exceed sqrt(2 sigma^2/pi)";
        return r;
    }
    if (!(numerator > 0.0)) {
        r.feasible = false;
        std::ostringstream d;
        d << "gamma = " << in.gamma << " does not exceed 1/(m Psi_max) = " << in.gamma - numerator;
        r.diagnosis = d.str();
        return r;
    }
    r.kappa_min = (1.0 / (tau * in.psi_gamma) + in.freq_gap) / (margin * in.psi_gamma * in.lambda_min_tree);
    r.tau_max = numerator / (kappa * (in.mu_max + in.noise_term) * in.psi_max * in.lambda_max_edge + in.freq_gap);
    return r;
}

/// Line graph with edge means of common magnitude `lambda` and mixed signs:
/// any kappa > 0 with tau < gamma / (2 kappa lambda Psi_max).
inline double prop1_line_clustering(double kappa, double lambda, double psi_max, double gamma) {
    if (!(kappa > 0.0) || !(lambda > 0.0) || !(psi_max > 0.0) || !(gamma > 0.0))
        throw std::invalid_argument("prop1_line_clustering: kappa, lambda, psi_max and gamma must be positive");
    return gamma / (2.0 * kappa * lambda * psi_max);
}

/// Tree graph, coupling odd only away from the origin. Uses
///   l1 = mu_m |Psi_r(gamma)|, l2 = mu_M psi_bar,
///   lhat = l1 - l2 sqrt(m - 1).
inline BoundsReport prop2_relaxed(const BoundInputs& in, double kappa) {
    BoundsReport r;
    r.name = "prop2_relaxed";
    detail::record_inputs(r, in);
    r.kappa = kappa;
    const double m1 = static_cast<double>(in.edge_count) - 1.0;
    const double l1 = in.mu_min * in.psi_gamma;
    const double l2 = in.mu_max * in.psi_bar;
    const double lhat = l1 - l2 * std::sqrt(m1);
    r.intermediates.emplace_back("psi_bar", in.psi_bar);
    r.intermediates.emplace_back("lambda_hat", lhat);
    r.intermediates.emplace_back("lambda_hat_1", l1);
    r.intermediates.emplace_back("lambda_hat_2", l2);
    if (!(lhat > 0.0)) {
        r.feasible = false;
        std::ostringstream d;
        d << "lambda_hat = " << lhat << " is not positive";
        r.diagnosis = d.str();
        return r;
    }
    r.kappa_min = (l1 + l2 * m1) * in.freq_gap / (lhat * in.lambda_min_tree * (l1 + l2 * std::sqrt(m1)));
    r.tau_max = in.gamma / (kappa * in.psi_max * in.lambda_max_edge * in.mu_max + in.freq_gap);
    return r;
}

/// Random (Bernoulli) network with connection probability in.mu_min.
///   kappa > |dw| / (|Psi(gamma)| p lambda_min_tree)
///   tau   < gamma / (kappa Psi_max lambda_max + |dw|)
/// Identical frequencies give kappa_min = 0: any kappa > 0 suffices.
inline BoundsReport theorem3_random(const BoundInputs& in, double kappa) {
    BoundsReport r;
    r.name = "theorem3_random";
    detail::record_inputs(r, in);
    r.intermediates.emplace_back("p", in.mu_min);
    r.kappa = kappa;
    if (!(in.mu_min > 0.0)) {
        if (in.freq_gap > 0.0) {
            r.feasible = false;
            r.diagnosis = "p = 0 with distinct frequencies: the oscillators never couple";
            return r;
        }
        r.kappa_min = 0.0;
        r.tau_max = in.gamma / in.freq_gap;  // inf: nothing moves
        return r;
    }
    r.kappa_min = in.freq_gap / (in.psi_gamma * in.mu_min * in.lambda_min_tree);
    r.tau_max = in.gamma / (kappa * in.psi_max * in.lambda_max_edge + in.freq_gap);
    return r;
}

// ---------------------------------------------------------------------------
// Scenario-level wrappers.

namespace detail {

inline BoundInputs structural_inputs(const Graph& g, const CouplingSpec& psi, const ArcPartition& arcs) {
    arcs.validate();
    BoundInputs in;
    in.psi_gamma = std::abs(psi(arcs.gamma));
    in.psi_max = stochsync::psi_max(psi);
    in.lambda_min_tree = min_spanning_tree_eigenvalue(g);
    in.lambda_max_edge = max_edge_laplacian_eigenvalue(g);
    in.gamma = arcs.gamma;
    in.gamma_max = arcs.gamma_max;
    in.edge_count = g.edge_count();
    if (arcs.psi_bar) in.psi_bar = *arcs.psi_bar;
    return in;
}

enum class MeanSigns { positive, negative, mixed };

inline MeanSigns mean_signs(const GaussianUncertainty& model) {
    const bool all_pos = std::all_of(model.edge_means.begin(), model.edge_means.end(), [](double x) { return x > 0; });
    const bool all_neg = std::all_of(model.edge_means.begin(), model.edge_means.end(), [](double x) { return x < 0; });
    return all_pos ? MeanSigns::positive : all_neg ? MeanSigns::negative : MeanSigns::mixed;
}

}  // namespace detail

inline BoundInputs gaussian_inputs(const Graph& g, const CouplingSpec& psi, const ArcPartition& arcs,
                                   const GaussianUncertainty& model, GapMode mode = GapMode::nominal_edgewise) {
    model.validate(g);
    BoundInputs in = detail::structural_inputs(g, psi, arcs);
    if (model.edge_means.empty()) throw std::invalid_argument("bounds need at least one edge");
    in.mu_min = std::abs(model.edge_means.front());
    in.mu_max = in.mu_min;
    for (double mu : model.edge_means) {
        in.mu_min = std::min(in.mu_min, std::abs(mu));
        in.mu_max = std::max(in.mu_max, std::abs(mu));
    }
    in.noise_term = noise_term(model.edge_variance);
    in.freq_gap = max_expected_freq_gap(model, g, mode);
    return in;
}

inline BoundInputs bernoulli_inputs(const Graph& g, const CouplingSpec& psi, const ArcPartition& arcs,
                                    const BernoulliModel& model, GapMode mode = GapMode::nominal_edgewise) {
    model.validate(g);
    BoundInputs in = detail::structural_inputs(g, psi, arcs);
    in.mu_min = model.p;
    in.mu_max = model.p;
    in.freq_gap = max_expected_freq_gap(model, g, mode);
    return in;
}

inline BoundsReport theorem1_inphase(const Graph& g, const CouplingSpec& psi, const ArcPartition& arcs,
                                     const GaussianUncertainty& model, double kappa,
                                     GapMode mode = GapMode::nominal_edgewise) {
    BoundsReport r = theorem1_inphase(gaussian_inputs(g, psi, arcs, model, mode), kappa);
    if (detail::mean_signs(model) != detail::MeanSigns::positive) {
        r.feasible = false;
        r.kappa_min.reset();
        r.tau_max.reset();
        r.diagnosis = "edge means are not all positive";
    }
    return r;
}

inline BoundsReport theorem1_antiphase(const Graph& g, const CouplingSpec& psi, const ArcPartition& arcs,
                                       const GaussianUncertainty& model, double kappa,
                                       GapMode mode = GapMode::nominal_edgewise) {
    BoundsReport r = theorem1_antiphase(gaussian_inputs(g, psi, arcs, model, mode), kappa, is_bipartite(g));
    if (detail::mean_signs(model) != detail::MeanSigns::negative) {
        r.feasible = false;
        r.kappa_min.reset();
        r.tau_max.reset();
        r.diagnosis = "edge means are not all negative";
    }
    return r;
}

inline BoundsReport corollary1_ultimate(const Graph& g, const CouplingSpec& psi, const ArcPartition& arcs,
                                        const GaussianUncertainty& model, double tau, double kappa,
                                        GapMode mode = GapMode::nominal_edgewise) {
    BoundsReport r = corollary1_ultimate(gaussian_inputs(g, psi, arcs, model, mode), tau, kappa);
    if (detail::mean_signs(model) != detail::MeanSigns::positive) {
        r.feasible = false;
        r.kappa_min.reset();
        r.tau_max.reset();
        r.diagnosis = "edge means are not all positive";
    }
    return r;
}

inline BoundsReport prop2_relaxed(const Graph& g, const CouplingSpec& psi_r, const ArcPartition& arcs,
                                  const GaussianUncertainty& model, double kappa,
                                  GapMode mode = GapMode::nominal_edgewise) {
    if (!is_tree(g)) throw std::invalid_argument("prop2_relaxed: graph must be a tree");
    if (!arcs.psi_bar) throw std::invalid_argument("prop2_relaxed: arcs.psi_bar is required");
    BoundsReport r = prop2_relaxed(gaussian_inputs(g, psi_r, arcs, model, mode), kappa);
    if (detail::mean_signs(model) != detail::MeanSigns::positive) {
        r.feasible = false;
        r.kappa_min.reset();
        r.tau_max.reset();
        r.diagnosis = "edge means are not all positive";
    }
    return r;
}

inline BoundsReport theorem3_random(const Graph& g, const CouplingSpec& psi, const ArcPartition& arcs,
                                    const BernoulliModel& model, double kappa,
                                    GapMode mode = GapMode::nominal_edgewise) {
    return theorem3_random(bernoulli_inputs(g, psi, arcs, model, mode), kappa);
}

}  // namespace stochsync
