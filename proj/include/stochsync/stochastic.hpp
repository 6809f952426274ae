#pragma once

/// Uncertainty models for the coupled-oscillator chains, seeded random
/// streams, and folded-normal expectations.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "stochsync/graph.hpp"

namespace stochsync {

/// One independent random stream. Owns its engine; not shared between
/// threads.
class Stream {
public:
    explicit Stream(std::uint64_t seed) : engine_(seed) {}

    double normal() { return standard_normal_(engine_); }
    double normal(double mean, double variance) { return mean + std::sqrt(variance) * normal(); }

    /// Uniform in [0, 1) from the top 53 bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> standard_normal_{0.0, 1.0};
};

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace detail

/// Streams are a pure function of (master seed, trial index, purpose), so
/// trials can run in any order or in parallel.
struct SeedPolicy {
    std::uint64_t master_seed = 1;

    enum class Purpose : std::uint64_t { dynamics = 0, initial_phases = 1, drift = 2 };

    std::uint64_t derive(std::uint64_t trial, Purpose purpose = Purpose::dynamics) const {
        std::uint64_t h = detail::splitmix64(master_seed);
        h = detail::splitmix64(h ^ (trial + 0x632be59bd9b4e019ULL));
        h = detail::splitmix64(h ^ static_cast<std::uint64_t>(purpose));
        return h;
    }

    Stream stream(std::uint64_t trial, Purpose purpose = Purpose::dynamics) const {
        return Stream(derive(trial, purpose));
    }
};

/// Gaussian multiplicative edge weights and Gaussian additive frequency noise.
struct GaussianUncertainty {
    std::vector<double> edge_means;
    double edge_variance = 0.0;
    std::vector<double> freq_const;
    std::vector<double> freq_noise_means;
    std::vector<double> freq_noise_variances;

    void validate(const Graph& g) const {
        auto check_len = [](const char* name, std::size_t got, std::size_t want, const char* what) {
            if (got != want) {
                std::ostringstream msg;
                msg << name << " has " << got << " entries but the graph has " << want << ' ' << what;
                throw std::invalid_argument(msg.str());
            }
        };
        check_len("edge_means", edge_means.size(), g.edge_count(), "edges");
        check_len("freq_const", freq_const.size(), g.node_count(), "nodes");
        check_len("freq_noise_means", freq_noise_means.size(), g.node_count(), "nodes");
        check_len("freq_noise_variances", freq_noise_variances.size(), g.node_count(), "nodes");
        if (!(edge_variance >= 0.0)) throw std::invalid_argument("edge_variance must be nonnegative");
        for (double v : freq_noise_variances)
            if (!(v >= 0.0)) throw std::invalid_argument("freq_noise_variances must be nonnegative");
    }

    /// Mean of each node's frequency.
    std::vector<double> mean_frequencies() const {
        std::vector<double> out(freq_const.size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = freq_const[i] + freq_noise_means[i];
        return out;
    }
};

/// Each edge present with probability p at every step, constant frequencies.
struct BernoulliModel {
    double p = 1.0;
    std::vector<double> freq_const;

    void validate(const Graph& g) const {
        if (!(p >= 0.0 && p <= 1.0)) {
            std::ostringstream msg;
            msg << "p must lie in [0, 1], got " << p;
            throw std::invalid_argument(msg.str());
        }
        if (freq_const.size() != g.node_count()) {
            std::ostringstream msg;
            msg << "freq_const has " << freq_const.size() << " entries but the graph has " << g.node_count()
                << " nodes";
            throw std::invalid_argument(msg.str());
        }
    }
};

using UncertaintyModel = std::variant<GaussianUncertainty, BernoulliModel>;

inline std::vector<double> sample_edge_weights(const GaussianUncertainty& model, Stream& stream) {
    std::vector<double> w(model.edge_means.size());
    for (std::size_t l = 0; l < w.size(); ++l) w[l] = stream.normal(model.edge_means[l], model.edge_variance);
    return w;
}

inline std::vector<double> sample_frequencies(const GaussianUncertainty& model, Stream& stream) {
    std::vector<double> f(model.freq_const.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        f[i] = model.freq_const[i] + stream.normal(model.freq_noise_means[i], model.freq_noise_variances[i]);
    return f;
}

inline std::vector<double> sample_bernoulli_mask(const BernoulliModel& model, std::size_t m, Stream& stream) {
    std::vector<double> mask(m);
    for (auto& b : mask) b = stream.bernoulli(model.p) ? 1.0 : 0.0;
    return mask;
}

/// E|Z| for Z ~ N(mu, variance).
inline double folded_normal_mean(double mu, double variance) {
    if (!(variance >= 0.0)) throw std::invalid_argument("folded_normal_mean: variance must be nonnegative");
    if (variance == 0.0) return std::abs(mu);
    const double sigma = std::sqrt(variance);
    return sigma * std::sqrt(2.0 / std::numbers::pi) * std::exp(-mu * mu / (2.0 * variance)) +
           mu * std::erf(mu / (std::numbers::sqrt2 * sigma));
}

/// sqrt(2 variance / pi) + |mu|, using |erf| <= 1 and exp(.) <= 1.
inline double folded_normal_upper_bound(double mu, double variance) {
    if (!(variance >= 0.0)) throw std::invalid_argument("folded_normal_upper_bound: variance must be nonnegative");
    return std::sqrt(2.0 * variance / std::numbers::pi) + std::abs(mu);
}

enum class GapMode { nominal_edgewise, exact_pairwise, bound_pairwise };

inline const char* to_string(GapMode m) {
    switch (m) {
        case GapMode::nominal_edgewise: return "nominal";
        case GapMode::exact_pairwise: return "exact";
        case GapMode::bound_pairwise: return "bound";
    }
    return "?";
}

/// Largest expected frequency gap.
///  nominal_edgewise: max over edges of |omega_i - omega_j| on the constant
///                    frequency parts.
///  exact_pairwise:   max over node pairs of E|w_i - w_j| with independent
///                    Gaussian frequencies.
///  bound_pairwise:   as exact, with the folded-normal upper bound.
inline double max_expected_freq_gap(const GaussianUncertainty& model, const Graph& g, GapMode mode) {
    model.validate(g);
    double best = 0.0;
    if (mode == GapMode::nominal_edgewise) {
        for (const auto& e : g.edges())
            best = std::max(best, std::abs(model.freq_const[e.head] - model.freq_const[e.tail]));
        return best;
    }
    const auto means = model.mean_frequencies();
    for (std::size_t i = 0; i < means.size(); ++i)
        for (std::size_t j = i + 1; j < means.size(); ++j) {
            const double mu = means[i] - means[j];
            const double var = model.freq_noise_variances[i] + model.freq_noise_variances[j];
            best = std::max(best, mode == GapMode::exact_pairwise ? folded_normal_mean(mu, var)
                                                                  : folded_normal_upper_bound(mu, var));
        }
    return best;
}

/// Constant frequencies: edgewise max, or max over all node pairs.
inline double max_expected_freq_gap(const BernoulliModel& model, const Graph& g, GapMode mode) {
    model.validate(g);
    double best = 0.0;
    if (mode == GapMode::nominal_edgewise) {
        for (const auto& e : g.edges())
            best = std::max(best, std::abs(model.freq_const[e.head] - model.freq_const[e.tail]));
        return best;
    }
    for (std::size_t i = 0; i < model.freq_const.size(); ++i)
        for (std::size_t j = i + 1; j < model.freq_const.size(); ++j)
            best = std::max(best, std::abs(model.freq_const[i] - model.freq_const[j]));
    return best;
}

}  // namespace stochsync
