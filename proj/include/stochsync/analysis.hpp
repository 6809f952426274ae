#pragma once

/// Finite-horizon estimators for stochastic phase-cohesiveness: set
/// membership, first return times, Monte Carlo recurrence statistics,
/// occupancy, Lyapunov drift and per-edge cluster labels.
///
/// Every estimate here is tied to a finite horizon. A return probability of
/// 1.0 means every trial returned within `horizon` steps, nothing more.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <future>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "stochsync/coupling.hpp"
#include "stochsync/dynamics.hpp"

namespace stochsync {

enum class SetKind { in_phase, anti_phase, union_arcs, relaxed, origin };

inline const char* to_string(SetKind k) {
    switch (k) {
        case SetKind::in_phase: return "in_phase";
        case SetKind::anti_phase: return "anti_phase";
        case SetKind::union_arcs: return "union";
        case SetKind::relaxed: return "relaxed";
        case SetKind::origin: return "origin";
    }
    return "?";
}

struct PhaseSetSpec {
    SetKind kind = SetKind::in_phase;
    double gamma = kPi / 8.0;
    double gamma_max = kPi / 1.14;
    double tolerance = 0.0;  // radians added to each arc

    static PhaseSetSpec from_arcs(SetKind kind, const ArcPartition& arcs, double tolerance = 0.0) {
        return {kind, arcs.gamma, arcs.gamma_max, tolerance};
    }

    bool edge_in(double rel) const {
        const double a = std::abs(rel);
        const bool lower = a <= gamma + tolerance;
        const bool upper = a >= gamma_max - tolerance;
        switch (kind) {
            case SetKind::in_phase:
            case SetKind::relaxed: return lower;  // [0, gamma_c] u [gamma_c, gamma] = [0, gamma]
            case SetKind::anti_phase: return upper;
            case SetKind::union_arcs: return lower || upper;
            case SetKind::origin: return a <= tolerance;
        }
        return false;
    }
};

inline bool contains(const PhaseSetSpec& set, std::span<const double> rel) {
    return std::all_of(rel.begin(), rel.end(), [&set](double r) { return set.edge_in(r); });
}

/// min{n >= 1 : Theta(n) in set}, or nullopt if the trajectory never gets there.
inline std::optional<std::size_t> first_return_time(const Trajectory& traj, const PhaseSetSpec& set,
                                                    std::size_t from = 0) {
    if (traj.size() == 0) throw std::invalid_argument("first_return_time: empty trajectory");
    for (std::size_t k = from + 1; k < traj.size(); ++k)
        if (contains(set, traj.relative[k])) return k - from;
    return std::nullopt;
}

/// Fraction of steps k >= burn_in whose relative phases lie in the set.
inline double occupancy_fraction(const Trajectory& traj, const PhaseSetSpec& set, std::size_t burn_in) {
    if (burn_in >= traj.size()) throw std::invalid_argument("occupancy_fraction: burn_in must be below trajectory length");
    std::size_t inside = 0;
    for (std::size_t k = burn_in; k < traj.size(); ++k)
        if (contains(set, traj.relative[k])) ++inside;
    return static_cast<double>(inside) / static_cast<double>(traj.size() - burn_in);
}

/// Number of full 2*pi windings, summed over edges, of the unwrapped relative
/// phases (largest excursion from the start, in whole turns).
inline std::size_t count_phase_slips(const Trajectory& traj) {
    if (traj.size() == 0) return 0;
    const std::size_t m = traj.relative.front().size();
    std::size_t slips = 0;
    for (std::size_t l = 0; l < m; ++l) {
        double unwrapped = 0.0;
        double widest = 0.0;
        for (std::size_t k = 1; k < traj.size(); ++k) {
            unwrapped += wrap_angle(traj.relative[k][l] - traj.relative[k - 1][l]);
            widest = std::max(widest, std::abs(unwrapped));
        }
        slips += static_cast<std::size_t>(std::floor(widest / kTwoPi));
    }
    return slips;
}

/// First step whose max |relative phase| is below `threshold`.
inline std::optional<std::size_t> first_step_below(const Trajectory& traj, double threshold) {
    for (std::size_t k = 0; k < traj.size(); ++k)
        if (traj.max_relative[k] < threshold) return k;
    return std::nullopt;
}

/// Neumaier compensated sum; keeps aggregated means stable regardless of
/// trial count.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct ReturnTimeStats {
    std::size_t trials = 0;
    std::size_t returned = 0;
    double return_probability_estimate = 0.0;
    std::vector<std::size_t> return_times;  // returned trials only, in trial order
    std::optional<double> mean_return_time;
    std::size_t horizon = 0;
};

/// Where a return-time trial starts counting.
///  initial:    from the configured (or seeded uniform) initial state.
///  first_exit: from the first exit after the first entry into the set. A
///              trial that never exits within the horizon stayed in the set
///              and records return time 1.
enum class StartMode { initial, first_exit };

struct MonteCarloOptions {
    std::size_t trials = 1;
    std::size_t horizon = 1000;
    std::size_t burn_in = 0;
    StartMode start = StartMode::initial;
    unsigned threads = 0;  // 0: hardware concurrency
};

struct TrialRecord {
    std::size_t trial = 0;
    bool returned = false;
    std::optional<std::size_t> return_time;
    double occupancy = 0.0;
};

struct MonteCarloResult {
    std::vector<TrialRecord> records;
    ReturnTimeStats stats;
};

namespace detail {

inline TrialRecord run_trial(const Scenario& sc, const PhaseSetSpec& set, const MonteCarloOptions& opt,
                             std::size_t trial) {
    const Trajectory traj = simulate(sc, trial, opt.horizon);
    TrialRecord rec;
    rec.trial = trial;
    std::size_t origin = 0;
    bool stayed = false;
    if (opt.start == StartMode::first_exit) {
        std::size_t k = 0;
        while (k < traj.size() && !contains(set, traj.relative[k])) ++k;
        while (k < traj.size() && contains(set, traj.relative[k])) ++k;
        if (k >= traj.size()) {
            // Never entered: no return observed. Entered and never left: stayed.
            stayed = std::any_of(traj.relative.begin(), traj.relative.end(),
                                 [&set](const auto& r) { return contains(set, r); });
            origin = traj.size() - 1;
        } else {
            origin = k;
        }
    }
    if (stayed) {
        rec.return_time = 1;
    } else {
        rec.return_time = first_return_time(traj, set, origin);
    }
    rec.returned = rec.return_time.has_value();
    rec.occupancy = occupancy_fraction(traj, set, std::min(opt.burn_in, traj.size() - 1));
    return rec;
}

}  // namespace detail

/// Independent trials on streams keyed by trial index; results are identical
/// for any thread count.
inline MonteCarloResult run_montecarlo(const Scenario& sc, const PhaseSetSpec& set, const MonteCarloOptions& opt) {
    if (opt.trials == 0) throw std::invalid_argument("run_montecarlo: trials must be at least 1");
    sc.validate();
    MonteCarloResult out;
    out.records.resize(opt.trials);

    unsigned workers = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, opt.trials));
    std::vector<std::future<void>> jobs;
    for (unsigned w = 0; w < workers; ++w) {
        jobs.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t t = w; t < opt.trials; t += workers) out.records[t] = detail::run_trial(sc, set, opt, t);
        }));
    }
    for (auto& j : jobs) j.get();

    ReturnTimeStats& s = out.stats;
    s.trials = opt.trials;
    s.horizon = opt.horizon;
    CompensatedSum total;
    for (const auto& r : out.records) {
        if (!r.returned) continue;
        ++s.returned;
        s.return_times.push_back(*r.return_time);
        total.add(static_cast<double>(*r.return_time));
    }
    s.return_probability_estimate = static_cast<double>(s.returned) / static_cast<double>(s.trials);
    if (s.returned > 0) s.mean_return_time = total.value() / static_cast<double>(s.returned);
    return out;
}

inline ReturnTimeStats estimate_recurrence(const Scenario& sc, const PhaseSetSpec& set, std::size_t trials,
                                           std::size_t horizon, StartMode start = StartMode::initial) {
    MonteCarloOptions opt;
    opt.trials = trials;
    opt.horizon = horizon;
    opt.start = start;
    return run_montecarlo(sc, set, opt).stats;
}

/// CSV: trial, returned(0/1), return_time (empty if none), occupancy; then a
/// commented summary block.
inline void write_montecarlo_csv(std::ostream& os, const MonteCarloResult& res, const PhaseSetSpec& set) {
    os << "trial,returned,return_time,occupancy\n";
    for (const auto& r : res.records) {
        os << r.trial << ',' << (r.returned ? 1 : 0) << ',';
        if (r.return_time) os << *r.return_time;
        os << ',';
        detail::put_g9(os, r.occupancy);
        os << '\n';
    }
    const auto& s = res.stats;
    os << "# set=" << to_string(set.kind) << " gamma=" << set.gamma << " gamma_max=" << set.gamma_max
       << " tolerance=" << set.tolerance << '\n';
    os << "# trials=" << s.trials << " returned=" << s.returned << " horizon=" << s.horizon << '\n';
    os << "# return_probability_estimate=" << s.return_probability_estimate << " (within horizon)\n";
    os << "# mean_return_time=";
    if (s.mean_return_time)
        os << *s.mean_return_time;
    else
        os << "none";
    os << '\n';
}

// ---------------------------------------------------------------------------
// Lyapunov drift.

enum class DriftMode { in_phase, anti_phase };

/// Surrogate for Psi(0+): |Psi(gamma / 100)|.
inline double default_psi_o(const CouplingSpec& psi, const ArcPartition& arcs) {
    return std::abs(psi(arcs.gamma / 100.0));
}

/// Per-edge weights of V: |Psi(gamma)| beyond gamma, psi_o inside [0, gamma].
inline std::vector<double> lyapunov_coefficients(std::span<const double> rel, const ArcPartition& arcs,
                                                 const CouplingSpec& psi, double psi_o) {
    const double outer = std::abs(psi(arcs.gamma));
    std::vector<double> c(rel.size());
    for (std::size_t l = 0; l < rel.size(); ++l) c[l] = arcs.in_lower(std::abs(rel[l])) ? psi_o : outer;
    return c;
}

/// sum_l c_l |rel_l| (in_phase) or sum_l c_l (pi - |rel_l|) (anti_phase).
inline double weighted_lyapunov(std::span<const double> coeffs, std::span<const double> rel, DriftMode mode) {
    double v = 0.0;
    for (std::size_t l = 0; l < rel.size(); ++l) {
        const double a = std::abs(rel[l]);
        v += coeffs[l] * (mode == DriftMode::in_phase ? a : kPi - a);
    }
    return v;
}

inline double lyapunov_value(std::span<const double> rel, const ArcPartition& arcs, const CouplingSpec& psi,
                             DriftMode mode, double psi_o) {
    return weighted_lyapunov(lyapunov_coefficients(rel, arcs, psi, psi_o), rel, mode);
}

struct DriftEstimate {
    std::vector<double> state;
    std::size_t samples = 0;
    double v_now = 0.0;
    double v_next_mean = 0.0;
    double delta_v = 0.0;
    double standard_error = 0.0;
};

/// Monte Carlo E[V(next) | state] - V(state). The coefficients of V are
/// frozen at the conditioning state, so the anti-phase drift is exactly the
/// negated in-phase drift on the same draws.
inline DriftEstimate estimate_drift(const Scenario& sc, const PhaseState& state, std::size_t samples, DriftMode mode,
                                    std::optional<double> psi_o = std::nullopt, std::uint64_t stream_index = 0) {
    if (samples < 2) throw std::invalid_argument("estimate_drift: need at least 2 samples");
    sc.validate();
    const double po = psi_o.value_or(default_psi_o(sc.coupling, sc.arcs));
    const auto rel_now = relative_phases(sc.graph, state);
    const auto coeffs = lyapunov_coefficients(rel_now, sc.arcs, sc.coupling, po);

    DriftEstimate est;
    est.state = state.phases;
    est.samples = samples;
    est.v_now = weighted_lyapunov(coeffs, rel_now, mode);

    Stream stream = sc.seed.stream(stream_index, SeedPolicy::Purpose::drift);
    std::vector<double> values(samples);
    CompensatedSum sum;
    for (auto& v : values) {
        const PhaseState next = step(sc, state, stream);
        v = weighted_lyapunov(coeffs, relative_phases(sc.graph, next), mode);
        sum.add(v);
    }
    est.v_next_mean = sum.value() / static_cast<double>(samples);
    CompensatedSum sq;
    for (double v : values) sq.add((v - est.v_next_mean) * (v - est.v_next_mean));
    const double variance = sq.value() / static_cast<double>(samples - 1);
    est.standard_error = std::sqrt(variance / static_cast<double>(samples));
    est.delta_v = est.v_next_mean - est.v_now;
    return est;
}

// ---------------------------------------------------------------------------
// Clusters.

enum class ClusterLabel { in_phase, anti_phase, unresolved };

inline const char* to_string(ClusterLabel c) {
    switch (c) {
        case ClusterLabel::in_phase: return "in_phase";
        case ClusterLabel::anti_phase: return "anti_phase";
        case ClusterLabel::unresolved: return "unresolved";
    }
    return "?";
}

/// Per edge, the arc holding |rel| for more than `threshold` of the trailing
/// `tail_fraction` of the trajectory.
inline std::vector<ClusterLabel> cluster_assignment(const Trajectory& traj, const ArcPartition& arcs,
                                                    double tail_fraction = 0.25, double threshold = 0.9) {
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
        throw std::invalid_argument("cluster_assignment: tail_fraction must lie in (0, 1]");
    if (traj.size() == 0) throw std::invalid_argument("cluster_assignment: empty trajectory");
    const std::size_t len = traj.size();
    const auto tail = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(tail_fraction * len)));
    const std::size_t start = len - std::min(tail, len);
    const std::size_t m = traj.relative.front().size();

    std::vector<ClusterLabel> labels(m, ClusterLabel::unresolved);
    for (std::size_t l = 0; l < m; ++l) {
        std::size_t lower = 0, upper = 0;
        for (std::size_t k = start; k < len; ++k) {
            const double a = std::abs(traj.relative[k][l]);
            if (arcs.in_lower(a)) ++lower;
            if (arcs.in_upper(a)) ++upper;
        }
        const double n = static_cast<double>(len - start);
        if (static_cast<double>(lower) / n > threshold)
            labels[l] = ClusterLabel::in_phase;
        else if (static_cast<double>(upper) / n > threshold)
            labels[l] = ClusterLabel::anti_phase;
    }
    return labels;
}

}  // namespace stochsync
