#pragma once

/// Command orchestration behind the `stochsync` executable.
///
/// Exit codes:
///   0  success
///   1  error (bad input, I/O failure)
///   2  conditions not met: an infeasible bound, or a failed coupling check

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "stochsync/analysis.hpp"
#include "stochsync/bounds.hpp"
#include "stochsync/coupling.hpp"
#include "stochsync/dynamics.hpp"
#include "stochsync/scenario.hpp"

namespace stochsync {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitConditionsNotMet = 2;

struct CliOptions {
    std::string command;  // simulate | bounds | montecarlo | verify
    std::string scenario_path;
    std::string preset;
    std::optional<std::size_t> steps;
    std::optional<std::size_t> trials;
    std::optional<std::size_t> horizon;
    std::optional<std::uint64_t> seed;
    std::string out;
    GapMode gap_mode = GapMode::nominal_edgewise;
    unsigned threads = 0;
};

inline GapMode parse_gap_mode(const std::string& s) {
    if (s == "nominal") return GapMode::nominal_edgewise;
    if (s == "exact") return GapMode::exact_pairwise;
    if (s == "bound") return GapMode::bound_pairwise;
    throw std::invalid_argument("--gap-mode must be nominal, exact or bound, got '" + s + "'");
}

/// Scenario from --scenario or --preset, with --seed applied.
inline ScenarioFile resolve_scenario(const CliOptions& opt) {
    if (opt.scenario_path.empty() == opt.preset.empty())
        throw std::invalid_argument("give exactly one of --scenario <path> or --preset <name>");
    ScenarioFile f = opt.preset.empty() ? load_scenario_file(opt.scenario_path) : load_preset(opt.preset);
    if (opt.seed) f.scenario.seed.master_seed = *opt.seed;
    return f;
}

/// Reports that apply to the scenario, chosen by model type, edge-mean signs
/// and graph shape.
inline std::vector<BoundsReport> applicable_bounds(const ScenarioFile& f, GapMode mode) {
    const Scenario& sc = f.scenario;
    std::vector<BoundsReport> out;
    if (const auto* bm = std::get_if<BernoulliModel>(&sc.model)) {
        out.push_back(theorem3_random(sc.graph, sc.coupling, sc.arcs, *bm, sc.kappa, mode));
        return out;
    }
    const auto& gm = std::get<GaussianUncertainty>(sc.model);
    switch (detail::mean_signs(gm)) {
        case detail::MeanSigns::positive:
            if (sc.arcs.gamma_c && sc.arcs.psi_bar && is_tree(sc.graph)) {
                out.push_back(prop2_relaxed(sc.graph, sc.coupling, sc.arcs, gm, sc.kappa, mode));
            } else {
                out.push_back(theorem1_inphase(sc.graph, sc.coupling, sc.arcs, gm, sc.kappa, mode));
                out.push_back(corollary1_ultimate(sc.graph, sc.coupling, sc.arcs, gm, sc.tau, sc.kappa, mode));
            }
            break;
        case detail::MeanSigns::negative:
            out.push_back(theorem1_antiphase(sc.graph, sc.coupling, sc.arcs, gm, sc.kappa, mode));
            break;
        case detail::MeanSigns::mixed: {
            BoundsReport r;
            r.name = "prop1_line_clustering";
            r.kappa = sc.kappa;
            const double lambda = std::abs(gm.edge_means.front());
            const bool equal = std::all_of(gm.edge_means.begin(), gm.edge_means.end(),
                                           [lambda](double mu) { return std::abs(std::abs(mu) - lambda) <= 1e-12; });
            if (!is_line(sc.graph) || !equal || !(lambda > 0.0)) {
                r.feasible = false;
                r.diagnosis = "mixed edge-mean signs are covered only on a line graph with equal |means|";
            } else {
                const double pm = psi_max(sc.coupling);
                r.kappa_min = 0.0;
                r.tau_max = prop1_line_clustering(sc.kappa, lambda, pm, sc.arcs.gamma);
                r.intermediates = {{"lambda", lambda}, {"psi_max", pm}, {"gamma", sc.arcs.gamma}};
            }
            out.push_back(r);
            break;
        }
    }
    return out;
}

inline void print_report(std::ostream& os, const BoundsReport& r, double tau) {
    const auto row = [&os](const std::string& k, const std::string& v) {
        os << "  " << std::left << std::setw(18) << k << ' ' << v << '\n';
    };
    const auto num = [](double x) {
        std::ostringstream s;
        s << std::setprecision(6) << x;
        return s.str();
    };
    os << '[' << r.name << "]\n";
    row("feasible", r.feasible ? "yes" : "no");
    if (r.kappa_min) {
        row("kappa_min", num(*r.kappa_min));
        row("kappa", num(r.kappa));
        row("kappa_satisfied", r.kappa > *r.kappa_min ? "yes" : "no");
    }
    if (r.tau_max) {
        row("tau_max", num(*r.tau_max));
        row("tau", num(tau));
        row("tau_satisfied", tau < *r.tau_max ? "yes" : "no");
    }
    for (const auto& [k, v] : r.intermediates) row(k, num(v));
    for (const auto& w : r.warnings) row("warning", w);
    if (!r.diagnosis.empty()) row("diagnosis", r.diagnosis);
}

inline void write_flat(std::ostream& os, const BoundsReport& r, double tau) {
    os << std::setprecision(12);
    os << r.name << ".feasible=" << (r.feasible ? 1 : 0) << '\n';
    if (r.kappa_min) os << r.name << ".kappa_min=" << *r.kappa_min << '\n';
    os << r.name << ".kappa=" << r.kappa << '\n';
    if (r.tau_max) os << r.name << ".tau_max=" << *r.tau_max << '\n';
    os << r.name << ".tau=" << tau << '\n';
    for (const auto& [k, v] : r.intermediates) os << r.name << '.' << k << '=' << v << '\n';
    for (std::size_t i = 0; i < r.warnings.size(); ++i) os << r.name << ".warning" << i << '=' << r.warnings[i] << '\n';
    if (!r.diagnosis.empty()) os << r.name << ".diagnosis=" << r.diagnosis << '\n';
}

inline void print_verification(std::ostream& os, const VerificationReport& r) {
    os << '[' << r.title << "] " << (r.passed() ? "PASS" : "FAIL") << '\n';
    for (const auto& c : r.clauses)
        os << "  " << std::left << std::setw(26) << c.name << ' ' << std::setw(7) << to_string(c.status) << ' '
           << c.detail << '\n';
}

namespace detail {

class OutputTarget {
public:
    OutputTarget(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (path.empty()) return;
        file_.open(path);
        if (!file_) throw std::runtime_error("cannot write '" + path + "'");
        stream_ = &file_;
    }
    std::ostream& get() { return *stream_; }

private:
    std::ofstream file_;
    std::ostream* stream_;
};

}  // namespace detail

/// Runs one subcommand. Messages go to `err`, data to `--out` or `out`.
inline int run_command(const CliOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        ScenarioFile f = resolve_scenario(opt);
        Scenario& sc = f.scenario;
        if (opt.steps) sc.steps = *opt.steps;

        if (opt.command == "simulate") {
            const Trajectory traj = simulate(sc);
            detail::OutputTarget target(opt.out, out);
            write_trajectory_csv(target.get(), sc.graph, traj);
            return kExitOk;
        }
        if (opt.command == "bounds") {
            const auto reports = applicable_bounds(f, opt.gap_mode);
            out << "scenario " << (f.name.empty() ? "(unnamed)" : f.name) << ", gap mode " << to_string(opt.gap_mode)
                << '\n';
            bool feasible = true;
            for (const auto& r : reports) {
                print_report(out, r, sc.tau);
                feasible = feasible && r.feasible;
            }
            if (!opt.out.empty()) {
                detail::OutputTarget target(opt.out, out);
                for (const auto& r : reports) write_flat(target.get(), r, sc.tau);
            }
            return feasible ? kExitOk : kExitConditionsNotMet;
        }
        if (opt.command == "montecarlo") {
            MonteCarloOptions mc;
            mc.trials = opt.trials.value_or(f.analysis.trials);
            mc.horizon = opt.horizon.value_or(f.analysis.horizon_or(sc.steps));
            if (mc.horizon == 0) throw std::invalid_argument("montecarlo needs a positive horizon");
            mc.burn_in = std::min(f.analysis.burn_in_for(mc.horizon), mc.horizon);
            mc.start = f.analysis.start;
            mc.threads = opt.threads;
            const MonteCarloResult res = run_montecarlo(sc, f.analysis.set, mc);
            detail::OutputTarget target(opt.out, out);
            write_montecarlo_csv(target.get(), res, f.analysis.set);
            return kExitOk;
        }
        if (opt.command == "verify") {
            const VerificationReport r = sc.arcs.gamma_c ? check_assumption1_prime(sc.coupling, sc.arcs)
                                                         : check_assumption1(sc.coupling, sc.arcs);
            detail::OutputTarget target(opt.out, out);
            print_verification(target.get(), r);
            if (const auto gm = match_gamma_max(sc.coupling, sc.arcs.gamma))
                target.get() << "  hint: |Psi(gamma)| is matched at gamma_max = " << std::setprecision(10) << *gm
                             << '\n';
            return r.passed() ? kExitOk : kExitConditionsNotMet;
        }
        throw std::invalid_argument("unknown command '" + opt.command + "'");
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << '\n';
        return kExitError;
    }
}

}  // namespace stochsync
