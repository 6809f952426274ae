#pragma once

/// 2*pi-periodic coupling functions written as finite trigonometric series,
/// the arc partition of [0, pi] they induce, and grid-based verification of
/// the structural assumptions the coupling bounds rely on.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace stochsync {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class TermKind { sine, cosine };

struct CouplingTerm {
    double amplitude = 1.0;
    double frequency = 1.0;
    double phase = 0.0;
    TermKind kind = TermKind::sine;
};

/// Psi(x) = sum of amplitude * sin|cos(frequency * x + phase).
class CouplingSpec {
public:
    CouplingSpec() = default;
    explicit CouplingSpec(std::vector<CouplingTerm> terms) : terms_(std::move(terms)) {
        if (terms_.empty()) throw std::invalid_argument("coupling needs at least one term");
        for (const auto& t : terms_)
            if (!std::isfinite(t.amplitude) || !std::isfinite(t.frequency) || !std::isfinite(t.phase))
                throw std::invalid_argument("coupling term has a non-finite parameter");
    }

    static CouplingSpec kuramoto() { return CouplingSpec({{1.0, 1.0, 0.0, TermKind::sine}}); }

    double operator()(double x) const {
        double s = 0.0;
        for (const auto& t : terms_) {
            const double arg = t.frequency * x + t.phase;
            s += t.amplitude * (t.kind == TermKind::sine ? std::sin(arg) : std::cos(arg));
        }
        return s;
    }

    const std::vector<CouplingTerm>& terms() const noexcept { return terms_; }

    bool integer_frequencies() const {
        return std::all_of(terms_.begin(), terms_.end(),
                           [](const CouplingTerm& t) { return t.frequency == std::round(t.frequency); });
    }

private:
    std::vector<CouplingTerm> terms_;
};

inline double evaluate(const CouplingSpec& spec, double angle) { return spec(angle); }

/// Arc boundaries: the in-phase arc [0, gamma], the middle arc
/// (gamma, gamma_max), the anti-phase arc [gamma_max, pi]. gamma_c and
/// psi_bar belong to the relaxed (partly non-odd) coupling case.
struct ArcPartition {
    double gamma = kPi / 8.0;
    double gamma_max = kPi / 1.14;
    std::optional<double> gamma_c;
    std::optional<double> psi_bar;

    void validate() const {
        if (!(gamma > 0.0 && gamma < gamma_max && gamma_max < kPi)) {
            std::ostringstream msg;
            msg << "arcs must satisfy 0 < gamma < gamma_max < pi (gamma = " << gamma
                << ", gamma_max = " << gamma_max << ")";
            throw std::invalid_argument(msg.str());
        }
        if (gamma_c && !(*gamma_c > 0.0 && *gamma_c < gamma))
            throw std::invalid_argument("gamma_c must lie in (0, gamma)");
        if (psi_bar && !(*psi_bar >= 0.0)) throw std::invalid_argument("psi_bar must be nonnegative");
    }

    bool in_lower(double abs_rel) const { return abs_rel <= gamma; }
    bool in_middle(double abs_rel) const { return abs_rel > gamma && abs_rel < gamma_max; }
    bool in_upper(double abs_rel) const { return abs_rel >= gamma_max; }
};

inline constexpr std::size_t kVerificationGrid = 10'000;
inline constexpr std::size_t kExtremumGrid = 200'000;
inline constexpr double kEqualityTolerance = 1e-9;
inline constexpr double kDominanceSlack = 1e-12;
inline constexpr double kArcLevelTolerance = 1e-6;

namespace detail {

// Golden-section maximisation of f on [lo, hi].
template <class F>
double golden_max(F&& f, double lo, double hi, double tol = 1e-10) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return std::max({f(a), f(b), f(0.5 * (a + b))});
}

}  // namespace detail

/// Max of |Psi| on [lo, hi] over an evenly spaced grid including endpoints.
inline double max_abs_on(const CouplingSpec& spec, double lo, double hi, std::size_t points = kVerificationGrid) {
    double best = 0.0;
    for (std::size_t i = 0; i <= points; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points);
        best = std::max(best, std::abs(spec(x)));
    }
    return best;
}

/// Max of |Psi| over [-pi, pi]: dense grid, then golden-section refinement
/// around the best grid cell.
inline double psi_max(const CouplingSpec& spec) {
    const auto absf = [&spec](double x) { return std::abs(spec(x)); };
    const double h = kTwoPi / static_cast<double>(kExtremumGrid);
    double best = -1.0;
    double arg = 0.0;
    for (std::size_t i = 0; i <= kExtremumGrid; ++i) {
        const double x = -kPi + h * static_cast<double>(i);
        const double v = absf(x);
        if (v > best) {
            best = v;
            arg = x;
        }
    }
    const double lo = std::max(-kPi, arg - h);
    const double hi = std::min(kPi, arg + h);
    return std::max(best, detail::golden_max(absf, lo, hi));
}

/// Solve for gamma_max in (argmax |Psi| on [gamma, pi], pi) with
/// |Psi(gamma_max)| = |Psi(gamma)|, by bisection. Returns nullopt when |Psi|
/// does not come back down to |Psi(gamma)| before pi.
inline std::optional<double> match_gamma_max(const CouplingSpec& spec, double gamma) {
    const double level = std::abs(spec(gamma));
    double peak = gamma;
    double peak_val = level;
    const std::size_t n = kVerificationGrid;
    for (std::size_t i = 0; i <= n; ++i) {
        const double x = gamma + (kPi - gamma) * static_cast<double>(i) / static_cast<double>(n);
        if (const double v = std::abs(spec(x)); v > peak_val) {
            peak_val = v;
            peak = x;
        }
    }
    // First grid point after the peak where |Psi| falls back to the level.
    double lo = peak, hi = kPi;
    bool found = false;
    for (std::size_t i = 1; i <= n; ++i) {
        const double x = peak + (kPi - peak) * static_cast<double>(i) / static_cast<double>(n);
        if (std::abs(spec(x)) <= level) {
            hi = x;
            lo = peak + (kPi - peak) * static_cast<double>(i - 1) / static_cast<double>(n);
            found = true;
            break;
        }
    }
    if (!found || peak == gamma) return std::nullopt;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (std::abs(spec(mid)) > level ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

enum class ClauseStatus { pass, warning, fail };

inline const char* to_string(ClauseStatus s) {
    switch (s) {
        case ClauseStatus::pass: return "pass";
        case ClauseStatus::warning: return "warning";
        case ClauseStatus::fail: return "FAIL";
    }
    return "?";
}

struct Clause {
    std::string name;
    ClauseStatus status = ClauseStatus::pass;
    double measured = 0.0;  // defect or margin, see detail
    std::string detail;
};

struct VerificationReport {
    std::string title;
    std::vector<Clause> clauses;

    bool passed() const {
        return std::none_of(clauses.begin(), clauses.end(),
                            [](const Clause& c) { return c.status == ClauseStatus::fail; });
    }

    const Clause* find(const std::string& name) const {
        for (const auto& c : clauses)
            if (c.name == name) return &c;
        return nullptr;
    }
};

namespace detail {

inline Clause periodicity_clause(const CouplingSpec& spec) {
    double defect = 0.0;
    for (std::size_t i = 0; i <= kVerificationGrid; ++i) {
        const double x = -kPi + kTwoPi * static_cast<double>(i) / kVerificationGrid;
        defect = std::max(defect, std::abs(spec(x + kTwoPi) - spec(x)));
    }
    Clause c{"periodicity", ClauseStatus::pass, defect, {}};
    std::ostringstream d;
    d << "max |Psi(x + 2pi) - Psi(x)| = " << defect;
    // Non-integer harmonics are reported, not rejected.
    if (defect > kEqualityTolerance) {
        c.status = ClauseStatus::warning;
        d << " (not 2pi-periodic; used on one period only)";
    }
    c.detail = d.str();
    return c;
}

// Oddness defect max |Psi(-x) + Psi(x)| for x in [from, pi].
inline Clause oddness_clause(const CouplingSpec& spec, double from, const std::string& name) {
    double defect = 0.0;
    for (std::size_t i = 0; i <= kVerificationGrid; ++i) {
        const double x = from + (kPi - from) * static_cast<double>(i) / kVerificationGrid;
        defect = std::max(defect, std::abs(spec(-x) + spec(x)));
    }
    std::ostringstream d;
    d << "max |Psi(-x) + Psi(x)| over |x| in [" << from << ", pi] = " << defect;
    return {name, defect <= kEqualityTolerance ? ClauseStatus::pass : ClauseStatus::fail, defect, d.str()};
}

// inf |Psi| over the open middle arc against sup |Psi| over the rest.
inline Clause dominance_clause(const CouplingSpec& spec, const ArcPartition& arcs) {
    double inner_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < kVerificationGrid; ++i) {
        const double x = arcs.gamma + (arcs.gamma_max - arcs.gamma) * static_cast<double>(i) / kVerificationGrid;
        inner_min = std::min({inner_min, std::abs(spec(x)), std::abs(spec(-x))});
    }
    const double outer_max = std::max({max_abs_on(spec, 0.0, arcs.gamma), max_abs_on(spec, -arcs.gamma, 0.0),
                                       max_abs_on(spec, arcs.gamma_max, kPi), max_abs_on(spec, -kPi, -arcs.gamma_max)});
    const double margin = inner_min - outer_max;
    std::ostringstream d;
    d << "min |Psi| on middle arc = " << inner_min << ", max |Psi| off it = " << outer_max << ", margin = " << margin;
    return {"arc_dominance", margin >= -kDominanceSlack ? ClauseStatus::pass : ClauseStatus::fail, margin, d.str()};
}

inline Clause arc_level_clause(const CouplingSpec& spec, const ArcPartition& arcs) {
    const double a = std::abs(spec(arcs.gamma));
    const double b = std::abs(spec(arcs.gamma_max));
    const double defect = std::abs(a - b);
    std::ostringstream d;
    d << "|Psi(gamma)| = " << a << ", |Psi(gamma_max)| = " << b;
    return {"arc_level_match", defect <= kArcLevelTolerance ? ClauseStatus::pass : ClauseStatus::fail, defect,
            d.str()};
}

}  // namespace detail

/// Grid check of: periodicity (warning only), oddness, roots at 0 and pi,
/// |Psi(gamma)| = |Psi(gamma_max)|, and dominance of the middle arc.
inline VerificationReport check_assumption1(const CouplingSpec& spec, const ArcPartition& arcs) {
    arcs.validate();
    VerificationReport r{"odd coupling", {}};
    r.clauses.push_back(detail::periodicity_clause(spec));
    r.clauses.push_back(detail::oddness_clause(spec, 0.0, "oddness"));

    const double root_defect = std::max(std::abs(spec(0.0)), std::abs(spec(kPi)));
    std::ostringstream d;
    d << "|Psi(0)| = " << std::abs(spec(0.0)) << ", |Psi(pi)| = " << std::abs(spec(kPi));
    r.clauses.push_back({"roots_at_0_and_pi", root_defect <= kEqualityTolerance ? ClauseStatus::pass : ClauseStatus::fail,
                         root_defect, d.str()});

    r.clauses.push_back(detail::arc_level_clause(spec, arcs));
    r.clauses.push_back(detail::dominance_clause(spec, arcs));
    return r;
}

/// Relaxed variant: oddness only for |x| >= gamma_c, |Psi| <= psi_bar on
/// [-gamma_c, gamma_c], psi_bar < |Psi(gamma)|, plus the arc checks.
inline VerificationReport check_assumption1_prime(const CouplingSpec& spec, const ArcPartition& arcs) {
    arcs.validate();
    if (!arcs.gamma_c || !arcs.psi_bar)
        throw std::invalid_argument("relaxed coupling check needs arcs.gamma_c and arcs.psi_bar");
    const double gc = *arcs.gamma_c;
    const double pb = *arcs.psi_bar;

    VerificationReport r{"relaxed coupling", {}};
    r.clauses.push_back(detail::periodicity_clause(spec));
    r.clauses.push_back(detail::oddness_clause(spec, gc, "oddness_outside_gamma_c"));

    const double core_max = max_abs_on(spec, -gc, gc);
    std::ostringstream d1;
    d1 << "max |Psi| on [-gamma_c, gamma_c] = " << core_max << ", psi_bar = " << pb;
    r.clauses.push_back({"psi_bar_bounds_core", core_max <= pb + kDominanceSlack ? ClauseStatus::pass : ClauseStatus::fail,
                         pb - core_max, d1.str()});

    const double at_gamma = std::abs(spec(arcs.gamma));
    std::ostringstream d2;
    d2 << "psi_bar = " << pb << ", |Psi(gamma)| = " << at_gamma;
    r.clauses.push_back({"psi_bar_below_psi_gamma", pb < at_gamma ? ClauseStatus::pass : ClauseStatus::fail,
                         at_gamma - pb, d2.str()});

    r.clauses.push_back(detail::arc_level_clause(spec, arcs));
    r.clauses.push_back(detail::dominance_clause(spec, arcs));
    return r;
}

}  // namespace stochsync
