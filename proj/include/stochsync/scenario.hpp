#pragma once

/// Declarative scenario files (YAML) and the built-in experiment presets.
///
/// Grammar (all keys optional unless marked):
///
///   name: exp1
///   graph:   {nodes: 5, edges: [[1, 2], [2, 3]]}          # required, 1-based
///   coupling:
///     terms: [{kind: sin, amp: 1, freq: 1, phase: 0}]    # kind sin|cos
///   arcs:    {gamma: pi/8, gamma_max: pi/1.14, gamma_c: 0.434, psi_bar: 0.2}
///   kappa: 40                                            # required
///   tau: 0.001                                           # required
///   steps: 20000
///   seed: 1
///   model:                                               # required
///     type: gaussian
///     edge_means: [...]
///     edge_variance: 0.5
///     freq_const: [...]
///     freq_noise_means: [...]
///     freq_noise_variances: [...]
///   # or: {type: bernoulli, p: 0.8, freq_const: [...]}
///   initial_phases: [pi/4, ...] | uniform_random
///   analysis:
///     set: {kind: in_phase|anti_phase|union|relaxed|origin, tolerance: 0.05}
///     trials: 20
///     horizon: 20000
///     burn_in: 15000
///     start: initial|first_exit
///     tail_fraction: 0.25
///     cluster_threshold: 0.9
///
/// Angles and reals accept plain numbers or `pi` forms: pi, -pi/8, 0.4pi,
/// 0.4*pi, 3*pi/4.

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stochsync/analysis.hpp"
#include "stochsync/coupling.hpp"
#include "stochsync/dynamics.hpp"
#include "stochsync/graph.hpp"
#include "stochsync/stochastic.hpp"

namespace stochsync {

struct AnalysisSettings {
    PhaseSetSpec set;
    std::size_t trials = 20;
    std::optional<std::size_t> horizon;  // default: scenario steps
    std::optional<std::size_t> burn_in;  // default: first 75% of the horizon
    StartMode start = StartMode::initial;
    double tail_fraction = 0.25;
    double cluster_threshold = 0.9;

    std::size_t horizon_or(std::size_t steps) const { return horizon.value_or(steps); }
    std::size_t burn_in_for(std::size_t horizon_steps) const {
        return burn_in.value_or(horizon_steps - horizon_steps / 4);
    }
};

struct ScenarioFile {
    std::string name;
    Scenario scenario;
    AnalysisSettings analysis;
};

class ScenarioError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

namespace detail {

class ScenarioReader {
public:
    explicit ScenarioReader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const YAML::Node& at, const std::string& msg) const {
        std::ostringstream out;
        out << source_;
        if (at.IsDefined() && at.Mark().line >= 0) out << ':' << at.Mark().line + 1 << ':' << at.Mark().column + 1;
        out << ": " << msg;
        throw ScenarioError(out.str());
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ScenarioError(source_ + ": " + msg); }

    void expect_map(const YAML::Node& n, const std::string& where) const {
        if (!n.IsMap()) fail(n, where + " must be a mapping");
    }

    void only_keys(const YAML::Node& n, const std::string& where, std::initializer_list<const char*> allowed) const {
        expect_map(n, where);
        for (const auto& kv : n) {
            const auto key = kv.first.as<std::string>();
            if (std::none_of(allowed.begin(), allowed.end(), [&key](const char* a) { return key == a; }))
                fail(kv.first, "unknown key '" + key + "' in " + where);
        }
    }

    YAML::Node required(const YAML::Node& parent, const char* key, const std::string& where) const {
        const YAML::Node n = parent[key];
        if (!n) fail(parent, where + " is missing required key '" + key + "'");
        return n;
    }

    std::string text(const YAML::Node& n, const std::string& key) const {
        if (!n.IsScalar()) fail(n, key + " must be a scalar");
        return n.Scalar();
    }

    /// Number, or a multiple/fraction of pi.
    double real(const YAML::Node& n, const std::string& key) const {
        const std::string s = text(n, key);
        if (auto v = parse_real(s)) return *v;
        fail(n, key + ": malformed number '" + s + "'");
    }

    std::size_t count(const YAML::Node& n, const std::string& key) const {
        const std::string s = text(n, key);
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) fail(n, key + ": expected a nonnegative integer, got '" + s + "'");
        return static_cast<std::size_t>(v);
    }

    std::uint64_t u64(const YAML::Node& n, const std::string& key) const { return count(n, key); }

    std::vector<double> reals(const YAML::Node& n, const std::string& key) const {
        if (!n.IsSequence()) fail(n, key + " must be a list");
        std::vector<double> out;
        for (std::size_t i = 0; i < n.size(); ++i) out.push_back(real(n[i], key + "[" + std::to_string(i) + "]"));
        return out;
    }

    static std::optional<double> parse_real(std::string s) {
        s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
        if (s.empty()) return std::nullopt;
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec == std::errc() && ptr == s.data() + s.size()) return v;

        static const std::regex pi_form(R"(^([+-]?)((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\*?pi(?:/((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?))?$)");
        std::smatch m;
        if (!std::regex_match(s, m, pi_form)) return std::nullopt;
        double factor = m[2].matched ? std::stod(m[2].str()) : 1.0;
        if (m[1].str() == "-") factor = -factor;
        double value = factor * kPi;
        if (m[3].matched) {
            const double d = std::stod(m[3].str());
            if (d == 0.0) return std::nullopt;
            value /= d;
        }
        return value;
    }

    Graph graph(const YAML::Node& n) const {
        only_keys(n, "graph", {"nodes", "edges"});
        const std::size_t nodes = count(required(n, "nodes", "graph"), "graph.nodes");
        const YAML::Node edges = required(n, "edges", "graph");
        if (!edges.IsSequence()) fail(edges, "graph.edges must be a list of [tail, head] pairs");
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        for (std::size_t l = 0; l < edges.size(); ++l) {
            const YAML::Node e = edges[l];
            if (!e.IsSequence() || e.size() != 2) fail(e, "graph.edges[" + std::to_string(l) + "] must be [tail, head]");
            pairs.emplace_back(count(e[0], "graph.edges"), count(e[1], "graph.edges"));
        }
        try {
            return Graph::from_one_based(nodes, pairs);
        } catch (const std::invalid_argument& ex) {
            fail(n, std::string("graph: ") + ex.what());
        }
    }

    CouplingSpec coupling(const YAML::Node& n) const {
        only_keys(n, "coupling", {"terms"});
        const YAML::Node terms = required(n, "terms", "coupling");
        if (!terms.IsSequence() || terms.size() == 0) fail(terms, "coupling.terms must be a nonempty list");
        std::vector<CouplingTerm> out;
        for (const auto& t : terms) {
            only_keys(t, "coupling term", {"kind", "amp", "freq", "phase"});
            CouplingTerm term;
            if (t["kind"]) {
                const std::string k = text(t["kind"], "kind");
                if (k == "sin")
                    term.kind = TermKind::sine;
                else if (k == "cos")
                    term.kind = TermKind::cosine;
                else
                    fail(t["kind"], "coupling term kind must be sin or cos, got '" + k + "'");
            }
            if (t["amp"]) term.amplitude = real(t["amp"], "amp");
            if (t["freq"]) term.frequency = real(t["freq"], "freq");
            if (t["phase"]) term.phase = real(t["phase"], "phase");
            out.push_back(term);
        }
        return CouplingSpec(std::move(out));
    }

    ArcPartition arcs(const YAML::Node& n) const {
        only_keys(n, "arcs", {"gamma", "gamma_max", "gamma_c", "psi_bar"});
        ArcPartition a;
        if (n["gamma"]) a.gamma = real(n["gamma"], "arcs.gamma");
        if (n["gamma_max"]) a.gamma_max = real(n["gamma_max"], "arcs.gamma_max");
        if (n["gamma_c"]) a.gamma_c = real(n["gamma_c"], "arcs.gamma_c");
        if (n["psi_bar"]) a.psi_bar = real(n["psi_bar"], "arcs.psi_bar");
        return a;
    }

    UncertaintyModel model(const YAML::Node& n) const {
        expect_map(n, "model");
        const std::string type = text(required(n, "type", "model"), "model.type");
        if (type == "gaussian") {
            only_keys(n, "model", {"type", "edge_means", "edge_variance", "freq_const", "freq_noise_means",
                                   "freq_noise_variances"});
            GaussianUncertainty g;
            g.edge_means = reals(required(n, "edge_means", "model"), "model.edge_means");
            g.edge_variance = real(required(n, "edge_variance", "model"), "model.edge_variance");
            g.freq_const = reals(required(n, "freq_const", "model"), "model.freq_const");
            g.freq_noise_means = n["freq_noise_means"] ? reals(n["freq_noise_means"], "model.freq_noise_means")
                                                       : std::vector<double>(g.freq_const.size(), 0.0);
            g.freq_noise_variances = n["freq_noise_variances"]
                                         ? reals(n["freq_noise_variances"], "model.freq_noise_variances")
                                         : std::vector<double>(g.freq_const.size(), 0.0);
            return g;
        }
        if (type == "bernoulli") {
            only_keys(n, "model", {"type", "p", "freq_const"});
            BernoulliModel b;
            b.p = real(required(n, "p", "model"), "model.p");
            b.freq_const = reals(required(n, "freq_const", "model"), "model.freq_const");
            return b;
        }
        fail(n["type"], "model.type must be gaussian or bernoulli, got '" + type + "'");
    }

    AnalysisSettings analysis(const YAML::Node& n, const ArcPartition& arcs) const {
        only_keys(n, "analysis",
                  {"set", "trials", "horizon", "burn_in", "start", "tail_fraction", "cluster_threshold"});
        AnalysisSettings a;
        a.set = PhaseSetSpec::from_arcs(SetKind::in_phase, arcs);
        if (const YAML::Node s = n["set"]) {
            only_keys(s, "analysis.set", {"kind", "tolerance"});
            if (s["kind"]) {
                const std::string k = text(s["kind"], "analysis.set.kind");
                if (k == "in_phase")
                    a.set.kind = SetKind::in_phase;
                else if (k == "anti_phase")
                    a.set.kind = SetKind::anti_phase;
                else if (k == "union")
                    a.set.kind = SetKind::union_arcs;
                else if (k == "relaxed")
                    a.set.kind = SetKind::relaxed;
                else if (k == "origin")
                    a.set.kind = SetKind::origin;
                else
                    fail(s["kind"], "analysis.set.kind: unknown set '" + k + "'");
            }
            if (s["tolerance"]) a.set.tolerance = real(s["tolerance"], "analysis.set.tolerance");
            if (a.set.tolerance < 0.0) fail(s, "analysis.set.tolerance must be nonnegative");
            if (a.set.kind == SetKind::origin && !(a.set.tolerance > 0.0))
                fail(s, "analysis.set: origin set needs a positive tolerance");
        }
        if (n["trials"]) a.trials = count(n["trials"], "analysis.trials");
        if (a.trials == 0) fail(n["trials"], "analysis.trials must be at least 1");
        if (n["horizon"]) a.horizon = count(n["horizon"], "analysis.horizon");
        if (n["burn_in"]) a.burn_in = count(n["burn_in"], "analysis.burn_in");
        if (n["start"]) {
            const std::string s = text(n["start"], "analysis.start");
            if (s == "initial")
                a.start = StartMode::initial;
            else if (s == "first_exit")
                a.start = StartMode::first_exit;
            else
                fail(n["start"], "analysis.start must be initial or first_exit");
        }
        if (n["tail_fraction"]) a.tail_fraction = real(n["tail_fraction"], "analysis.tail_fraction");
        if (!(a.tail_fraction > 0.0 && a.tail_fraction <= 1.0)) fail(n, "analysis.tail_fraction must lie in (0, 1]");
        if (n["cluster_threshold"]) a.cluster_threshold = real(n["cluster_threshold"], "analysis.cluster_threshold");
        if (!(a.cluster_threshold > 0.0 && a.cluster_threshold < 1.0))
            fail(n, "analysis.cluster_threshold must lie in (0, 1)");
        return a;
    }

    ScenarioFile document(const YAML::Node& root) const {
        if (!root.IsMap()) fail(root, "scenario must be a mapping");
        only_keys(root, "scenario",
                  {"name", "graph", "coupling", "arcs", "kappa", "tau", "steps", "seed", "model", "initial_phases",
                   "analysis"});
        ScenarioFile f;
        Scenario& sc = f.scenario;
        if (root["name"]) f.name = text(root["name"], "name");
        sc.graph = graph(required(root, "graph", "scenario"));
        sc.coupling = root["coupling"] ? coupling(root["coupling"]) : CouplingSpec::kuramoto();
        if (root["arcs"]) sc.arcs = arcs(root["arcs"]);
        sc.kappa = real(required(root, "kappa", "scenario"), "kappa");
        sc.tau = real(required(root, "tau", "scenario"), "tau");
        if (root["steps"]) sc.steps = count(root["steps"], "steps");
        if (root["seed"]) sc.seed.master_seed = u64(root["seed"], "seed");
        sc.model = model(required(root, "model", "scenario"));
        if (const YAML::Node ip = root["initial_phases"]) {
            if (ip.IsScalar()) {
                if (ip.Scalar() != "uniform_random")
                    fail(ip, "initial_phases must be a list or 'uniform_random'");
            } else {
                sc.initial_phases = reals(ip, "initial_phases");
            }
        }
        f.analysis = root["analysis"] ? analysis(root["analysis"], sc.arcs)
                                      : analysis(YAML::Node(YAML::NodeType::Map), sc.arcs);
        try {
            sc.validate();
        } catch (const std::invalid_argument& ex) {
            fail(ex.what());
        }
        return f;
    }

private:
    std::string source_;
};

}  // namespace detail

/// Parses and validates a scenario document. Errors name the source, the
/// line and column where known, and the offending key.
inline ScenarioFile parse_scenario(const std::string& text, const std::string& source = "<scenario>") {
    const detail::ScenarioReader reader(source);
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& ex) {
        std::ostringstream msg;
        msg << source << ':' << ex.mark.line + 1 << ':' << ex.mark.column + 1 << ": " << ex.msg;
        throw ScenarioError(msg.str());
    }
    try {
        return reader.document(root);
    } catch (const ScenarioError&) {
        throw;
    } catch (const YAML::Exception& ex) {
        std::ostringstream msg;
        msg << source << ':' << ex.mark.line + 1 << ':' << ex.mark.column + 1 << ": " << ex.msg;
        throw ScenarioError(msg.str());
    }
}

inline ScenarioFile load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path);
}

// ---------------------------------------------------------------------------
// Presets.

namespace detail {

inline constexpr const char* kFiveNodeGraph = R"(
graph:
  nodes: 5
  edges: [[1, 2], [2, 3], [3, 4], [1, 4], [4, 5]]
)";

inline constexpr const char* kLineGraph = R"(
graph:
  nodes: 5
  edges: [[1, 2], [2, 3], [1, 4], [4, 5]]
)";

inline constexpr const char* kPaperCoupling = R"(
coupling:
  terms:
    - {kind: sin, amp: 1.0, freq: 1}
    - {kind: sin, amp: 0.3, freq: 3}
)";

inline constexpr const char* kInitialPhases = R"(
initial_phases: [pi/4, pi/8, -pi/8, -pi/5, pi/5]
)";

inline std::string gaussian_block(const char* means, const char* freq_const, const char* noise_means) {
    return std::string("model:\n  type: gaussian\n  edge_means: ") + means +
           "\n  edge_variance: 0.5\n  freq_const: " + freq_const + "\n  freq_noise_means: " + noise_means +
           "\n  freq_noise_variances: [1, 2, 1, 3, 1.5]\n";
}

inline std::string bernoulli_block(const char* p, const char* freq_const) {
    return std::string("model:\n  type: bernoulli\n  p: ") + p + "\n  freq_const: " + freq_const + "\n";
}

inline std::string header(const char* name, const char* kappa, const char* tau, const char* steps) {
    return std::string("name: ") + name + "\nkappa: " + kappa + "\ntau: " + tau + "\nsteps: " + steps +
           "\nseed: 1\narcs: {gamma: pi/8, gamma_max: pi/1.14}\n";
}

inline std::string analysis_block(const char* set, const char* trials, const char* horizon) {
    return std::string("analysis:\n  set: {kind: ") + set + ", tolerance: 0.05}\n  trials: " + trials +
           "\n  horizon: " + horizon + "\n";
}

inline const std::map<std::string, std::string>& preset_texts() {
    static const std::map<std::string, std::string> texts = [] {
        std::map<std::string, std::string> t;
        const char* freqs = "[1, 2, 3, 4, 5]";
        const char* noise = "[4, 2, 0, 1, -2]";
        t["exp1"] = header("exp1", "40", "0.001", "20000") + kFiveNodeGraph + kPaperCoupling + kInitialPhases +
                    gaussian_block("[1, 3, 0.85, 1.5, 2]", freqs, noise) +
                    analysis_block("in_phase", "20", "20000");
        t["exp2"] = header("exp2", "40", "0.001", "20000") + kFiveNodeGraph + kPaperCoupling + kInitialPhases +
                    gaussian_block("[-1, -3, -0.85, -1.5, -2]", freqs, noise) +
                    analysis_block("anti_phase", "20", "20000");
        t["exp3"] = header("exp3", "2", "0.001", "20000") + kLineGraph + kPaperCoupling + kInitialPhases +
                    gaussian_block("[-1, -1, 1, 1]", "[0, 0, 0, 0, 0]", "[0, 0, 0, 0, 0]") +
                    analysis_block("union", "20", "20000");
        const auto random_net = [&](const char* name, const char* p, const char* kappa) {
            return header(name, kappa, "0.01", "20000") + kFiveNodeGraph + kPaperCoupling + kInitialPhases +
                   bernoulli_block(p, freqs) + analysis_block("in_phase", "20", "20000");
        };
        t["exp4a"] = random_net("exp4a", "0.8", "19");
        t["exp4b"] = random_net("exp4b", "0.3", "12");
        t["exp4c"] = random_net("exp4c", "0.3", "30");
        t["exp5"] = std::string(
                        "name: exp5\nkappa: 10\ntau: 0.001\nsteps: 20000\nseed: 1\n"
                        "arcs: {gamma: 0.4pi, gamma_max: pi/1.14, gamma_c: 0.434, psi_bar: 0.2}\n"
                        "coupling:\n  terms:\n"
                        "    - {kind: sin, amp: 1.5, freq: 1.1}\n"
                        "    - {kind: cos, amp: -0.7, freq: 3.3, phase: -0.4pi}\n") +
                    kLineGraph + kInitialPhases + gaussian_block("[1, 3, 1.5, 2]", freqs, noise) +
                    analysis_block("relaxed", "20", "20000");
        const auto locking = [&](const char* name, const char* p) {
            return header(name, "0.5", "0.01", "10000") + kFiveNodeGraph + kPaperCoupling + kInitialPhases +
                   bernoulli_block(p, "[1, 1, 1, 1, 1]") +
                   "analysis:\n  set: {kind: origin, tolerance: 0.01}\n  trials: 20\n  horizon: 10000\n";
        };
        t["exp6a"] = locking("exp6a", "0.8");
        t["exp6b"] = locking("exp6b", "0.1");
        return t;
    }();
    return texts;
}

}  // namespace detail

/// Built-in presets. exp4 and exp6 alias their first variant.
inline std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& [k, v] : detail::preset_texts()) names.push_back(k);
    names.insert(names.begin() + 3, "exp4");
    names.push_back("exp6");
    std::sort(names.begin(), names.end());
    return names;
}

inline std::string preset_text(const std::string& name) {
    const std::string key = name == "exp4" ? "exp4a" : name == "exp6" ? "exp6a" : name;
    const auto& texts = detail::preset_texts();
    const auto it = texts.find(key);
    if (it == texts.end()) {
        std::string known;
        for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
        throw std::invalid_argument("unknown preset '" + name + "' (known: " + known + ")");
    }
    return it->second;
}

inline ScenarioFile load_preset(const std::string& name) { return parse_scenario(preset_text(name), "preset:" + name); }

}  // namespace stochsync
