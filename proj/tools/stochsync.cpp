#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "stochsync/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Stochastic phase-cohesiveness toolkit for coupled oscillator networks"};
    app.require_subcommand(1);

    stochsync::CliOptions opt;
    std::string gap_mode = "nominal";
    std::string positional;

    const auto add_common = [&](CLI::App* sub) {
        auto* scen = sub->add_option("--scenario", opt.scenario_path, "Scenario YAML file");
        auto* pre = sub->add_option("--preset", opt.preset, "Built-in preset (exp1 .. exp6)");
        scen->excludes(pre);
        sub->add_option("name", positional, "Preset name (same as --preset)");
        sub->add_option("--seed", opt.seed, "Override the scenario seed");
        sub->add_option("--out", opt.out, "Output path (stdout when omitted)");
        sub->add_option("--threads", opt.threads, "Worker threads for trials (0: all cores)");
    };

    auto* simulate = app.add_subcommand("simulate", "Write a trajectory CSV");
    add_common(simulate);
    simulate->add_option("--steps", opt.steps, "Number of steps");

    auto* bounds = app.add_subcommand("bounds", "Print the sufficient kappa and tau bounds");
    add_common(bounds);
    bounds->add_option("--gap-mode", gap_mode, "Frequency gap: nominal | exact | bound")
        ->check(CLI::IsMember({"nominal", "exact", "bound"}));

    auto* montecarlo = app.add_subcommand("montecarlo", "Return-time and occupancy statistics over trials");
    add_common(montecarlo);
    montecarlo->add_option("--trials", opt.trials, "Number of trials");
    montecarlo->add_option("--horizon", opt.horizon, "Steps per trial");

    auto* verify = app.add_subcommand("verify", "Check the coupling function against the arc assumptions");
    add_common(verify);

    auto* presets = app.add_subcommand("presets", "List built-in presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? stochsync::kExitOk : stochsync::kExitError;
    }

    if (presets->parsed()) {
        for (const auto& n : stochsync::preset_names()) std::cout << n << '\n';
        return stochsync::kExitOk;
    }

    opt.command = app.get_subcommands().front()->get_name();
    if (!positional.empty()) {
        if (!opt.preset.empty() || !opt.scenario_path.empty()) {
            std::cerr << "error: give the preset either positionally or with --preset/--scenario\n";
            return stochsync::kExitError;
        }
        opt.preset = positional;
    }
    opt.gap_mode = stochsync::parse_gap_mode(gap_mode);
    return stochsync::run_command(opt, std::cout, std::cerr);
}
