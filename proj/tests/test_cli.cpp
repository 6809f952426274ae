#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "stochsync/cli.hpp"

using namespace stochsync;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(CliOptions opt) {
    std::ostringstream out, err;
    const int code = run_command(opt, out, err);
    return {code, out.str(), err.str()};
}

CliOptions preset(const std::string& command, const std::string& name) {
    CliOptions o;
    o.command = command;
    o.preset = name;
    return o;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("stochsync_test_" + name)).string();
}

}  // namespace

TEST(Cli, BoundsExp1ReportsKappaMin) {
    const auto r = run(preset("bounds", "exp1"));
    EXPECT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("[theorem1_inphase]"), std::string::npos);
    EXPECT_NE(r.out.find("kappa_min          41.6"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("[corollary1_ultimate]"), std::string::npos);
}

TEST(Cli, BoundsFlatFile) {
    auto o = preset("bounds", "exp4a");
    o.out = temp_path("flat.txt");
    const auto r = run(o);
    EXPECT_EQ(r.code, kExitOk) << r.err;
    std::ifstream in(o.out);
    std::string text((std::istreambuf_iterator<char>(in)), {});
    EXPECT_NE(text.find("theorem3_random.feasible=1"), std::string::npos) << text;
    EXPECT_NE(text.find("theorem3_random.kappa_min=14.8"), std::string::npos) << text;
    std::filesystem::remove(o.out);
}

TEST(Cli, BoundsDispatch) {
    EXPECT_NE(run(preset("bounds", "exp2")).out.find("[theorem1_antiphase]"), std::string::npos);
    EXPECT_NE(run(preset("bounds", "exp3")).out.find("[prop1_line_clustering]"), std::string::npos);
    EXPECT_NE(run(preset("bounds", "exp5")).out.find("[prop2_relaxed]"), std::string::npos);
    auto exact = preset("bounds", "exp1");
    exact.gap_mode = GapMode::exact_pairwise;
    EXPECT_NE(run(exact).out.find("gap mode exact"), std::string::npos);
}

TEST(Cli, InfeasibleBoundsExitTwo) {
    const std::string path = temp_path("noisy.yaml");
    std::ofstream(path) << R"(
graph: {nodes: 2, edges: [[1, 2]]}
kappa: 1
tau: 0.01
model:
  type: gaussian
  edge_means: [0.5]
  edge_variance: 4
  freq_const: [0, 1]
)";
    CliOptions o;
    o.command = "bounds";
    o.scenario_path = path;
    const auto r = run(o);
    EXPECT_EQ(r.code, kExitConditionsNotMet);
    EXPECT_NE(r.out.find("diagnosis"), std::string::npos);
    std::filesystem::remove(path);
}

TEST(Cli, ErrorsExitOne) {
    EXPECT_EQ(run(preset("bounds", "nope")).code, kExitError);
    EXPECT_EQ(run(preset("dance", "exp1")).code, kExitError);
    CliOptions both = preset("bounds", "exp1");
    both.scenario_path = "x.yaml";
    EXPECT_EQ(run(both).code, kExitError);
    CliOptions missing;
    missing.command = "simulate";
    missing.scenario_path = "/nonexistent/s.yaml";
    const auto r = run(missing);
    EXPECT_EQ(r.code, kExitError);
    EXPECT_NE(r.err.find("/nonexistent/s.yaml"), std::string::npos);
    auto unwritable = preset("simulate", "exp1");
    unwritable.steps = 3;
    unwritable.out = "/nonexistent/dir/out.csv";
    EXPECT_EQ(run(unwritable).code, kExitError);
    EXPECT_THROW(parse_gap_mode("median"), std::invalid_argument);
}

TEST(Cli, VerifyReports) {
    const auto odd = run(preset("verify", "exp1"));
    EXPECT_EQ(odd.code, kExitConditionsNotMet);
    EXPECT_NE(odd.out.find("arc_level_match"), std::string::npos);
    EXPECT_NE(odd.out.find("hint"), std::string::npos);
    const auto relaxed = run(preset("verify", "exp5"));
    EXPECT_NE(relaxed.out.find("[relaxed coupling]"), std::string::npos);
    EXPECT_EQ(relaxed.code, kExitConditionsNotMet);
}

TEST(Cli, SimulateExp1StaysInPhase) {
    auto o = preset("simulate", "exp1");
    o.steps = 20000;
    const auto r = run(o);
    ASSERT_EQ(r.code, kExitOk) << r.err;
    std::istringstream in(r.out);
    std::string line;
    std::vector<double> max_rel;
    std::getline(in, line);
    while (std::getline(in, line)) max_rel.push_back(std::stod(line.substr(line.rfind(',') + 1)));
    ASSERT_EQ(max_rel.size(), 20001u);
    std::size_t inside = 0;
    for (std::size_t k = max_rel.size() - 5000; k < max_rel.size(); ++k)
        if (max_rel[k] <= kPi / 8 + 0.05) ++inside;
    EXPECT_GE(inside, 4750u);
}

TEST(Cli, SeedOverride) {
    auto a = preset("simulate", "exp1");
    a.steps = 50;
    auto b = a;
    b.seed = 99;
    const auto ra = run(a), rb = run(b), rb2 = run(b);
    EXPECT_NE(ra.out, rb.out);
    EXPECT_EQ(rb.out, rb2.out);
}

TEST(Cli, MontecarloCsv) {
    auto o = preset("montecarlo", "exp6b");
    o.trials = 3;
    o.horizon = 200;
    const auto r = run(o);
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_EQ(r.out.rfind("trial,returned,return_time,occupancy\n", 0), 0u);
    EXPECT_NE(r.out.find("# trials=3"), std::string::npos);
    EXPECT_NE(r.out.find("horizon=200"), std::string::npos);
}

// Byte-level snapshots of 500-step trajectories for every preset.
TEST(Cli, PresetSnapshots) {
    const std::vector<std::pair<std::string, std::uint64_t>> expected{
        {"exp1", 0xf7a5d4500583949eULL},  {"exp2", 0x68aaf3b8c9e19e3eULL}, {"exp3", 0x6b11b3bd2f6f9687ULL},
        {"exp4a", 0x2335ea3c21c7ec18ULL}, {"exp4b", 0x1b1287a6838bf02fULL}, {"exp4c", 0x4c18ba5caa561648ULL},
        {"exp5", 0x027ed3aa9bdc90caULL},  {"exp6a", 0xf508f7d99a60f8f0ULL}, {"exp6b", 0x8e32a5047d706c08ULL},
    };
    for (const auto& [name, hash] : expected) {
        auto o = preset("simulate", name);
        o.steps = 500;
        const auto r = run(o);
        ASSERT_EQ(r.code, kExitOk) << r.err;
        EXPECT_EQ(fnv1a(r.out), hash) << name << " 0x" << std::hex << fnv1a(r.out);
    }
}
