#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "stochsync/dynamics.hpp"

using namespace stochsync;

namespace {

Scenario pair_scenario(double p, double dw, double tau) {
    Scenario sc;
    sc.graph = Graph::from_one_based(2, {{1, 2}});
    sc.coupling = CouplingSpec::kuramoto();
    sc.kappa = 1.0;
    sc.tau = tau;
    sc.model = BernoulliModel{p, {0.0, dw}};
    return sc;
}

}  // namespace

TEST(Angles, WrapRange) {
    EXPECT_DOUBLE_EQ(wrap_angle(kPi), kPi);
    EXPECT_DOUBLE_EQ(wrap_angle(-kPi), kPi);
    EXPECT_NEAR(wrap_angle(3.0 * kPi / 2.0), -kPi / 2.0, 1e-15);
    EXPECT_NEAR(wrap_angle(7.0 * kTwoPi + 0.25), 0.25, 1e-12);
    EXPECT_THROW(wrap_angle(NAN), std::invalid_argument);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-100.0, 100.0);
    for (int i = 0; i < 10000; ++i) {
        const double w = wrap_angle(u(rng));
        EXPECT_GT(w, -kPi);
        EXPECT_LE(w, kPi);
    }
}

TEST(Angles, GeodesicDistance) {
    EXPECT_NEAR(geodesic_distance(0.1, kTwoPi - 0.1), 0.2, 1e-12);
    EXPECT_NEAR(geodesic_distance(0.0, kPi), kPi, 1e-15);
}

TEST(Dynamics, RelativePhasesAreHeadMinusTail) {
    const Graph g = Graph::from_one_based(3, {{1, 2}, {3, 2}});
    const auto rel = relative_phases(g, std::vector<double>{0.0, 1.0, 3.0});
    EXPECT_DOUBLE_EQ(rel[0], 1.0);
    EXPECT_DOUBLE_EQ(rel[1], -2.0);
    EXPECT_THROW(relative_phases(g, std::vector<double>{0.0}), std::invalid_argument);
}

TEST(Dynamics, ScenarioValidation) {
    Scenario sc = pair_scenario(0.5, 1.0, 0.01);
    EXPECT_NO_THROW(sc.validate());
    sc.kappa = -1.0;
    EXPECT_THROW(sc.validate(), std::invalid_argument);
    sc = pair_scenario(0.5, 1.0, 0.0);
    EXPECT_THROW(sc.validate(), std::invalid_argument);
    sc = pair_scenario(0.5, 1.0, 0.01);
    sc.initial_phases = {0.0, 1.0, 2.0};
    EXPECT_THROW(sc.validate(), std::invalid_argument);
}

TEST(Dynamics, HandComputedStep) {
    const Graph g = Graph::from_one_based(2, {{1, 2}});
    const PhaseState s{{0.0, 0.5}, 0};
    const StepDraws d{{2.0}, {1.0, 3.0}};
    const auto next = apply_step(g, CouplingSpec::kuramoto(), 1.5, 0.1, s, d);
    EXPECT_NEAR(next.phases[0], 0.1 * 1.0 - 0.15 * 2.0 * std::sin(-0.5), 1e-15);
    EXPECT_NEAR(next.phases[1], 0.5 + 0.1 * 3.0 - 0.15 * 2.0 * std::sin(0.5), 1e-15);
    EXPECT_EQ(next.step, 1u);
}

TEST(Dynamics, NodeAndEdgeFormsAgree) {
    std::mt19937_64 rng(99);
    for (std::uint64_t trial = 0; trial < 50; ++trial) {
        const Scenario sc = oracle::random_five_node_scenario(rng);
        EXPECT_LE(oracle::step_form_discrepancy(sc, trial, 50), 1e-12);
    }
}

TEST(Dynamics, SteppersCheckModelType) {
    const Scenario sc = pair_scenario(0.5, 1.0, 0.01);
    Stream s(1);
    EXPECT_THROW(step_uncertain(sc, initial_state(sc), s), std::invalid_argument);
    EXPECT_NO_THROW(step_random(sc, initial_state(sc), s));
}

TEST(Dynamics, DecoupledPairDriftsAtRelativeFrequency) {
    Scenario sc = pair_scenario(0.0, 1.0, 0.01);
    sc.initial_phases = {0.0, 0.0};
    const auto traj = simulate(sc, 0, 100);
    EXPECT_NEAR(traj.relative[100][0], 1.0, 1e-12);
}

TEST(Dynamics, StronglyCoupledPairContracts) {
    Scenario sc = pair_scenario(1.0, 0.0, 0.1);
    sc.kappa = 2.0;
    sc.initial_phases = {0.0, 2.0};
    const auto traj = simulate(sc, 0, 200);
    EXPECT_LT(traj.max_relative.back(), 1e-8);
    for (std::size_t k = 1; k < traj.size(); ++k) EXPECT_LE(traj.max_relative[k], traj.max_relative[k - 1] + 1e-15);
}

TEST(Dynamics, SimulationIsReproducible) {
    std::mt19937_64 rng(3);
    Scenario sc = oracle::random_five_node_scenario(rng);
    sc.seed.master_seed = 17;
    const auto a = simulate(sc, 4, 300);
    const auto b = simulate(sc, 4, 300);
    EXPECT_EQ(a.states, b.states);
    const auto c = simulate(sc, 5, 300);
    EXPECT_NE(a.states.back(), c.states.back());
}

TEST(Dynamics, UniformInitialStateFromSeed) {
    Scenario sc = pair_scenario(0.5, 1.0, 0.01);
    const auto s0 = initial_state(sc, 0);
    const auto s1 = initial_state(sc, 1);
    EXPECT_NE(s0.phases, s1.phases);
    EXPECT_EQ(s0.phases, initial_state(sc, 0).phases);
    for (double x : s0.phases) {
        EXPECT_GT(x, -kPi);
        EXPECT_LE(x, kPi);
    }
}

TEST(Dynamics, TrajectoryCsvLayout) {
    Scenario sc = pair_scenario(1.0, 1.0, 0.01);
    sc.initial_phases = {0.0, 0.5};
    const auto traj = simulate(sc, 0, 2);
    std::ostringstream os;
    write_trajectory_csv(os, sc.graph, traj);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "step,theta_1,theta_2,rel_1_2,max_rel");
    std::getline(in, line);
    EXPECT_EQ(line, "0,0,0.5,0.5,0.5");
    int rows = 1;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 3);
}
