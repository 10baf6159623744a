#include <doctest.h>

#include <cmath>

#include "cddr/policy.hpp"
#include "cddr/reformulate.hpp"
#include "test_helpers.hpp"

using namespace cddr;
using namespace cddr::testing;

TEST_CASE("zero policy on zero data reports zero cost and no violations") {
    ProblemSpec spec;
    spec.N = 2;
    spec.mu = 1;
    spec.n = {1, 1};
    spec.m = {1, 1};
    spec.d = {2, 2};
    spec.rhs = AdditiveRhs(2, 1, spec.m, spec.d);
    spec.objective = ExpectedObjective{{{0.0}, {0.0}}, {{0.5, 0.5}, {0.5, 0.5}}};
    const SimulationReport rep = simulate(spec, zero_rule(spec), exhaustive_scenarios(spec));
    CHECK(rep.scenario_count == 4);
    CHECK(rep.mean_cost == 0.0);
    CHECK(rep.max_violation == 0.0);
    CHECK(rep.feasibility_rate == 1.0);
}

TEST_CASE("forced instance simulates to mean cost 3/2 on the exhaustive set") {
    const ProblemSpec spec = forced_single_stage();
    RuleCoefficients rule = zero_rule(spec);
    rule.coeff(1, 1, 0)[0] = 1.0;
    rule.coeff(1, 1, 1)[0] = 2.0;
    const SimulationReport rep = simulate(spec, rule, exhaustive_scenarios(spec));
    CHECK(rep.mean_cost == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(rep.max_violation == 0.0);
    CHECK(expected_cost(spec, rule) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("closed form equals probability-weighted exhaustive simulation") {
    SplitMix64 rng(13579);
    for (int trial = 0; trial < 10; ++trial) {
        ProblemSpec spec = random_spec(rng);
        const RuleCoefficients rule = random_rule(spec, rng, 1.0);
        const double closed = expected_cost(spec, rule);
        const SimulationReport rep = simulate(spec, rule, exhaustive_scenarios(spec));
        CHECK(std::abs(closed - rep.mean_cost) <= 1e-12 * std::max(1.0, std::abs(closed)));
    }
}

TEST_CASE("LP objective value at the optimum equals the closed form of the rule") {
    SplitMix64 rng(86420);
    for (int trial = 0; trial < 5; ++trial) {
        const ProblemSpec spec = random_feasible_spec(rng, 3, 2, 2);
        const AssembledLp assembled = build_discrete_lp(spec);
        const SolveResult res = solve_reference(assembled.lp);
        REQUIRE(res.status == SolveStatus::Optimal);
        const RuleCoefficients rule = extract_rule(assembled, res.x);
        const double closed = expected_cost(spec, rule);
        CHECK(std::abs(closed - res.value) <= 1e-9 * std::max(1.0, std::abs(res.value)));
    }
}

TEST_CASE("optimal rules show zero violations on the exhaustive set") {
    SplitMix64 rng(11111);
    for (int trial = 0; trial < 5; ++trial) {
        const ProblemSpec spec = random_feasible_spec(rng, 3, 2, 1);
        const AssembledLp assembled = build_discrete_lp(spec);
        const SolveResult res = solve_reference(assembled.lp);
        REQUIRE(res.status == SolveStatus::Optimal);
        const SimulationReport rep =
            simulate(spec, extract_rule(assembled, res.x), exhaustive_scenarios(spec));
        CHECK(rep.max_violation == 0.0);
        CHECK(rep.feasibility_rate == 1.0);
    }
}

TEST_CASE("seeded sampling is reproducible and respects the marginals") {
    SplitMix64 rng(22);
    const ProblemSpec spec = random_spec(rng);
    const ScenarioSet a = sample_scenarios(spec, 500, 12345);
    const ScenarioSet b = sample_scenarios(spec, 500, 12345);
    CHECK(a.trajectories == b.trajectories);
    const ScenarioSet c = sample_scenarios(spec, 500, 54321);
    CHECK(a.trajectories != c.trajectories);
    for (const auto& traj : a.trajectories) {
        REQUIRE(traj.size() == static_cast<size_t>(spec.N));
        for (int t = 1; t <= spec.N; ++t) {
            CHECK(traj[static_cast<size_t>(t - 1)] >= 1);
            CHECK(traj[static_cast<size_t>(t - 1)] <= spec.d[static_cast<size_t>(t - 1)]);
        }
    }
}

TEST_CASE("violation metric is relative when the rhs is nonzero, absolute at zero") {
    // one stage, x >= 0 forced by rule value; constraint x <= b
    ProblemSpec spec;
    spec.N = 1;
    spec.mu = 1;
    spec.n = {1};
    spec.m = {2};
    spec.d = {1};
    Mat a(2, 1);
    a(0, 0) = 1.0;
    a(1, 0) = 1.0;
    spec.A[{1, 1}] = a;
    spec.rhs = AdditiveRhs(1, 1, spec.m, spec.d);
    spec.rhs.coeff(1, 1, 0)[0] = 2.0; // row 0: x <= 2
    spec.rhs.coeff(1, 1, 0)[1] = 0.0; // row 1: x <= 0
    spec.objective = ExpectedObjective{{{0.0}}, {{1.0}}};
    RuleCoefficients rule = zero_rule(spec);
    rule.coeff(1, 1, 0)[0] = 3.0;
    const SimulationReport rep = simulate(spec, rule, exhaustive_scenarios(spec));
    CHECK(rep.mean_violation[0][0] == doctest::Approx(0.5));  // (3-2)/|2|
    CHECK(rep.mean_violation[0][1] == doctest::Approx(3.0));  // absolute excess
    CHECK(rep.feasibility_rate == 0.0);
}

TEST_CASE("per-stage decision traces are recorded when requested") {
    const ProblemSpec spec = forced_single_stage();
    RuleCoefficients rule = zero_rule(spec);
    rule.coeff(1, 1, 0)[0] = 1.0;
    rule.coeff(1, 1, 1)[0] = 2.0;
    SimulationOptions opt;
    opt.keep_traces = true;
    const SimulationReport rep = simulate(spec, rule, exhaustive_scenarios(spec), opt);
    REQUIRE(rep.traces.has_value());
    REQUIRE(rep.traces->size() == 2);
    CHECK((*rep.traces)[0][0] == Vec{1.0});
    CHECK((*rep.traces)[1][0] == Vec{2.0});
}
