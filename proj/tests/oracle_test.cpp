#include <doctest.h>

#include "cddr/oracle.hpp"
#include "cddr/policy.hpp"
#include "cddr/reformulate.hpp"
#include "test_helpers.hpp"

using namespace cddr;
using namespace cddr::testing;

TEST_CASE("all-zero data gives a zero maximum") {
    ProblemSpec spec;
    spec.N = 2;
    spec.mu = 1;
    spec.n = {1, 1};
    spec.m = {1, 1};
    spec.d = {2, 2};
    spec.rhs = AdditiveRhs(2, 1, spec.m, spec.d);
    spec.objective = ExpectedObjective{{{0.0}, {0.0}}, {{0.5, 0.5}, {0.5, 0.5}}};
    const RuleCoefficients rule = zero_rule(spec);
    CHECK(brute_force_max(spec, rule, 1) == Vec{0.0});
    CHECK(brute_force_max(spec, rule, 2) == Vec{0.0});
}

TEST_CASE("hand-built summand tables produce the enumerated maximum") {
    // no A blocks: y^2_{s,xi} = -beta^2_{s,xi}; pick beta so that
    // y^2_{1,.} = (1, -1) and y^2_{2,.} = (3, 0); max over 4 paths = 4
    ProblemSpec spec;
    spec.N = 2;
    spec.mu = 1;
    spec.n = {1, 1};
    spec.m = {1, 1};
    spec.d = {2, 2};
    spec.rhs = AdditiveRhs(2, 1, spec.m, spec.d);
    spec.rhs.coeff(2, 1, 0)[0] = -1.0;
    spec.rhs.coeff(2, 1, 1)[0] = 1.0;
    spec.rhs.coeff(2, 2, 0)[0] = -3.0;
    spec.rhs.coeff(2, 2, 1)[0] = 0.0;
    spec.objective = ExpectedObjective{{{0.0}, {0.0}}, {{0.5, 0.5}, {0.5, 0.5}}};
    const Vec worst = brute_force_max(spec, zero_rule(spec), 2);
    CHECK(worst == Vec{4.0});
}

TEST_CASE("guard rejects oversized enumerations") {
    ProblemSpec spec;
    spec.N = 8;
    spec.mu = 1;
    spec.n.assign(8, 1);
    spec.m.assign(8, 1);
    spec.d.assign(8, 8); // 8^8 = 16.7M > guard
    spec.rhs = AdditiveRhs(8, 1, spec.m, spec.d);
    ExpectedObjective obj;
    for (int t = 0; t < 8; ++t) {
        obj.cost.push_back({0.0});
        obj.prob.push_back(Vec(8, 0.125));
    }
    spec.objective = std::move(obj);
    CHECK_THROWS_AS(brute_force_max(spec, zero_rule(spec), 8), Error);
}

TEST_CASE("single-stage tree decomposes into weighted branch problems") {
    const ProblemSpec spec = forced_single_stage();
    const ScenarioTreeLp tree = scenario_tree_lp(spec);
    CHECK(tree.nodes.size() == 2); // one node per branch
    const SolveResult res = solve_reference(tree.lp);
    REQUIRE(res.status == SolveStatus::Optimal);
    CHECK(res.value == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("tree optimum lower-bounds the reformulated optimum") {
    SplitMix64 rng(2718);
    for (int trial = 0; trial < 5; ++trial) {
        const ProblemSpec spec = random_feasible_spec(rng, 3, 2, 1);
        const SolveResult tree_res = solve_reference(scenario_tree_lp(spec).lp);
        const SolveResult cddr_res = solve_reference(build_discrete_lp(spec).lp);
        REQUIRE(tree_res.status == SolveStatus::Optimal);
        REQUIRE(cddr_res.status == SolveStatus::Optimal);
        CHECK(tree_res.value <= cddr_res.value + 1e-7);
    }
}

TEST_CASE("tree nodes are enumerated depth-first lexicographically") {
    ProblemSpec spec;
    spec.N = 2;
    spec.mu = 1;
    spec.n = {1, 1};
    spec.m = {1, 1};
    spec.d = {2, 2};
    spec.rhs = AdditiveRhs(2, 1, spec.m, spec.d);
    spec.objective = ExpectedObjective{{{0.0}, {0.0}}, {{0.5, 0.5}, {0.5, 0.5}}};
    const ScenarioTreeLp tree = scenario_tree_lp(spec);
    REQUIRE(tree.nodes.size() == 6);
    CHECK(tree.nodes[0].second == std::vector<int>{1});
    CHECK(tree.nodes[1].second == std::vector<int>{1, 1});
    CHECK(tree.nodes[2].second == std::vector<int>{1, 2});
    CHECK(tree.nodes[3].second == std::vector<int>{2});
    CHECK(tree.nodes[4].second == std::vector<int>{2, 1});
    CHECK(tree.nodes[5].second == std::vector<int>{2, 2});
}

TEST_CASE("tree construction refuses oversized prefix trees") {
    ProblemSpec spec;
    spec.N = 7;
    spec.mu = 1;
    spec.n.assign(7, 1);
    spec.m.assign(7, 1);
    spec.d.assign(7, 7); // sum_t 7^t well past the node guard
    spec.rhs = AdditiveRhs(7, 1, spec.m, spec.d);
    ExpectedObjective obj;
    for (int t = 0; t < 7; ++t) {
        obj.cost.push_back({0.0});
        obj.prob.push_back(Vec(7, 1.0 / 7));
    }
    spec.objective = std::move(obj);
    CHECK_THROWS_AS(scenario_tree_lp(spec), Error);
}
