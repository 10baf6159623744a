#include <doctest.h>

#include "cddr/problem.hpp"
#include "test_helpers.hpp"

using namespace cddr;
using namespace cddr::testing;

namespace {

// independent oracle: evaluate the additive sum by expanding windows by hand
Vec naive_policy_eval(const RuleCoefficients& rule, const std::vector<int>& traj) {
    const int t = static_cast<int>(traj.size());
    Vec out(static_cast<size_t>(rule.value_dim(t)), 0.0);
    for (int tau = 1; tau <= t; ++tau) {
        std::vector<int> window;
        for (int s = tau - rule.memory() + 1; s <= tau; ++s)
            window.push_back(s < 1 ? 1 : traj[static_cast<size_t>(s - 1)]);
        const FragmentSpace space = rule.fragment_space(tau);
        const auto c = rule.coeff(t, tau, space.index(window));
        for (size_t i = 0; i < out.size(); ++i) out[i] += c[i];
    }
    return out;
}

} // namespace

TEST_CASE("rhs evaluation sums the coefficients along the trajectory") {
    // all-zero tables evaluate to zero
    AdditiveRhs zero(2, 1, {1, 1}, {2, 2});
    CHECK(zero.evaluate(std::vector<int>{1, 2}) == Vec{0.0});

    // single stage, single term
    AdditiveRhs single(1, 1, {1}, {2});
    single.coeff(1, 1, 0)[0] = 2.0;
    single.coeff(1, 1, 1)[0] = 5.0;
    CHECK(single.evaluate(std::vector<int>{2}) == Vec{5.0});

    // two stages: beta^2_{1,(1)} = 1, beta^2_{2,(2)} = 3, xi = (1,2) -> 4
    AdditiveRhs two(2, 1, {1, 1}, {2, 2});
    two.coeff(2, 1, 0)[0] = 1.0;
    two.coeff(2, 2, 1)[0] = 3.0;
    CHECK(two.evaluate(std::vector<int>{1, 2}) == Vec{4.0});

    CHECK_THROWS_AS(two.evaluate(std::vector<int>{1, 1, 1}), Error);
}

TEST_CASE("widening preserves evaluation exactly") {
    SplitMix64 rng(11);
    RandomSpecOptions opt;
    opt.max_memory = 1;
    for (int trial = 0; trial < 20; ++trial) {
        const ProblemSpec spec = random_spec(rng, opt);
        const AdditiveRhs wide = spec.rhs.widened(3);
        CHECK(wide.memory() == 3);
        for (int k = 0; k < 100; ++k) {
            const int t = rng.uniform_int(1, spec.N);
            std::vector<int> traj(static_cast<size_t>(t));
            for (int s = 1; s <= t; ++s)
                traj[static_cast<size_t>(s - 1)] = rng.uniform_int(1, spec.d[static_cast<size_t>(s - 1)]);
            const Vec a = spec.rhs.evaluate(traj);
            const Vec b = wide.evaluate(traj);
            REQUIRE(a.size() == b.size());
            for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]); // bitwise equal
        }
    }
}

TEST_CASE("widening below the current depth is rejected; same depth is identity") {
    AdditiveRhs rhs(2, 2, {1, 1}, {2, 2});
    CHECK_THROWS_AS(rhs.widened(1), Error);
    const AdditiveRhs same = rhs.widened(2);
    CHECK(same.shape_equals(rhs));
}

TEST_CASE("explicit widening copies the trailing-window coefficient") {
    // mu 1 -> 2: beta'_{s,(a,b)} = beta_{s,(b)} for every a
    AdditiveRhs rhs(2, 1, {1, 1}, {2, 2});
    rhs.coeff(2, 2, 0)[0] = 10.0;
    rhs.coeff(2, 2, 1)[0] = 20.0;
    const AdditiveRhs wide = rhs.widened(2);
    const FragmentSpace space = wide.fragment_space(2);
    for (int a = 1; a <= 2; ++a)
        for (int b = 1; b <= 2; ++b) {
            const std::int64_t xi = space.index(std::vector<int>{a, b});
            CHECK(wide.coeff(2, 2, xi)[0] == (b == 1 ? 10.0 : 20.0));
        }
}

TEST_CASE("policy evaluation matches an independent naive expansion") {
    SplitMix64 rng(1234);
    RandomSpecOptions opt;
    opt.max_stages = 3;
    opt.max_memory = 2;
    for (int trial = 0; trial < 10; ++trial) {
        ProblemSpec spec = random_spec(rng, opt);
        spec.mu = 2;
        spec.rhs = AdditiveRhs(spec.N, 2, spec.m, spec.d);
        const RuleCoefficients rule = random_rule(spec, rng, 1.0);
        for (int k = 0; k < 50; ++k) {
            const int t = rng.uniform_int(1, spec.N);
            std::vector<int> traj(static_cast<size_t>(t));
            for (int s = 1; s <= t; ++s)
                traj[static_cast<size_t>(s - 1)] = rng.uniform_int(1, spec.d[static_cast<size_t>(s - 1)]);
            const Vec got = rule.evaluate(traj);
            const Vec want = naive_policy_eval(rule, traj);
            REQUIRE(got.size() == want.size());
            for (size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-14));
        }
    }
}

TEST_CASE("a rule widened by one depth evaluates identically everywhere") {
    SplitMix64 rng(77);
    RandomSpecOptions opt;
    opt.max_stages = 3;
    opt.max_cardinality = 2;
    for (int trial = 0; trial < 10; ++trial) {
        const ProblemSpec spec = random_spec(rng, opt);
        const RuleCoefficients rule = random_rule(spec, rng, 1.0);
        const RuleCoefficients wide = rule.widened(spec.mu + 1);
        std::vector<int> xi(static_cast<size_t>(spec.N), 1);
        do {
            for (int t = 1; t <= spec.N; ++t) {
                const std::span<const int> prefix(xi.data(), static_cast<size_t>(t));
                const Vec a = rule.evaluate(prefix);
                const Vec b = wide.evaluate(prefix);
                for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
            }
        } while (next_tuple(xi, spec.d));
    }
}

TEST_CASE("spec validation rejects malformed blocks") {
    ProblemSpec spec = forced_single_stage();
    spec.A.emplace(std::make_pair(1, 2), Mat(1, 1)); // tau > t
    CHECK_THROWS_AS(spec.validate(), Error);

    ProblemSpec bad_shape = forced_single_stage();
    bad_shape.A.clear();
    bad_shape.A.emplace(std::make_pair(1, 1), Mat(2, 1));
    CHECK_THROWS_AS(bad_shape.validate(), Error);

    ProblemSpec bad_prob = forced_single_stage();
    std::get<ExpectedObjective>(bad_prob.objective).prob[0] = {0.5, 0.6};
    CHECK_THROWS_AS(bad_prob.validate(), Error);
}
