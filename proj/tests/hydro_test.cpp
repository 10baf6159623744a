#include <doctest.h>

#include <cmath>

#include "cddr/hydro.hpp"
#include "cddr/policy.hpp"
#include "cddr/reformulate.hpp"
#include "cddr/rng.hpp"

using namespace cddr;

namespace {

// independent oracle: run the recursion itself on a noise sequence
std::vector<Vec> recursion_inflows(const ParModel& m, const std::vector<Vec>& zeta) {
    std::vector<Vec> eta(static_cast<size_t>(m.N - m.first_index + 1));
    auto eta_at = [&](int s) -> Vec& { return eta[static_cast<size_t>(s - m.first_index)]; };
    for (int s = m.first_index; s <= 1; ++s) {
        Vec e = m.history_at(s);
        const Vec& th = m.theta_at(s);
        for (int k = 0; k < m.K; ++k) e[static_cast<size_t>(k)] -= th[static_cast<size_t>(k)];
        eta_at(s) = std::move(e);
    }
    for (int t = 2; t <= m.N; ++t) {
        Vec e(static_cast<size_t>(m.K), 0.0);
        for (int j = 1; j <= m.lag_at(t); ++j) {
            const Vec be = matvec(m.coeff_at(t, j), eta_at(t - j));
            for (int k = 0; k < m.K; ++k) e[static_cast<size_t>(k)] += be[static_cast<size_t>(k)];
        }
        const Vec cz = matvec(m.noise_gain_at(t), zeta[static_cast<size_t>(t - 2)]);
        for (int k = 0; k < m.K; ++k) e[static_cast<size_t>(k)] += cz[static_cast<size_t>(k)];
        eta_at(t) = std::move(e);
    }
    std::vector<Vec> inflow(static_cast<size_t>(m.N));
    for (int t = 1; t <= m.N; ++t) {
        Vec v = eta_at(t);
        const Vec& th = m.theta_at(t);
        for (int k = 0; k < m.K; ++k) v[static_cast<size_t>(k)] += th[static_cast<size_t>(k)];
        inflow[static_cast<size_t>(t - 1)] = std::move(v);
    }
    return inflow;
}

} // namespace

TEST_CASE("memoryless model unrolls to identity gains and the means") {
    ParModel m;
    m.K = 2;
    m.N = 3;
    m.first_index = 1;
    for (int s = 1; s <= 3; ++s) m.theta.push_back(Vec{1.0, 2.0});
    m.history.push_back(Vec{1.5, 2.5});
    for (int t = 2; t <= 3; ++t) {
        m.lag.push_back(0);
        m.coeff.push_back({});
        m.noise_gain.push_back(Mat::identity(2));
        m.support.push_back({Vec{0.0, 0.0}, Vec{0.1, -0.1}});
        m.prob.push_back(Vec{0.5, 0.5});
    }
    const UnrolledInflows u = unroll_par(m);
    for (int t = 2; t <= 3; ++t) {
        CHECK(u.intercept[static_cast<size_t>(t - 1)] == Vec{1.0, 2.0});
        const Mat& own = u.gain_at(t, t);
        CHECK(own(0, 0) == 1.0);
        CHECK(own(1, 1) == 1.0);
        CHECK(own(0, 1) == 0.0);
        if (t == 3) {
            const Mat& cross = u.gain_at(3, 2);
            for (double v : cross.data) CHECK(v == 0.0);
        }
    }
}

TEST_CASE("single-lag scalar model unrolls by hand") {
    // K=1, B = 0.5, C = 1, eta_1 = I_1 - theta_1 deterministic
    ParModel m;
    m.K = 1;
    m.N = 3;
    m.first_index = 1;
    for (int s = 1; s <= 3; ++s) m.theta.push_back(Vec{2.0});
    m.history.push_back(Vec{2.8}); // eta_1 = 0.8
    for (int t = 2; t <= 3; ++t) {
        m.lag.push_back(1);
        Mat b(1, 1);
        b(0, 0) = 0.5;
        m.coeff.push_back({b});
        m.noise_gain.push_back(Mat::identity(1));
        m.support.push_back({Vec{-0.1}, Vec{0.1}});
        m.prob.push_back(Vec{0.5, 0.5});
    }
    const UnrolledInflows u = unroll_par(m);
    CHECK(u.gain_at(3, 3)(0, 0) == doctest::Approx(1.0));
    CHECK(u.gain_at(3, 2)(0, 0) == doctest::Approx(0.5));
    // intercept nu_3 = theta_3 + 0.25 * eta_1
    CHECK(u.intercept[2][0] == doctest::Approx(2.0 + 0.25 * 0.8).epsilon(1e-14));
}

TEST_CASE("affine form reproduces the recursion on random noise sequences") {
    SplitMix64 rng(909);
    const ParModel m = default_test_par_model(2, 6, 3, 11);
    const UnrolledInflows u = unroll_par(m);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Vec> zeta;
        for (int t = 2; t <= m.N; ++t) {
            Vec z(2);
            for (double& v : z) v = rng.uniform(-0.3, 0.3);
            zeta.push_back(std::move(z));
        }
        const std::vector<Vec> direct = recursion_inflows(m, zeta);
        for (int t = 1; t <= m.N; ++t) {
            const Vec affine = u.inflow(t, zeta);
            for (int k = 0; k < m.K; ++k)
                CHECK(affine[static_cast<size_t>(k)] ==
                      doctest::Approx(direct[static_cast<size_t>(t - 1)][static_cast<size_t>(k)])
                          .epsilon(1e-12));
        }
    }
}

TEST_CASE("missing history for the requested lags is rejected") {
    ParModel m = default_test_par_model(1, 3, 2);
    m.first_index = 1;          // history now only covers stage 1
    m.theta.erase(m.theta.begin(), m.theta.begin() + 2);
    m.history.erase(m.history.begin(), m.history.begin() + 2);
    // lag 2 at stage 2 reaches eta_0 which no longer exists
    CHECK_THROWS_AS(unroll_par(m), Error);
}

TEST_CASE("generated instance has the documented shape") {
    const int K = 2, N = 4, d = 3;
    const HydroParams params = default_test_params(K, N);
    const ParModel model = default_test_par_model(K, N, d);
    const ProblemSpec spec = generate(params, model);

    CHECK(spec.N == N);
    CHECK(spec.mu == 1);
    for (int t = 1; t <= N; ++t) {
        CHECK(spec.n[static_cast<size_t>(t - 1)] == 4 * K);
        CHECK(spec.m[static_cast<size_t>(t - 1)] == 9 * K);
        CHECK(spec.d[static_cast<size_t>(t - 1)] == (t == 1 ? 1 : d));
        for (int tau = 1; tau + 1 < t; ++tau) CHECK(spec.a_block(t, tau) == nullptr);
        if (t >= 2) CHECK(spec.a_block(t, t - 1) != nullptr);
    }
    // stage cost is [0; 0; p; c]
    const auto& obj = std::get<ExpectedObjective>(spec.objective);
    for (int t = 1; t <= N; ++t) {
        const Vec& f = obj.cost[static_cast<size_t>(t - 1)];
        for (int k = 0; k < K; ++k) {
            CHECK(f[static_cast<size_t>(k)] == 0.0);          // h
            CHECK(f[static_cast<size_t>(K + k)] == 0.0);      // v
            CHECK(f[static_cast<size_t>(2 * K + k)] == 10.0); // r
            CHECK(f[static_cast<size_t>(3 * K + k)] ==
                  doctest::Approx(1.0 + 0.1 * k)); // w
        }
    }
}

TEST_CASE("relaxed instance widens the decision and row blocks") {
    const HydroParams params = default_test_params(2, 3, true);
    const ParModel model = default_test_par_model(2, 3, 2);
    const ProblemSpec spec = generate(params, model);
    CHECK(spec.n[0] == 5 * 2);
    CHECK(spec.m[0] == 10 * 2);
    const auto& obj = std::get<ExpectedObjective>(spec.objective);
    CHECK(obj.cost[0][static_cast<size_t>(4 * 2)] == 100.0); // alpha penalty
}

TEST_CASE("additive rhs equals the direct affine evaluation on every trajectory") {
    const int K = 1, N = 3, d = 2;
    const HydroParams params = default_test_params(K, N);
    const ParModel model = default_test_par_model(K, N, d, 17);
    const ProblemSpec spec = generate(params, model);
    const UnrolledInflows unrolled = unroll_par(model);

    std::vector<int> xi(static_cast<size_t>(N), 1);
    do {
        // build the noise sequence picked by the trajectory
        std::vector<Vec> zeta;
        for (int t = 2; t <= N; ++t)
            zeta.push_back(model.support_point(t, xi[static_cast<size_t>(t - 1)] - 1));
        for (int t = 1; t <= N; ++t) {
            const Vec b =
                spec.rhs.evaluate(std::span<const int>(xi.data(), static_cast<size_t>(t)));
            const Vec inflow = unrolled.inflow(t, zeta);
            const HydroStage& st = params.stage[static_cast<size_t>(t - 1)];
            for (int k = 0; k < K; ++k) {
                const double g = st.g_diag[static_cast<size_t>(k)];
                double wb = g * inflow[static_cast<size_t>(k)];
                if (t == 1) wb += params.v0[static_cast<size_t>(k)];
                CHECK(b[static_cast<size_t>(k)] == doctest::Approx(wb).epsilon(1e-13));
                const double dem = -st.demand[static_cast<size_t>(k)] +
                                   (1.0 - g) * inflow[static_cast<size_t>(k)];
                CHECK(b[static_cast<size_t>(K + k)] == doctest::Approx(dem).epsilon(1e-13));
                double v_lo = st.v_min[static_cast<size_t>(k)];
                if (t == N)
                    v_lo = std::max(v_lo,
                                    params.final_level_factor * params.v0[static_cast<size_t>(k)]);
                CHECK(b[static_cast<size_t>(3 * K + k)] == doctest::Approx(-v_lo));
            }
        }
    } while (next_tuple(xi, spec.d));
}

TEST_CASE("small default instance solves and simulates cleanly") {
    const HydroParams params = default_test_params(1, 3);
    const ParModel model = default_test_par_model(1, 3, 2, 3);
    const ProblemSpec spec = generate(params, model);
    const AssembledLp assembled = build_discrete_lp(spec);
    const SolveResult res = solve_reference(assembled.lp);
    REQUIRE(res.status == SolveStatus::Optimal);
    const SimulationReport rep =
        simulate(spec, extract_rule(assembled, res.x), exhaustive_scenarios(spec));
    CHECK(rep.max_violation == 0.0);
    CHECK(rep.feasibility_rate == 1.0);
    CHECK(rep.mean_cost == doctest::Approx(res.value).epsilon(1e-9));
}

TEST_CASE("four regions over a year keep the documented block dimensions") {
    const HydroParams params = default_test_params(4, 12);
    const ParModel model = default_test_par_model(4, 12, 10, 99);
    const ProblemSpec spec = generate(params, model);
    for (int t = 1; t <= 12; ++t) {
        CHECK(spec.n[static_cast<size_t>(t - 1)] == 16);
        CHECK(spec.m[static_cast<size_t>(t - 1)] == 36);
        CHECK(spec.d[static_cast<size_t>(t - 1)] == (t == 1 ? 1 : 10));
    }
}
