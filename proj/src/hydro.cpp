#include "cddr/hydro.hpp"

#include <algorithm>
#include <cmath>

#include "cddr/rng.hpp"

namespace cddr {

namespace {

void require_vec(const Vec& v, int K, const char* what, int t) {
    require(static_cast<int>(v.size()) == K,
            std::string(what) + " has wrong dimension at stage " + std::to_string(t));
}

Vec matvec_k(const Mat& a, const Vec& x) { return matvec(a, x); }

} // namespace

void HydroParams::validate() const {
    require(K >= 1, "hydro: region count must be >= 1");
    require(N >= 1, "hydro: horizon must be >= 1");
    require(static_cast<int>(v0.size()) == K, "hydro: v0 dimension mismatch");
    require(final_level_factor >= 0.0, "hydro: negative final level factor");
    require(static_cast<int>(stage.size()) == N, "hydro: stage table must cover the horizon");
    for (int t = 1; t <= N; ++t) {
        const HydroStage& s = stage[static_cast<size_t>(t - 1)];
        require_vec(s.demand, K, "demand", t);
        require_vec(s.thermal_cost, K, "thermal cost", t);
        require_vec(s.deficit_penalty, K, "deficit penalty", t);
        require_vec(s.g_diag, K, "run-of-river split", t);
        require_vec(s.v_min, K, "reservoir lower bound", t);
        require_vec(s.v_max, K, "reservoir upper bound", t);
        require_vec(s.h_max, K, "hydro capacity", t);
        require_vec(s.w_max, K, "thermal capacity", t);
        if (rcr_relaxation) require_vec(s.rcr_penalty, K, "relaxation penalty", t);
        for (int k = 0; k < K; ++k) {
            require(s.g_diag[static_cast<size_t>(k)] >= 0.0 && s.g_diag[static_cast<size_t>(k)] <= 1.0,
                    "hydro: run-of-river share outside [0, 1] at stage " + std::to_string(t));
            require(s.v_min[static_cast<size_t>(k)] <= s.v_max[static_cast<size_t>(k)],
                    "hydro: empty reservoir interval at stage " + std::to_string(t));
            require(s.v_min[static_cast<size_t>(k)] >= 0.0 && s.h_max[static_cast<size_t>(k)] >= 0.0 &&
                        s.w_max[static_cast<size_t>(k)] >= 0.0,
                    "hydro: negative bound at stage " + std::to_string(t));
        }
    }
}

void ParModel::validate() const {
    require(K >= 1 && N >= 1, "par model: bad dimensions");
    require(first_index <= 1, "par model: first index must be <= 1");
    require(static_cast<int>(theta.size()) == N - first_index + 1,
            "par model: theta table must cover first_index..N");
    require(static_cast<int>(history.size()) == 1 - first_index + 1,
            "par model: history must cover first_index..1");
    for (const Vec& v : theta) require(static_cast<int>(v.size()) == K, "par model: theta dimension");
    for (const Vec& v : history) require(static_cast<int>(v.size()) == K, "par model: history dimension");
    require(static_cast<int>(lag.size()) == std::max(0, N - 1), "par model: lag table size");
    require(static_cast<int>(coeff.size()) == std::max(0, N - 1), "par model: coefficient table size");
    require(static_cast<int>(noise_gain.size()) == std::max(0, N - 1), "par model: noise gain table size");
    require(static_cast<int>(support.size()) == std::max(0, N - 1), "par model: support table size");
    require(static_cast<int>(prob.size()) == std::max(0, N - 1), "par model: probability table size");
    for (int t = 2; t <= N; ++t) {
        const int l = lag_at(t);
        require(l >= 0, "par model: negative lag");
        require(t - l >= first_index,
                "par model: lag at stage " + std::to_string(t) + " reaches before the history");
        require(static_cast<int>(coeff[static_cast<size_t>(t - 2)].size()) == l,
                "par model: coefficient count != lag at stage " + std::to_string(t));
        for (const Mat& b : coeff[static_cast<size_t>(t - 2)])
            require(b.rows == K && b.cols == K, "par model: coefficient matrix shape");
        require(noise_gain_at(t).rows == K && noise_gain_at(t).cols == K,
                "par model: noise gain shape");
        const auto& pts = support[static_cast<size_t>(t - 2)];
        require(!pts.empty(), "par model: empty noise support at stage " + std::to_string(t));
        for (const Vec& p : pts) require(static_cast<int>(p.size()) == K, "par model: support point dimension");
        const Vec& pr = prob[static_cast<size_t>(t - 2)];
        require(pr.size() == pts.size(), "par model: probability count mismatch");
        double sum = 0.0;
        for (double p : pr) {
            require(p >= 0.0, "par model: negative probability");
            sum += p;
        }
        require(std::abs(sum - 1.0) <= 1e-12, "par model: probabilities do not sum to 1");
    }
}

Vec UnrolledInflows::inflow(int t, const std::vector<Vec>& zeta) const {
    require(t >= 1 && t <= N, "inflow: stage out of range");
    Vec out = intercept.at(static_cast<size_t>(t - 1));
    for (int s = 2; s <= t; ++s) {
        const Vec g = matvec_k(gain_at(t, s), zeta.at(static_cast<size_t>(s - 2)));
        for (int k = 0; k < K; ++k) out[static_cast<size_t>(k)] += g[static_cast<size_t>(k)];
    }
    return out;
}

UnrolledInflows unroll_par(const ParModel& model) {
    model.validate();
    const int K = model.K, N = model.N, first = model.first_index;

    // deterministic part of eta per stage first..N and noise gains per stage
    const int span = N - first + 1;
    std::vector<Vec> eta_det(static_cast<size_t>(span), Vec(static_cast<size_t>(K), 0.0));
    // eta_gain[idx][s-2]: sensitivity of eta_{first+idx} to zeta_s
    std::vector<std::vector<Mat>> eta_gain(static_cast<size_t>(span));

    auto det_at = [&](int s) -> Vec& { return eta_det[static_cast<size_t>(s - first)]; };
    auto gains_at = [&](int s) -> std::vector<Mat>& { return eta_gain[static_cast<size_t>(s - first)]; };

    for (int s = first; s <= 1; ++s) {
        Vec eta = model.history_at(s);
        const Vec& th = model.theta_at(s);
        for (int k = 0; k < K; ++k) eta[static_cast<size_t>(k)] -= th[static_cast<size_t>(k)];
        det_at(s) = std::move(eta);
    }
    for (int t = 2; t <= N; ++t) {
        Vec det(static_cast<size_t>(K), 0.0);
        std::vector<Mat> gains(static_cast<size_t>(std::max(0, t - 1))); // for zeta_2..zeta_t
        for (auto& g : gains) g = Mat(K, K);
        for (int j = 1; j <= model.lag_at(t); ++j) {
            const Mat& b = model.coeff_at(t, j);
            const Vec bd = matvec_k(b, det_at(t - j));
            for (int k = 0; k < K; ++k) det[static_cast<size_t>(k)] += bd[static_cast<size_t>(k)];
            if (t - j >= 2) {
                const auto& prev = gains_at(t - j);
                for (int s = 2; s <= t - j; ++s) {
                    const Mat& g = prev[static_cast<size_t>(s - 2)];
                    Mat& dst = gains[static_cast<size_t>(s - 2)];
                    for (int r = 0; r < K; ++r)
                        for (int c = 0; c < K; ++c) {
                            double acc = 0.0;
                            for (int q = 0; q < K; ++q) acc += b(r, q) * g(q, c);
                            dst(r, c) += acc;
                        }
                }
            }
        }
        Mat& own = gains[static_cast<size_t>(t - 2)];
        const Mat& c_t = model.noise_gain_at(t);
        for (int r = 0; r < K; ++r)
            for (int c = 0; c < K; ++c) own(r, c) += c_t(r, c);
        det_at(t) = std::move(det);
        gains_at(t) = std::move(gains);
    }

    UnrolledInflows out;
    out.K = K;
    out.N = N;
    out.intercept.resize(static_cast<size_t>(N));
    out.gain.resize(static_cast<size_t>(N));
    for (int t = 1; t <= N; ++t) {
        Vec nu = det_at(t);
        const Vec& th = model.theta_at(t);
        for (int k = 0; k < K; ++k) nu[static_cast<size_t>(k)] += th[static_cast<size_t>(k)];
        out.intercept[static_cast<size_t>(t - 1)] = std::move(nu);
        if (t >= 2) {
            auto& g = gains_at(t);
            out.gain[static_cast<size_t>(t - 1)].assign(g.begin(), g.begin() + (t - 1));
        }
    }
    return out;
}

ProblemSpec generate(const HydroParams& params, const ParModel& model) {
    params.validate();
    model.validate();
    require(params.K == model.K && params.N == model.N,
            "hydro: parameter and inflow model dimensions differ");
    const int K = params.K, N = params.N;
    const bool rcr = params.rcr_relaxation;
    const int n_t = rcr ? 5 * K : 4 * K;
    const int m_t = rcr ? 10 * K : 9 * K;
    const int H = 0, V = K, R = 2 * K, W = 3 * K, ALPHA = 4 * K; // decision block offsets

    const UnrolledInflows unrolled = unroll_par(model);

    ProblemSpec spec;
    spec.N = N;
    spec.mu = 1;
    spec.n.assign(static_cast<size_t>(N), n_t);
    spec.m.assign(static_cast<size_t>(N), m_t);
    spec.d.resize(static_cast<size_t>(N));
    for (int t = 1; t <= N; ++t) spec.d[static_cast<size_t>(t - 1)] = model.support_size(t);

    // A^{t,t}: rows ordered water balance, demand, v upper, v lower, h upper,
    // h lower, w upper, w lower, r nonneg (, alpha nonneg)
    for (int t = 1; t <= N; ++t) {
        Mat a(m_t, n_t);
        for (int k = 0; k < K; ++k) {
            a(0 * K + k, H + k) = 1.0;  // water balance
            a(0 * K + k, V + k) = 1.0;
            a(1 * K + k, H + k) = -1.0; // demand
            a(1 * K + k, R + k) = -1.0;
            a(1 * K + k, W + k) = -1.0;
            a(2 * K + k, V + k) = 1.0;  // v upper
            a(3 * K + k, V + k) = -1.0; // v lower
            a(4 * K + k, H + k) = 1.0;  // h upper
            a(5 * K + k, H + k) = -1.0; // h lower
            a(6 * K + k, W + k) = 1.0;  // w upper
            a(7 * K + k, W + k) = -1.0; // w lower
            a(8 * K + k, R + k) = -1.0; // r nonneg
            if (rcr) {
                a(3 * K + k, ALPHA + k) = -1.0; // relaxed v lower
                a(9 * K + k, ALPHA + k) = -1.0; // alpha nonneg
            }
        }
        spec.A.emplace(std::make_pair(t, t), std::move(a));
        if (t >= 2) {
            Mat prev(m_t, n_t);
            for (int k = 0; k < K; ++k) prev(0 * K + k, V + k) = -1.0; // -v_{t-1}
            spec.A.emplace(std::make_pair(t, t - 1), std::move(prev));
        }
    }

    // additive memory-1 right-hand side
    spec.rhs = AdditiveRhs(N, 1, spec.m, spec.d);
    for (int t = 1; t <= N; ++t) {
        const HydroStage& st = params.stage[static_cast<size_t>(t - 1)];
        // intercepts at anchor s = 1 (single fragment, d_1 = 1)
        {
            auto beta = spec.rhs.coeff(t, 1, 0);
            const Vec& nu = unrolled.intercept[static_cast<size_t>(t - 1)];
            for (int k = 0; k < K; ++k) {
                const double g = st.g_diag[static_cast<size_t>(k)];
                beta[static_cast<size_t>(0 * K + k)] = g * nu[static_cast<size_t>(k)];
                beta[static_cast<size_t>(1 * K + k)] =
                    -st.demand[static_cast<size_t>(k)] + (1.0 - g) * nu[static_cast<size_t>(k)];
                beta[static_cast<size_t>(2 * K + k)] = st.v_max[static_cast<size_t>(k)];
                double v_lo = st.v_min[static_cast<size_t>(k)];
                if (t == N)
                    v_lo = std::max(v_lo, params.final_level_factor * params.v0[static_cast<size_t>(k)]);
                beta[static_cast<size_t>(3 * K + k)] = -v_lo;
                beta[static_cast<size_t>(4 * K + k)] = st.h_max[static_cast<size_t>(k)];
                beta[static_cast<size_t>(5 * K + k)] = 0.0;
                beta[static_cast<size_t>(6 * K + k)] = st.w_max[static_cast<size_t>(k)];
                beta[static_cast<size_t>(7 * K + k)] = 0.0;
                beta[static_cast<size_t>(8 * K + k)] = 0.0;
                if (rcr) beta[static_cast<size_t>(9 * K + k)] = 0.0;
                if (t == 1) beta[static_cast<size_t>(0 * K + k)] += params.v0[static_cast<size_t>(k)];
            }
        }
        // noise terms at anchors s >= 2: G_t R_s^t chi and (I - G_t) R_s^t chi
        for (int s = 2; s <= t; ++s) {
            const Mat& gain = unrolled.gain_at(t, s);
            for (int k_supp = 0; k_supp < model.support_size(s); ++k_supp) {
                const Vec contribution = matvec_k(gain, model.support_point(s, k_supp));
                auto beta = spec.rhs.coeff(t, s, k_supp);
                for (int k = 0; k < K; ++k) {
                    const double g = st.g_diag[static_cast<size_t>(k)];
                    beta[static_cast<size_t>(0 * K + k)] = g * contribution[static_cast<size_t>(k)];
                    beta[static_cast<size_t>(1 * K + k)] = (1.0 - g) * contribution[static_cast<size_t>(k)];
                }
            }
        }
    }

    // expected cost: thermal generation plus deficit penalty (plus the
    // relaxation penalty on the slack block)
    ExpectedObjective obj;
    obj.cost.resize(static_cast<size_t>(N));
    obj.prob.resize(static_cast<size_t>(N));
    for (int t = 1; t <= N; ++t) {
        Vec f(static_cast<size_t>(n_t), 0.0);
        const HydroStage& st = params.stage[static_cast<size_t>(t - 1)];
        for (int k = 0; k < K; ++k) {
            f[static_cast<size_t>(R + k)] = st.deficit_penalty[static_cast<size_t>(k)];
            f[static_cast<size_t>(W + k)] = st.thermal_cost[static_cast<size_t>(k)];
            if (rcr) f[static_cast<size_t>(ALPHA + k)] = st.rcr_penalty[static_cast<size_t>(k)];
        }
        obj.cost[static_cast<size_t>(t - 1)] = std::move(f);
        obj.prob[static_cast<size_t>(t - 1)] =
            t == 1 ? Vec{1.0} : model.prob.at(static_cast<size_t>(t - 2));
    }
    spec.objective = std::move(obj);
    spec.validate();
    return spec;
}

HydroParams default_test_params(int K, int N, bool rcr_relaxation) {
    HydroParams p;
    p.K = K;
    p.N = N;
    p.rcr_relaxation = rcr_relaxation;
    p.v0.assign(static_cast<size_t>(K), 0.5 * N);
    p.stage.resize(static_cast<size_t>(N));
    for (int t = 1; t <= N; ++t) {
        HydroStage& s = p.stage[static_cast<size_t>(t - 1)];
        s.demand.assign(static_cast<size_t>(K), 1.0);
        s.thermal_cost.resize(static_cast<size_t>(K));
        for (int k = 0; k < K; ++k) s.thermal_cost[static_cast<size_t>(k)] = 1.0 + 0.1 * k;
        s.deficit_penalty.assign(static_cast<size_t>(K), 10.0);
        s.g_diag.assign(static_cast<size_t>(K), 0.7);
        s.v_min.assign(static_cast<size_t>(K), 0.1 * N);
        s.v_max.assign(static_cast<size_t>(K), 1.5 * N);
        s.h_max.assign(static_cast<size_t>(K), 1.0);
        s.w_max.assign(static_cast<size_t>(K), 2.0);
        s.rcr_penalty.assign(static_cast<size_t>(K), 100.0);
    }
    return p;
}

ParModel default_test_par_model(int K, int N, int d, std::uint64_t seed) {
    require(d >= 1, "par model: need at least one noise point per stage");
    ParModel m;
    m.K = K;
    m.N = N;
    m.first_index = -1;
    SplitMix64 rng(seed);
    for (int s = m.first_index; s <= N; ++s) m.theta.push_back(Vec(static_cast<size_t>(K), 1.0));
    for (int s = m.first_index; s <= 1; ++s) {
        Vec h(static_cast<size_t>(K));
        for (int k = 0; k < K; ++k) h[static_cast<size_t>(k)] = 1.0 + 0.1 * rng.next_double();
        m.history.push_back(std::move(h));
    }
    for (int t = 2; t <= N; ++t) {
        m.lag.push_back(2);
        std::vector<Mat> bs;
        for (int j = 0; j < 2; ++j) {
            Mat b(K, K);
            for (int r = 0; r < K; ++r)
                for (int c = 0; c < K; ++c) b(r, c) = rng.uniform(0.0, 0.15 / K);
            bs.push_back(std::move(b));
        }
        m.coeff.push_back(std::move(bs));
        m.noise_gain.push_back(Mat::identity(K));
        std::vector<Vec> pts;
        for (int k = 0; k < d; ++k) {
            Vec Chi(static_cast<size_t>(K));
            for (int r = 0; r < K; ++r) Chi[static_cast<size_t>(r)] = rng.uniform(-0.3, 0.3);
            pts.push_back(std::move(Chi));
        }
        m.support.push_back(std::move(pts));
        m.prob.push_back(Vec(static_cast<size_t>(d), 1.0 / d));
    }
    return m;
}

} // namespace cddr
