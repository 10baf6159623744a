#pragma once

#include <cstdint>
#include <vector>

#include "cddr/problem.hpp"

namespace cddr {

/// Aggregated per-region hydro-thermal data for one stage.
struct HydroStage {
    Vec demand;          // delta_t
    Vec thermal_cost;    // c_t
    Vec deficit_penalty; // p_t
    Vec g_diag;          // diagonal of G_t, actual-inflow share in [0, 1]
    Vec v_min, v_max;    // reservoir level bounds
    Vec h_max;           // hydro generation capacity
    Vec w_max;           // thermal generation capacity
    Vec rcr_penalty;     // pen_t, used when the relaxation is enabled
};

struct HydroParams {
    int K = 0; // regions
    int N = 0; // horizon
    Vec v0;    // initial reservoir levels
    double final_level_factor = 0.8; // final levels must reach this share of v0
    bool rcr_relaxation = false;     // slack on the reservoir lower bound, penalized
    std::vector<HydroStage> stage;   // length N

    void validate() const;
};

/// Periodic autoregressive inflow model
///   I_t = theta_t + eta_t,  eta_t = sum_j B_t^j eta_{t-j} + C_t zeta_t  (t >= 2),
/// with deterministic inflows through stage 1 and noise supported on a
/// finite point set per stage. Stage indices below first_index are not
/// referenced by any lag.
struct ParModel {
    int K = 0;
    int N = 0;
    int first_index = 1; // smallest stage with data (<= 1)

    std::vector<Vec> theta;   // stages first_index..N
    std::vector<Vec> history; // deterministic inflows I_s, stages first_index..1
    std::vector<int> lag;             // per stage 2..N
    std::vector<std::vector<Mat>> coeff; // B_t^j, per stage 2..N, j = 1..lag
    std::vector<Mat> noise_gain;         // C_t, per stage 2..N
    std::vector<std::vector<Vec>> support; // noise points, per stage 2..N
    std::vector<Vec> prob;                 // per stage 2..N

    const Vec& theta_at(int s) const { return theta.at(static_cast<size_t>(s - first_index)); }
    const Vec& history_at(int s) const { return history.at(static_cast<size_t>(s - first_index)); }
    int lag_at(int t) const { return lag.at(static_cast<size_t>(t - 2)); }
    const Mat& coeff_at(int t, int j) const {
        return coeff.at(static_cast<size_t>(t - 2)).at(static_cast<size_t>(j - 1));
    }
    const Mat& noise_gain_at(int t) const { return noise_gain.at(static_cast<size_t>(t - 2)); }
    int support_size(int t) const {
        return t == 1 ? 1 : static_cast<int>(support.at(static_cast<size_t>(t - 2)).size());
    }
    const Vec& support_point(int t, int k) const {
        return support.at(static_cast<size_t>(t - 2)).at(static_cast<size_t>(k));
    }

    void validate() const;
};

/// Affine unrolling of the recursion: I_t = intercept_t + sum_{s=2}^t gain[t][s] zeta_s.
struct UnrolledInflows {
    int K = 0;
    int N = 0;
    std::vector<Vec> intercept;            // per stage 1..N
    std::vector<std::vector<Mat>> gain;    // gain[t-1][s-2] for 2 <= s <= t

    const Mat& gain_at(int t, int s) const {
        return gain.at(static_cast<size_t>(t - 1)).at(static_cast<size_t>(s - 2));
    }
    /// Evaluates the affine form on a noise sequence (zeta[s-2] for stages
    /// 2..t; entries beyond t ignored).
    Vec inflow(int t, const std::vector<Vec>& zeta) const;
};

UnrolledInflows unroll_par(const ParModel& model);

/// Emits the multistage problem: decisions [h; v; r; w] (plus the slack
/// block alpha under the RCR relaxation), 9K rows per stage (10K relaxed)
/// in the frozen order water balance, demand, v upper, v lower, h upper,
/// h lower, w upper, w lower, r nonneg (, alpha nonneg), couplings only on
/// A^{t,t} and A^{t,t-1}, and the additive memory-1 right-hand side built
/// from the unrolled inflows with intercepts assigned to the anchor s = 1.
ProblemSpec generate(const HydroParams& params, const ParModel& model);

/// Small feasible instance family for tests and demos: bounds chosen so
/// thermal capacity alone covers demand and inflows stay nonnegative on
/// every support point.
HydroParams default_test_params(int K, int N, bool rcr_relaxation = false);
ParModel default_test_par_model(int K, int N, int d, std::uint64_t seed = 7);

} // namespace cddr
