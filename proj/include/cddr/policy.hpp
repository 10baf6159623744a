#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cddr/problem.hpp"

namespace cddr {

/// A weighted list of full-length trajectories. Empty weights mean uniform.
struct ScenarioSet {
    std::vector<std::vector<int>> trajectories;
    Vec weights;
};

/// All d^N trajectories, weighted by their probabilities when the objective
/// carries per-stage marginals (uniform otherwise). Guarded at 10^6.
ScenarioSet exhaustive_scenarios(const ProblemSpec& spec);

/// Seeded Monte Carlo sample from the per-stage marginals of an Expected
/// objective (SplitMix64; categories drawn stage 1..N per scenario, so a
/// seed pins the whole set bit-for-bit).
ScenarioSet sample_scenarios(const ProblemSpec& spec, int count, std::uint64_t seed);

struct SimulationOptions {
    /// Residuals up to this tolerance count as satisfied. The default is the
    /// reference solver's per-row tolerance with headroom for accumulation
    /// across a stage's summand chain.
    double violation_tol = 1e-6;
    bool keep_traces = false;
};

struct SimulationReport {
    std::size_t scenario_count = 0;
    Vec costs;                       // per scenario
    double mean_cost = 0.0;          // weighted when the set is weighted
    std::vector<Vec> mean_violation; // [t-1] in R^{m_t}, mean relative violation
    double max_violation = 0.0;      // largest relative violation seen
    double feasibility_rate = 0.0;   // weighted fraction of violation-free scenarios
    /// traces[scenario][t-1] = decision vector, kept when requested
    std::optional<std::vector<std::vector<Vec>>> traces;
};

/// Evaluates the rule on every scenario: per-stage decisions via the additive
/// sum, stage costs from the objective's cost vectors (worst-case objectives
/// score max_l sum_t h_{t,l}^T x_t), and constraint residuals against A and
/// the additive right-hand side. The relative violation of row i at stage t
/// is max(0, (lhs-rhs)/|rhs|) when rhs != 0 and the absolute excess
/// otherwise.
SimulationReport simulate(const ProblemSpec& spec, const RuleCoefficients& rule,
                          const ScenarioSet& scenarios, const SimulationOptions& options = {});

/// Closed-form expected cost of a rule under an Expected objective:
///   sum_t f_t^T sum_{s<=t} sum_xi (prod_r P_r(xi_r)) u^t_{s,xi},
/// with probability 1 for padded stages. Equals the probability-weighted
/// exhaustive simulation and the LP objective row by construction.
double expected_cost(const ProblemSpec& spec, const RuleCoefficients& rule);

} // namespace cddr
