#pragma once

#include <map>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "cddr/fragment.hpp"
#include "cddr/linalg.hpp"

namespace cddr {

/// Table of per-(t, s) coefficient vectors indexed by depth-mu fragments
/// anchored at s. Two roles share this layout: right-hand-side terms
/// (value dimension m_t) and decision-rule terms (value dimension n_t).
/// The value at a trajectory prefix is the sum of the coefficients picked
/// by its fragment windows, accumulated in increasing s order so that
/// repeated evaluations are bitwise reproducible.
class AdditiveCoefficients {
public:
    AdditiveCoefficients() = default;
    AdditiveCoefficients(int stages, int memory, std::vector<int> value_dims,
                         std::vector<int> cardinalities);

    int stages() const { return n_stages_; }
    int memory() const { return memory_; }
    int value_dim(int t) const { return dims_.at(static_cast<size_t>(t - 1)); }
    const std::vector<int>& value_dims() const { return dims_; }
    const std::vector<int>& cardinalities() const { return d_; }

    /// Fragment index set for the summand anchored at stage s (depth = memory()).
    FragmentSpace fragment_space(int s) const;

    std::span<double> coeff(int t, int s, std::int64_t xi);
    std::span<const double> coeff(int t, int s, std::int64_t xi) const;

    /// Sum of the coefficients along a trajectory prefix (length 1..stages()).
    Vec evaluate(std::span<const int> trajectory) const;

    /// Re-expresses the table at a larger memory depth; each new coefficient
    /// copies the one selected by the trailing memory() entries of its
    /// fragment, so evaluation is unchanged on every trajectory.
    AdditiveCoefficients widened(int target_memory) const;

    bool shape_equals(const AdditiveCoefficients& o) const {
        return n_stages_ == o.n_stages_ && memory_ == o.memory_ && dims_ == o.dims_ && d_ == o.d_;
    }

private:
    int n_stages_ = 0;
    int memory_ = 1;
    std::vector<int> dims_; // value dimension per stage t
    std::vector<int> d_;    // cardinality per stage t
    // table_[t-1][s-1] holds |fragment_space(s)| vectors of length dims_[t-1],
    // fragment-major.
    std::vector<std::vector<Vec>> table_;
};

using AdditiveRhs = AdditiveCoefficients;
using RuleCoefficients = AdditiveCoefficients;

/// Expected linear cost: per-stage cost vectors and per-stage marginal
/// probabilities, disturbances independent across stages.
struct ExpectedObjective {
    std::vector<Vec> cost; // cost[t-1] in R^{n_t}
    std::vector<Vec> prob; // prob[t-1] over 1..d_t
};

/// Sample-average cost over an explicit weighted scenario list.
struct SaaObjective {
    std::vector<Vec> cost;
    std::vector<std::vector<int>> scenarios; // each of length N, 1-based values
    Vec weights;                             // same length as scenarios; must sum to 1
};

/// Worst case over trajectories of the largest of L linear functionals of
/// the decision trajectory.
struct WorstCaseObjective {
    std::vector<std::vector<Vec>> h; // h[l][t-1] in R^{n_t}
};

using ObjectiveSpec = std::variant<ExpectedObjective, SaaObjective, WorstCaseObjective>;

/// Multistage uncertain linear constraint system
///   sum_{tau<=t} A^{t,tau} x_tau(xi^tau) <= b_t(xi^t)  for all xi^N,
/// with additive right-hand sides and a convex objective descriptor.
/// Missing A blocks are zero. Immutable in use; validate() after building.
struct ProblemSpec {
    int N = 0;
    int mu = 1;
    std::vector<int> n; // decision dimension per stage
    std::vector<int> m; // constraint rows per stage
    std::vector<int> d; // uncertainty cardinality per stage
    std::map<std::pair<int, int>, Mat> A; // (t, tau) -> m_t x n_tau
    AdditiveRhs rhs;
    ObjectiveSpec objective = ExpectedObjective{};

    const Mat* a_block(int t, int tau) const {
        auto it = A.find({t, tau});
        return it == A.end() ? nullptr : &it->second;
    }

    FragmentSpace fragment_space(int s) const { return FragmentSpace(s, mu, d); }

    void validate() const;
};

/// Probability of a full trajectory under stagewise-independent marginals.
double trajectory_probability(const ExpectedObjective& obj, std::span<const int> trajectory);

/// Variant of the constraint system where technology matrices depend on the
/// current fragment and decision rules are memoryless (one coefficient
/// vector per (t, fragment), no summation over earlier anchors):
///   sum_{s<=t} A^{t,s}(xi_{s-mu+1:s}) u^s_{xi} <= b_t(xi^t).
/// A entry (t, s) supplies one matrix per fragment of the anchor-s space;
/// missing entries are zero blocks.
struct UncertainMatrixProblem {
    int N = 0;
    int mu = 1;
    std::vector<int> n;
    std::vector<int> m;
    std::vector<int> d;
    std::map<std::pair<int, int>, std::vector<Mat>> A; // (t, s) -> per-fragment m_t x n_s
    AdditiveRhs rhs;
    ObjectiveSpec objective = ExpectedObjective{};

    FragmentSpace fragment_space(int s) const { return FragmentSpace(s, mu, d); }

    void validate() const;
};

} // namespace cddr
