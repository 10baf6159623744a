#pragma once

#include <string>
#include <vector>

#include "cddr/lp.hpp"
#include "cddr/mps.hpp"
#include "cddr/problem.hpp"

namespace cddr {

/// Entrywise maximum over every trajectory of the stage-t partial sums
///   sum_{s<=t} y^t_{s, xi_{s-mu+1:s}},  y^t_{s,xi} = sum_{q=s}^t A^{t,q} u^q_{s,xi} - beta^t_{s,xi},
/// by plain enumeration of D^t. The rule satisfies the stage-t constraints
/// on all trajectories iff the result is <= 0. Guarded at 10^6 trajectories.
Vec brute_force_max(const ProblemSpec& spec, const RuleCoefficients& rule, int t);

/// Same check for the memoryless uncertain-matrix variant, where
/// y^t_{s,xi} = A^{t,s}(xi) u^s_{xi} - beta^t_{s,xi}.
Vec brute_force_max_memoryless(const UncertainMatrixProblem& spec, const RuleCoefficients& rule,
                               int t);

struct ScenarioTreeLp {
    SparseLp lp;
    LpNames names;
    /// Column base of the decision vector of each tree node, depth-first
    /// lexicographic order; nodes[k] = (stage t, trajectory prefix xi^t).
    std::vector<std::pair<int, std::vector<int>>> nodes;
    std::vector<std::int64_t> node_col;
};

/// Deterministic-equivalent LP over the full prefix tree of D^N with one
/// decision vector per node (nonanticipativity by construction) and the
/// Expected objective weighted by path probabilities. The optimal value is
/// the exact multistage optimum over unrestricted policies. Guarded at 10^5
/// nodes.
ScenarioTreeLp scenario_tree_lp(const ProblemSpec& spec);

} // namespace cddr
