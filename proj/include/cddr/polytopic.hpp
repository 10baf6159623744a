#pragma once

#include <map>
#include <optional>
#include <vector>

#include "cddr/lp.hpp"
#include "cddr/problem.hpp"
#include "cddr/reformulate.hpp"

namespace cddr {

/// One stage's uncertainty polytope: the convex hull of d_t listed points in
/// R^{nu-1}, which must affinely span the space (so nu <= d_t). lambda maps
/// a point to its nu affine coordinates; with the default basis (standard
/// vectors then the origin) lambda_i = [zeta]_i for i < nu and
/// lambda_nu = 1 - sum. lambda is affine on all of R^{nu-1}, so points
/// outside the polytope are allowed.
class PolytopeStage {
public:
    PolytopeStage() = default;
    PolytopeStage(int dim, std::vector<Vec> vertices);
    PolytopeStage(int dim, std::vector<Vec> vertices, std::vector<Vec> basis_points);

    int dim() const { return dim_; }    // nu - 1
    int nu() const { return dim_ + 1; }
    int vertex_count() const { return static_cast<int>(vertices_.size()); }
    const Vec& vertex(int j) const { return vertices_.at(static_cast<size_t>(j)); }
    const std::vector<Vec>& vertices() const { return vertices_; }
    bool default_basis() const { return basis_points_.empty(); }
    const std::vector<Vec>& basis_points() const { return basis_points_; }

    Vec lambda(std::span<const double> zeta) const;

    /// Row j holds lambda(vertex j); rows sum to 1.
    const Mat& vertex_lambda() const { return vertex_lambda_; }

private:
    void finish_construction();

    int dim_ = 0;
    std::vector<Vec> vertices_;
    std::vector<Vec> basis_points_; // empty = default basis
    Mat coord_solver_;              // inverse of [basis points; ones row], custom bases
    Mat vertex_lambda_;
};

/// Coefficient tables g^t_{tau,kappa} of vector-valued poly-affine functions
/// with memory mu: kappa ranges over the per-anchor index set with radices
/// nu_{tau-mu+1..tau} (1 for padded stages). Shares the fragment algebra
/// with the discrete tables, radices nu instead of d.
class PolyAffineTable {
public:
    PolyAffineTable() = default;
    PolyAffineTable(int stages, int memory, std::vector<int> value_dims, std::vector<int> nu);

    int stages() const { return n_stages_; }
    int memory() const { return memory_; }
    int value_dim(int t) const { return dims_.at(static_cast<size_t>(t - 1)); }
    const std::vector<int>& value_dims() const { return dims_; }
    const std::vector<int>& nu() const { return nu_; }

    FragmentSpace index_space(int tau) const { return FragmentSpace(tau, memory_, nu_); }

    std::span<double> coeff(int t, int tau, std::int64_t kappa);
    std::span<const double> coeff(int t, int tau, std::int64_t kappa) const;

    /// Depth-widening by the suffix construction: the new coefficient copies
    /// the one picked by the trailing memory() entries of kappa. Since the
    /// lambda coordinates of every stage sum to 1, evaluation is unchanged
    /// on every trajectory.
    PolyAffineTable widened(int target_memory) const;

private:
    int n_stages_ = 0;
    int memory_ = 1;
    std::vector<int> dims_;
    std::vector<int> nu_;
    std::vector<std::vector<Vec>> table_;
};

using PolyAffineCoefficients = PolyAffineTable; // value dim n_t (decision rules)
using PolyAffineRhs = PolyAffineTable;          // value dim m_t (right-hand sides)

/// Multistage problem with polytopic uncertainty, poly-affine right-hand
/// sides, and the same lower-triangular constraint matrices as the discrete
/// form. The objective is stated over scenario (vertex) indices.
struct PolyProblem {
    int N = 0;
    int mu = 1;
    std::vector<int> n;
    std::vector<int> m;
    std::vector<PolytopeStage> stages;
    std::map<std::pair<int, int>, Mat> A;
    PolyAffineRhs rhs;
    ObjectiveSpec objective = ExpectedObjective{};

    std::vector<int> cardinalities() const; // d_t = vertex counts
    std::vector<int> nu() const;
    void validate() const;
};

/// Evaluates the multiaffine sum at a trajectory of stage points
/// (zeta[s-1] in R^{nu_s - 1}; prefix length = target stage).
Vec eval_polyaffine(const PolyAffineTable& table, const std::vector<PolytopeStage>& stages,
                    const std::vector<Vec>& zeta);

/// The scenario trajectory zeta[xi]: vertex chi_{s, xi_s} at every stage.
std::vector<Vec> scenario_trajectory(const std::vector<PolytopeStage>& stages,
                                     std::span<const int> xi);

/// Restriction to scenario trajectories: a discrete problem with
/// cardinalities d_t = vertex counts and additive right-hand sides
/// beta_{tau,xi} = sum_kappa [prod_s lambda_{kappa_s}(chi_{tau-mu+s, xi_...})] g_{tau,kappa}.
ProblemSpec discretize(const PolyProblem& poly);

/// The linear coefficient map u^t_{tau,xi} = sum_kappa [prod lambda(chi)] v^t_{tau,kappa};
/// eval_policy of the image equals eval_polyaffine of v on every scenario
/// trajectory.
RuleCoefficients v_to_u(const PolyAffineCoefficients& v, const std::vector<PolytopeStage>& stages);

/// Encodes per-stage affine maps p_t + P_t zeta_t as a memory-1 poly-affine
/// table (coefficient at kappa = value at the kappa-th basis point).
PolyAffineTable affine_to_polyaffine(const std::vector<Vec>& p, const std::vector<Mat>& P,
                                     const std::vector<PolytopeStage>& stages);

struct PolySolveResult {
    SolveStatus status = SolveStatus::Failed;
    double value = 0.0;
    PolyAffineCoefficients v;
    RuleCoefficients u;
    std::int64_t iterations = 0;
    std::string message;
};

/// Assembles the discrete reformulation, appends the V columns and the
/// linking equalities of the coefficient map, and minimizes over
/// (v, u, y, z).
PolySolveResult solve_polytopic(const PolyProblem& poly, const SolverConfig& config = {});

} // namespace cddr
