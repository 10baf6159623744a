#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cddr/lp.hpp"
#include "cddr/mps.hpp"
#include "cddr/problem.hpp"

namespace cddr {

struct SizeReport {
    std::int64_t n_u = 0;
    std::int64_t n_y = 0;
    std::int64_t n_z = 0;
    std::int64_t n_w = 0;
    std::int64_t n_eq = 0;
    std::int64_t n_ineq = 0;

    std::int64_t total_columns() const { return n_u + n_y + n_z + n_w; }
    std::int64_t total_rows() const { return n_eq + n_ineq; }
    bool operator==(const SizeReport&) const = default;
};

/// Column and row layout of the assembled LP. Columns are grouped by stage
/// t, family order U, Y, Z within the stage, then the optional worst-case
/// scalar W at the very end; rows are all linking equalities first (t
/// ascending, anchor s ascending, fragment ascending), then per stage the
/// recursion inequalities with anchor s descending followed by that stage's
/// root rows. The ordering is frozen: names, files and diagnostics key off
/// it.
class VariableCatalog {
public:
    VariableCatalog() = default;

    /// `extra_last_stage_rows` is the number of worst-case functionals
    /// folded into stage N's constraint block (0 when none; implies a W
    /// column). `memoryless` restricts the U family to anchor s == t.
    VariableCatalog(int N, int mu, std::vector<int> n, std::vector<int> m, std::vector<int> d,
                    int extra_last_stage_rows, bool memoryless);

    int stages() const { return N_; }
    int memory() const { return mu_; }
    bool memoryless() const { return memoryless_; }
    int worstcase_rows() const { return extra_rows_; }
    bool has_w() const { return extra_rows_ > 0; }

    /// Stage-t constraint rows including the worst-case extension.
    int row_dim(int t) const;
    int decision_dim(int t) const { return n_.at(static_cast<size_t>(t - 1)); }

    FragmentSpace frag(int s) const { return FragmentSpace(s, mu_, d_); }
    FragmentSpace zfrag(int s) const { return FragmentSpace(s - 1, mu_ - 1, d_); }

    bool has_u_block(int t, int s) const { return !memoryless_ || s == t; }

    std::int64_t columns() const { return n_cols_; }
    std::int64_t u_col(int t, int s, std::int64_t xi) const;
    std::int64_t y_col(int t, int s, std::int64_t xi) const;
    std::int64_t z_col(int t, int s, std::int64_t eta) const;
    std::int64_t w_col() const;

    std::int64_t num_eq_rows() const { return n_eq_; }
    std::int64_t num_ineq_rows() const { return n_ineq_; }
    std::int64_t eq_row(int t, int s, std::int64_t xi) const;
    std::int64_t dp_row(int t, int s, std::int64_t xi) const;
    std::int64_t root_row(int t) const;

    std::string column_name(std::int64_t col) const;
    std::string row_name(std::int64_t row) const;

    /// Stage whose constraint block owns the given inequality row
    /// (diagnostics for infeasibility reports).
    int stage_of_row(std::int64_t row) const;

    SizeReport sizes() const;

private:
    int N_ = 0, mu_ = 1;
    std::vector<int> n_, m_, d_;
    int extra_rows_ = 0;
    bool memoryless_ = false;

    std::vector<std::int64_t> frag_size_, zfrag_size_; // per anchor s = 1..N
    std::vector<std::vector<std::int64_t>> u_start_, y_start_, z_start_; // [t-1][s-1]
    std::int64_t w_col_ = -1;
    std::int64_t n_cols_ = 0;
    std::vector<std::vector<std::int64_t>> eq_start_, dp_start_; // [t-1][s-1]
    std::vector<std::int64_t> root_start_;                       // [t-1]
    std::int64_t n_eq_ = 0, n_ineq_ = 0;
};

/// The reformulated LP. Rows [0, counts.n_eq) of `lp` are the linking
/// equalities, the remainder the recursion inequalities, laid out per the
/// catalog. `source` keeps the originating problem for the worst-case
/// rebuild and for rule extraction.
struct AssembledLp {
    SparseLp lp;
    VariableCatalog catalog;
    SizeReport counts;
    std::shared_ptr<const ProblemSpec> source;
    bool worstcase_applied = false;
};

/// Builds the LP whose feasible U-projections are exactly the rule
/// coefficient collections satisfying the uncertain constraint system on
/// every trajectory. Expected/Saa objectives become a cost row over the U
/// columns; a WorstCase objective routes through the same extension as
/// add_worstcase.
AssembledLp build_discrete_lp(const ProblemSpec& spec);

/// Re-assembles with stage-N's system extended by the rows
/// sum_t h_{t,l}^T x_t <= w and the objective replaced by the single W
/// column. Fails when the LP already carries a worst-case extension.
AssembledLp add_worstcase(const AssembledLp& lp, const WorstCaseObjective& functionals);

/// Memoryless-rule variant with fragment-dependent technology matrices.
AssembledLp build_memoryless_uncertain_matrix_lp(const UncertainMatrixProblem& spec);

/// Closed-form variable/constraint counts; equals the assembled catalog
/// exactly, without building anything.
SizeReport count_sizes(const ProblemSpec& spec);

/// Structural sanity bound 20 (max m + max n) N^2 (max d)^mu, with m
/// including any worst-case extension.
std::int64_t size_bound(const ProblemSpec& spec);

/// Names for MPS export and plugin solves, generated from the catalog
/// (columns beyond the catalog, e.g. the polytopic V family, get generic
/// names from the caller).
LpNames lp_names(const AssembledLp& assembled);

/// Reads the U columns of a solver point back into rule coefficients
/// (memoryless assemblies fill anchors s < t with zeros).
RuleCoefficients extract_rule(const AssembledLp& assembled, const Vec& x);

/// Feasibility of a fixed rule through the LP extension: pins the U columns
/// and solves the pure (y, z) feasibility problem.
SolveResult solve_with_rule_fixed(const AssembledLp& assembled, const RuleCoefficients& rule,
                                  const SolverConfig& config = {});

/// Componentwise-minimal feasible recursion roots for a fixed rule:
/// drops the root bound rows, pins U, and minimizes the sum of all root
/// entries. Returns one vector per stage t.
std::vector<Vec> minimal_z_roots(const AssembledLp& assembled, const RuleCoefficients& rule,
                                 const SolverConfig& config = {});

struct InfeasibilityDiagnosis {
    bool diagnosed = false;
    int stage = 0;      // first stage whose system cannot be satisfied
    int row = 0;        // 0-based row within that stage's block
    double excess = 0.0; // unavoidable violation of that root bound
    std::string row_name;
};

/// Explains an infeasible reformulation: relaxes the root bounds with
/// penalized slacks and reports the first stage/row whose bound cannot be
/// met, named through the catalog.
InfeasibilityDiagnosis diagnose_infeasibility(const AssembledLp& assembled,
                                              const SolverConfig& config = {});

} // namespace cddr
