#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "cddr/linalg.hpp"

namespace cddr {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Relation { LessEqual, Equal };

struct LpRow {
    std::vector<std::pair<int, double>> terms; // (column, coefficient)
    Relation rel = Relation::LessEqual;
    double rhs = 0.0;
};

/// Sparse LP container:
///   minimize c^T x  subject to  row_i: a_i^T x {<=,=} b_i,  l <= x <= u.
/// Columns default to free. Duplicate (row, column) terms are allowed in
/// input and are summed by canonicalize()/the solver.
struct SparseLp {
    int n_cols = 0;
    std::vector<std::pair<int, double>> objective;
    std::vector<LpRow> rows;
    Vec lower; // size n_cols
    Vec upper;

    int add_col(double lo = -kInfinity, double up = kInfinity) {
        lower.push_back(lo);
        upper.push_back(up);
        return n_cols++;
    }
    int add_cols(int count, double lo = -kInfinity, double up = kInfinity) {
        const int first = n_cols;
        for (int i = 0; i < count; ++i) add_col(lo, up);
        return first;
    }
    int add_row(Relation rel, double rhs) {
        rows.push_back(LpRow{{}, rel, rhs});
        return static_cast<int>(rows.size()) - 1;
    }
    void add_term(int row, int col, double value) {
        if (value == 0.0) return;
        rows[static_cast<size_t>(row)].terms.emplace_back(col, value);
    }
    void add_objective_term(int col, double value) {
        if (value == 0.0) return;
        objective.emplace_back(col, value);
    }

    /// Sums duplicate terms (within rows and the objective) and sorts them
    /// by column. Checks index ranges and finiteness.
    void canonicalize();
    void validate() const;

    Vec dense_objective() const;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, Failed };

std::string to_string(SolveStatus s);

struct SolveResult {
    SolveStatus status = SolveStatus::Failed;
    double value = 0.0;
    Vec x;
    std::int64_t iterations = 0;
    std::string message;
};

/// Tolerances used by the reference solver; frozen here so every caller
/// shares one configuration record.
struct SolverConfig {
    double feasibility_tol = 1e-7; // row and bound residuals
    double optimality_tol = 1e-9;  // reduced costs
    double pivot_tol = 1e-11;      // smallest acceptable pivot magnitude
    std::int64_t max_iterations = 2'000'000;
    int refactor_interval = 100;   // basis updates between refactorizations
};

/// Two-phase revised simplex on bounded variables. Deterministic: identical
/// inputs produce bit-identical results. Entering-variable pricing is
/// Dantzig with Bland's rule as the anti-cycling fallback after a run of
/// degenerate steps; a pivot below pivot_tol that cannot be avoided yields
/// SolveStatus::Failed, never a silent wrong answer.
SolveResult solve_reference(const SparseLp& lp, const SolverConfig& config = {});

struct ResidualReport {
    bool feasible = true;
    double max_violation = 0.0;
    int worst_row = -1; // -1 = a bound, index otherwise
};

/// Independent feasibility check of a candidate point (used to certify
/// Optimal results and in tests).
ResidualReport check_residuals(const SparseLp& lp, const Vec& x, double tol);

double objective_value(const SparseLp& lp, const Vec& x);

} // namespace cddr
