#include "cddr/lp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>

// Two-phase revised simplex on bounded variables.
//
// Internal column layout: [structurals | one slack per row | artificials].
// Slacks of <= rows live in [0, inf), slacks of = rows are fixed at 0. The
// initial basis is block-triangular: free columns with a single
// equality-row entry are crashed onto their rows (the reformulation's
// linking variables all qualify, so those rows never need artificials),
// remaining rows take their slack when the start residual fits its bounds
// and a signed artificial otherwise. Phase 1 minimizes the artificial sum;
// phase 2 fixes artificials at zero and minimizes the real cost.
//
// The basis inverse is kept as a sparse LU factorization (right-looking
// elimination, pivot columns by smallest active count through a lazy
// bucket queue, pivot rows by a relative stability threshold) plus a
// product-form eta file between refactorizations. Every tie-break is
// deterministic, so a rerun on identical input replays the identical
// pivot sequence.

namespace cddr {

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
        case SolveStatus::Failed: return "failed";
    }
    return "unknown";
}

void SparseLp::canonicalize() {
    auto merge = [](std::vector<std::pair<int, double>>& terms) {
        std::sort(terms.begin(), terms.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        size_t out = 0;
        for (size_t i = 0; i < terms.size();) {
            int col = terms[i].first;
            double sum = 0.0;
            while (i < terms.size() && terms[i].first == col) sum += terms[i++].second;
            if (sum != 0.0) terms[out++] = {col, sum};
        }
        terms.resize(out);
    };
    merge(objective);
    for (auto& row : rows) merge(row.terms);
}

void SparseLp::validate() const {
    require(static_cast<int>(lower.size()) == n_cols && static_cast<int>(upper.size()) == n_cols,
            "SparseLp: bound arrays out of sync with n_cols");
    for (int j = 0; j < n_cols; ++j) {
        require(!(std::isnan(lower[static_cast<size_t>(j)]) || std::isnan(upper[static_cast<size_t>(j)])),
                "SparseLp: NaN bound");
        require(lower[static_cast<size_t>(j)] <= upper[static_cast<size_t>(j)],
                "SparseLp: empty bound interval on column " + std::to_string(j));
    }
    auto check_terms = [&](const std::vector<std::pair<int, double>>& terms) {
        for (const auto& [col, v] : terms) {
            require(col >= 0 && col < n_cols, "SparseLp: column index out of range");
            require(std::isfinite(v), "SparseLp: non-finite coefficient");
        }
    };
    check_terms(objective);
    for (const auto& row : rows) {
        check_terms(row.terms);
        require(std::isfinite(row.rhs), "SparseLp: non-finite rhs");
    }
}

Vec SparseLp::dense_objective() const {
    Vec c(static_cast<size_t>(n_cols), 0.0);
    for (const auto& [col, v] : objective) c[static_cast<size_t>(col)] += v;
    return c;
}

double objective_value(const SparseLp& lp, const Vec& x) {
    double v = 0.0;
    for (const auto& [col, c] : lp.objective) v += c * x[static_cast<size_t>(col)];
    return v;
}

ResidualReport check_residuals(const SparseLp& lp, const Vec& x, double tol) {
    ResidualReport rep;
    for (int j = 0; j < lp.n_cols; ++j) {
        const double v = x[static_cast<size_t>(j)];
        const double excess = std::max(lp.lower[static_cast<size_t>(j)] - v,
                                       v - lp.upper[static_cast<size_t>(j)]);
        if (excess > rep.max_violation) {
            rep.max_violation = excess;
            rep.worst_row = -1;
        }
    }
    for (size_t r = 0; r < lp.rows.size(); ++r) {
        const auto& row = lp.rows[r];
        double lhs = 0.0;
        for (const auto& [col, v] : row.terms) lhs += v * x[static_cast<size_t>(col)];
        const double excess =
            row.rel == Relation::Equal ? std::abs(lhs - row.rhs) : lhs - row.rhs;
        if (excess > rep.max_violation) {
            rep.max_violation = excess;
            rep.worst_row = static_cast<int>(r);
        }
    }
    rep.feasible = rep.max_violation <= tol;
    return rep;
}

namespace {

enum class VStat : unsigned char { Basic, AtLower, AtUpper, FreeZero };

struct LuFactors {
    // pivot k: original row prow[k], basis position pcol[k]
    std::vector<int> prow, pcol;
    std::vector<double> diag;
    // L column k: (original row, multiplier)
    std::vector<std::vector<std::pair<int, double>>> lcol;
    // U row k: (basis position pivoted later, value), diagonal excluded
    std::vector<std::vector<std::pair<int, double>>> urow;
};

struct Eta {
    int rpos;
    double diag;
    std::vector<std::pair<int, double>> entries; // (basis position, value), rpos excluded
};

class Simplex {
public:
    Simplex(const SparseLp& lp, const SolverConfig& cfg) : lp_(lp), cfg_(cfg) {}

    SolveResult run();

private:
    const SparseLp& lp_;
    const SolverConfig& cfg_;

    int m_ = 0;       // rows
    int nstruct_ = 0; // structural columns
    int ntot_ = 0;    // structurals + slacks + artificials

    std::vector<std::vector<std::pair<int, double>>> cols_; // CSC of the working matrix
    Vec lower_, upper_, cost_, b_;
    std::vector<int> artificials_;

    std::vector<int> basis_;  // row position -> variable
    std::vector<VStat> stat_; // per variable
    Vec x_;

    LuFactors lu_;
    std::vector<Eta> etas_;
    std::int64_t eta_entries_ = 0;
    double time_factor_ = 0.0, time_ftran_ = 0.0, time_btran_ = 0.0, time_price_ = 0.0;
    int n_factor_ = 0;

    std::int64_t iterations_ = 0;
    int degenerate_streak_ = 0;
    bool bland_ = false;

    void build_working_problem();
    bool factorize(std::string& err);
    void ftran(Vec& v) const;          // v: rows in, basis positions out
    void btran(Vec& v) const;          // v: basis positions in, rows out
    Vec column_ftran(int var) const;
    void recompute_basics();
    double entering_direction(int j, double dj) const;

    enum class StepResult { Moved, Optimal, Unbounded, NumericalFailure };
    StepResult iterate(const Vec& cost, std::string& err);

    SolveResult finish_failure(const std::string& msg) const;
};

void Simplex::build_working_problem() {
    m_ = static_cast<int>(lp_.rows.size());
    nstruct_ = lp_.n_cols;
    ntot_ = nstruct_ + m_;

    cols_.assign(static_cast<size_t>(ntot_), {});
    lower_.assign(static_cast<size_t>(ntot_), 0.0);
    upper_.assign(static_cast<size_t>(ntot_), 0.0);
    b_.assign(static_cast<size_t>(m_), 0.0);

    for (int j = 0; j < nstruct_; ++j) {
        lower_[static_cast<size_t>(j)] = lp_.lower[static_cast<size_t>(j)];
        upper_[static_cast<size_t>(j)] = lp_.upper[static_cast<size_t>(j)];
    }
    for (int r = 0; r < m_; ++r) {
        const auto& row = lp_.rows[static_cast<size_t>(r)];
        b_[static_cast<size_t>(r)] = row.rhs;
        for (const auto& [col, v] : row.terms)
            cols_[static_cast<size_t>(col)].emplace_back(r, v);
        const int slack = nstruct_ + r;
        cols_[static_cast<size_t>(slack)].emplace_back(r, 1.0);
        lower_[static_cast<size_t>(slack)] = 0.0;
        upper_[static_cast<size_t>(slack)] =
            row.rel == Relation::Equal ? 0.0 : kInfinity;
    }
    // merge duplicate (row, col) input terms
    for (int j = 0; j < nstruct_; ++j) {
        auto& col = cols_[static_cast<size_t>(j)];
        std::sort(col.begin(), col.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        size_t out = 0;
        for (size_t i = 0; i < col.size();) {
            const int row = col[i].first;
            double sum = 0.0;
            while (i < col.size() && col[i].first == row) sum += col[i++].second;
            if (sum != 0.0) col[out++] = {row, sum};
        }
        col.resize(out);
    }

    // nonbasic start: bound closest to zero, free variables at zero
    stat_.assign(static_cast<size_t>(ntot_), VStat::AtLower);
    x_.assign(static_cast<size_t>(ntot_), 0.0);
    for (int j = 0; j < ntot_; ++j) {
        const double lo = lower_[static_cast<size_t>(j)], up = upper_[static_cast<size_t>(j)];
        if (lo == -kInfinity && up == kInfinity) {
            stat_[static_cast<size_t>(j)] = VStat::FreeZero;
            x_[static_cast<size_t>(j)] = 0.0;
        } else if (lo == -kInfinity) {
            stat_[static_cast<size_t>(j)] = VStat::AtUpper;
            x_[static_cast<size_t>(j)] = up;
        } else if (up == kInfinity || std::abs(lo) <= std::abs(up)) {
            stat_[static_cast<size_t>(j)] = VStat::AtLower;
            x_[static_cast<size_t>(j)] = lo;
        } else {
            stat_[static_cast<size_t>(j)] = VStat::AtUpper;
            x_[static_cast<size_t>(j)] = up;
        }
    }

    // crash: a free structural column whose only equality-row entry sits in
    // an unassigned equality row can cover that row in the initial basis.
    // The basis stays block-triangular (diagonal over equality rows, slack
    // identity elsewhere), and rows of the linking-equality kind need no
    // artificial at all.
    basis_.assign(static_cast<size_t>(m_), -1);
    std::vector<int> crash_row(static_cast<size_t>(nstruct_), -1);
    {
        std::vector<int> eq_hits(static_cast<size_t>(nstruct_), 0);
        std::vector<int> eq_row(static_cast<size_t>(nstruct_), -1);
        std::vector<double> eq_coeff(static_cast<size_t>(nstruct_), 0.0);
        for (int j = 0; j < nstruct_; ++j) {
            if (!(lower_[static_cast<size_t>(j)] == -kInfinity &&
                  upper_[static_cast<size_t>(j)] == kInfinity))
                continue;
            for (const auto& [r, a] : cols_[static_cast<size_t>(j)]) {
                if (lp_.rows[static_cast<size_t>(r)].rel != Relation::Equal) continue;
                ++eq_hits[static_cast<size_t>(j)];
                eq_row[static_cast<size_t>(j)] = r;
                eq_coeff[static_cast<size_t>(j)] = a;
            }
        }
        for (int j = 0; j < nstruct_; ++j) {
            if (eq_hits[static_cast<size_t>(j)] != 1) continue;
            const int r = eq_row[static_cast<size_t>(j)];
            if (basis_[static_cast<size_t>(r)] >= 0) continue;
            if (std::abs(eq_coeff[static_cast<size_t>(j)]) < 1e-7) continue;
            basis_[static_cast<size_t>(r)] = j;
            stat_[static_cast<size_t>(j)] = VStat::Basic;
            crash_row[static_cast<size_t>(j)] = r;
        }
    }

    // initial residuals with the remaining columns at their start values
    Vec resid = b_;
    for (int j = 0; j < nstruct_; ++j) {
        if (stat_[static_cast<size_t>(j)] == VStat::Basic) continue;
        const double v = x_[static_cast<size_t>(j)];
        if (v == 0.0) continue;
        for (const auto& [r, a] : cols_[static_cast<size_t>(j)])
            resid[static_cast<size_t>(r)] -= a * v;
    }
    // crashed columns absorb their row's residual exactly; propagate the
    // implied values into the other rows before slack/artificial selection
    for (int j = 0; j < nstruct_; ++j) {
        const int r = crash_row[static_cast<size_t>(j)];
        if (r < 0) continue;
        double coeff = 0.0;
        for (const auto& [rr, a] : cols_[static_cast<size_t>(j)])
            if (rr == r) coeff = a;
        const double value = resid[static_cast<size_t>(r)] / coeff;
        x_[static_cast<size_t>(j)] = value;
        if (value != 0.0)
            for (const auto& [rr, a] : cols_[static_cast<size_t>(j)])
                if (rr != r) resid[static_cast<size_t>(rr)] -= a * value;
    }

    cost_.assign(static_cast<size_t>(ntot_), 0.0); // phase-1 cost built below
    for (int r = 0; r < m_; ++r) {
        if (basis_[static_cast<size_t>(r)] >= 0) continue; // crash-covered
        const int slack = nstruct_ + r;
        const double res = resid[static_cast<size_t>(r)];
        const bool slack_fits = lp_.rows[static_cast<size_t>(r)].rel == Relation::Equal
                                    ? res == 0.0
                                    : res >= 0.0;
        if (slack_fits) {
            basis_[static_cast<size_t>(r)] = slack;
            stat_[static_cast<size_t>(slack)] = VStat::Basic;
            x_[static_cast<size_t>(slack)] = res;
        } else {
            const int art = ntot_++;
            artificials_.push_back(art);
            cols_.push_back({{r, res > 0.0 ? 1.0 : -1.0}});
            lower_.push_back(0.0);
            upper_.push_back(kInfinity);
            x_.push_back(std::abs(res));
            stat_.push_back(VStat::Basic);
            cost_.push_back(1.0);
            basis_[static_cast<size_t>(r)] = art;
        }
    }
}

// Sparse LU of the current basis. Row-major active storage; pivot columns
// chosen by smallest active count, pivot row by a 0.01 relative stability
// threshold then smallest count, ties to the lowest index.
bool Simplex::factorize(std::string& err) {
    const auto t0 = std::chrono::steady_clock::now();
    ++n_factor_;
    etas_.clear();
    eta_entries_ = 0;
    lu_ = LuFactors{};
    lu_.prow.reserve(static_cast<size_t>(m_));

    std::vector<std::vector<std::pair<int, double>>> arow(static_cast<size_t>(m_));
    std::vector<int> colcount(static_cast<size_t>(m_), 0);
    std::vector<std::vector<int>> colrows(static_cast<size_t>(m_)); // lazy incidence
    for (int pos = 0; pos < m_; ++pos) {
        for (const auto& [r, v] : cols_[static_cast<size_t>(basis_[static_cast<size_t>(pos)])]) {
            arow[static_cast<size_t>(r)].emplace_back(pos, v);
            ++colcount[static_cast<size_t>(pos)];
            colrows[static_cast<size_t>(pos)].push_back(r);
        }
    }
    std::vector<char> row_active(static_cast<size_t>(m_), 1), col_active(static_cast<size_t>(m_), 1);

    // min-count bucket queue over active columns, entries validated on pop
    // (stale duplicates are discarded; every count change re-queues)
    std::vector<std::vector<int>> bucket(static_cast<size_t>(m_) + 1);
    int cursor = m_;
    auto queue_col = [&](int c) {
        const int count = colcount[static_cast<size_t>(c)];
        bucket[static_cast<size_t>(count)].push_back(c);
        cursor = std::min(cursor, count);
    };
    for (int c = 0; c < m_; ++c) queue_col(c);

    for (int step = 0; step < m_; ++step) {
        // pivot column: smallest active count, queue order within a bucket
        int pc = -1;
        while (cursor <= m_) {
            auto& cell = bucket[static_cast<size_t>(cursor)];
            while (!cell.empty()) {
                const int c = cell.back();
                cell.pop_back();
                if (col_active[static_cast<size_t>(c)] &&
                    colcount[static_cast<size_t>(c)] == cursor) {
                    pc = c;
                    break;
                }
            }
            if (pc >= 0) break;
            ++cursor;
        }
        if (pc < 0 || colcount[static_cast<size_t>(pc)] == 0) {
            err = "singular basis (empty pivot column)";
            return false;
        }
        // pivot row: stability threshold, then fewest entries, then lowest index
        double colmax = 0.0;
        for (int r : colrows[static_cast<size_t>(pc)]) {
            if (!row_active[static_cast<size_t>(r)]) continue;
            for (const auto& [c, v] : arow[static_cast<size_t>(r)])
                if (c == pc) colmax = std::max(colmax, std::abs(v));
        }
        if (colmax < cfg_.pivot_tol) {
            err = "singular basis (pivot below tolerance)";
            return false;
        }
        int pr = -1;
        double pval = 0.0;
        for (int r : colrows[static_cast<size_t>(pc)]) {
            if (!row_active[static_cast<size_t>(r)]) continue;
            double v = 0.0;
            bool found = false;
            for (const auto& [c, val] : arow[static_cast<size_t>(r)])
                if (c == pc) {
                    v = val;
                    found = true;
                    break;
                }
            if (!found || std::abs(v) < 0.01 * colmax) continue;
            if (pr < 0 ||
                arow[static_cast<size_t>(r)].size() < arow[static_cast<size_t>(pr)].size() ||
                (arow[static_cast<size_t>(r)].size() == arow[static_cast<size_t>(pr)].size() && r < pr)) {
                pr = r;
                pval = v;
            }
        }
        if (pr < 0) {
            err = "singular basis (no stable pivot)";
            return false;
        }

        // record pivot
        lu_.prow.push_back(pr);
        lu_.pcol.push_back(pc);
        lu_.diag.push_back(pval);
        lu_.lcol.emplace_back();
        lu_.urow.emplace_back();
        auto& lks = lu_.lcol.back();
        auto& uks = lu_.urow.back();

        // pivot row entries (minus pivot) become the U row
        std::vector<std::pair<int, double>> prow_entries;
        for (const auto& [c, v] : arow[static_cast<size_t>(pr)]) {
            if (c == pc) continue;
            if (!col_active[static_cast<size_t>(c)]) continue;
            prow_entries.emplace_back(c, v);
            uks.emplace_back(c, v);
        }
        std::sort(uks.begin(), uks.end());

        row_active[static_cast<size_t>(pr)] = 0;
        col_active[static_cast<size_t>(pc)] = 0;
        for (const auto& [c, v] : prow_entries) {
            --colcount[static_cast<size_t>(c)];
            queue_col(c);
        }
        --colcount[static_cast<size_t>(pc)];

        // eliminate the pivot column from the remaining active rows
        for (int r : colrows[static_cast<size_t>(pc)]) {
            if (!row_active[static_cast<size_t>(r)]) continue;
            auto& row = arow[static_cast<size_t>(r)];
            double arj = 0.0;
            bool found = false;
            for (const auto& [c, v] : row)
                if (c == pc) {
                    arj = v;
                    found = true;
                    break;
                }
            if (!found) continue;
            const double mult = arj / pval;
            lks.emplace_back(r, mult);

            // row := row - mult * pivot_row, dropping the pivot column.
            // Both operands are kept sorted by column position.
            std::vector<std::pair<int, double>> merged;
            merged.reserve(row.size() + prow_entries.size());
            size_t a = 0, p = 0;
            while (a < row.size() || p < prow_entries.size()) {
                if (p == prow_entries.size() ||
                    (a < row.size() && row[a].first < prow_entries[p].first)) {
                    if (row[a].first != pc) merged.push_back(row[a]);
                    ++a;
                } else if (a == row.size() || prow_entries[p].first < row[a].first) {
                    const double nv = -mult * prow_entries[p].second;
                    if (nv != 0.0) {
                        merged.emplace_back(prow_entries[p].first, nv);
                        ++colcount[static_cast<size_t>(prow_entries[p].first)];
                        queue_col(prow_entries[p].first);
                        colrows[static_cast<size_t>(prow_entries[p].first)].push_back(r);
                    }
                    ++p;
                } else {
                    const double nv = row[a].second - mult * prow_entries[p].second;
                    if (nv != 0.0) merged.push_back({row[a].first, nv});
                    else {
                        --colcount[static_cast<size_t>(row[a].first)];
                        queue_col(row[a].first);
                    }
                    ++a;
                    ++p;
                }
            }
            row = std::move(merged);
        }
    }
    time_factor_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return true;
}

void Simplex::ftran(Vec& v) const {
    // L ops in pivot order on row-indexed values
    for (size_t k = 0; k < lu_.prow.size(); ++k) {
        const double piv = v[static_cast<size_t>(lu_.prow[k])];
        if (piv == 0.0) continue;
        for (const auto& [r, mult] : lu_.lcol[k]) v[static_cast<size_t>(r)] -= mult * piv;
    }
    // back substitution into basis-position space
    Vec w(static_cast<size_t>(m_), 0.0);
    for (int k = m_ - 1; k >= 0; --k) {
        double s = v[static_cast<size_t>(lu_.prow[static_cast<size_t>(k)])];
        for (const auto& [c, val] : lu_.urow[static_cast<size_t>(k)])
            s -= val * w[static_cast<size_t>(c)];
        w[static_cast<size_t>(lu_.pcol[static_cast<size_t>(k)])] = s / lu_.diag[static_cast<size_t>(k)];
    }
    v = std::move(w);
    // eta file, oldest first
    for (const auto& eta : etas_) {
        const double t = v[static_cast<size_t>(eta.rpos)] / eta.diag;
        if (t != 0.0)
            for (const auto& [pos, val] : eta.entries) v[static_cast<size_t>(pos)] -= val * t;
        v[static_cast<size_t>(eta.rpos)] = t;
    }
}

void Simplex::btran(Vec& v) const {
    // eta file, newest first
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
        double s = v[static_cast<size_t>(it->rpos)];
        for (const auto& [pos, val] : it->entries) s -= val * v[static_cast<size_t>(pos)];
        v[static_cast<size_t>(it->rpos)] = s / it->diag;
    }
    // U^T forward solve over pivot order
    Vec t(static_cast<size_t>(m_), 0.0);
    Vec acc = v;
    for (size_t k = 0; k < lu_.prow.size(); ++k) {
        const double tk = acc[static_cast<size_t>(lu_.pcol[k])] / lu_.diag[k];
        t[k] = tk;
        if (tk != 0.0)
            for (const auto& [c, val] : lu_.urow[k]) acc[static_cast<size_t>(c)] -= val * tk;
    }
    // L^T ops in reverse pivot order, result indexed by original row
    Vec y(static_cast<size_t>(m_), 0.0);
    for (int k = m_ - 1; k >= 0; --k) y[static_cast<size_t>(lu_.prow[static_cast<size_t>(k)])] = t[static_cast<size_t>(k)];
    for (int k = m_ - 1; k >= 0; --k) {
        double s = y[static_cast<size_t>(lu_.prow[static_cast<size_t>(k)])];
        for (const auto& [r, mult] : lu_.lcol[static_cast<size_t>(k)])
            s -= mult * y[static_cast<size_t>(r)];
        y[static_cast<size_t>(lu_.prow[static_cast<size_t>(k)])] = s;
    }
    v = std::move(y);
}

Vec Simplex::column_ftran(int var) const {
    Vec v(static_cast<size_t>(m_), 0.0);
    for (const auto& [r, a] : cols_[static_cast<size_t>(var)]) v[static_cast<size_t>(r)] = a;
    ftran(v);
    return v;
}

void Simplex::recompute_basics() {
    Vec r = b_;
    for (int j = 0; j < ntot_; ++j) {
        if (stat_[static_cast<size_t>(j)] == VStat::Basic) continue;
        const double v = x_[static_cast<size_t>(j)];
        if (v == 0.0) continue;
        for (const auto& [row, a] : cols_[static_cast<size_t>(j)])
            r[static_cast<size_t>(row)] -= a * v;
    }
    ftran(r);
    for (int pos = 0; pos < m_; ++pos)
        x_[static_cast<size_t>(basis_[static_cast<size_t>(pos)])] = r[static_cast<size_t>(pos)];
}

double Simplex::entering_direction(int j, double dj) const {
    switch (stat_[static_cast<size_t>(j)]) {
        case VStat::AtLower: return 1.0;
        case VStat::AtUpper: return -1.0;
        case VStat::FreeZero: return dj < 0.0 ? 1.0 : -1.0;
        default: return 0.0;
    }
}

Simplex::StepResult Simplex::iterate(const Vec& cost, std::string& err) {
    // reduced costs
    const auto tb0 = std::chrono::steady_clock::now();
    Vec y(static_cast<size_t>(m_), 0.0);
    for (int pos = 0; pos < m_; ++pos)
        y[static_cast<size_t>(pos)] = cost[static_cast<size_t>(basis_[static_cast<size_t>(pos)])];
    btran(y);
    const auto tp0 = std::chrono::steady_clock::now();
    time_btran_ += std::chrono::duration<double>(tp0 - tb0).count();

    std::vector<char> unusable(static_cast<size_t>(ntot_), 0);
    while (true) {
        int enter = -1;
        double enter_dj = 0.0;
        double best_viol = 0.0;
        for (int j = 0; j < ntot_; ++j) {
            if (stat_[static_cast<size_t>(j)] == VStat::Basic || unusable[static_cast<size_t>(j)]) continue;
            if (lower_[static_cast<size_t>(j)] == upper_[static_cast<size_t>(j)]) continue; // fixed
            double dj = cost[static_cast<size_t>(j)];
            for (const auto& [r, a] : cols_[static_cast<size_t>(j)])
                dj -= a * y[static_cast<size_t>(r)];
            double viol = 0.0;
            switch (stat_[static_cast<size_t>(j)]) {
                case VStat::AtLower: viol = dj < -cfg_.optimality_tol ? -dj : 0.0; break;
                case VStat::AtUpper: viol = dj > cfg_.optimality_tol ? dj : 0.0; break;
                case VStat::FreeZero: viol = std::abs(dj) > cfg_.optimality_tol ? std::abs(dj) : 0.0; break;
                default: break;
            }
            if (viol <= 0.0) continue;
            if (bland_) {
                enter = j;
                enter_dj = dj;
                break; // lowest index
            }
            if (viol > best_viol) { // ties keep the lowest index (ascending scan)
                enter = j;
                enter_dj = dj;
                best_viol = viol;
            }
        }
        if (enter < 0) return StepResult::Optimal;

        time_price_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - tp0).count();
        const double sigma = entering_direction(enter, enter_dj);
        const auto tf0 = std::chrono::steady_clock::now();
        Vec w = column_ftran(enter);
        time_ftran_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - tf0).count();
        double wmax = 0.0;
        for (int pos = 0; pos < m_; ++pos) wmax = std::max(wmax, std::abs(w[static_cast<size_t>(pos)]));
        // blockers below this threshold are eta-chain noise relative to the
        // column scale; a pivot on them would poison the basis
        const double admission = std::max(cfg_.pivot_tol, 1e-9 * wmax);

        // ratio test
        const double gap = upper_[static_cast<size_t>(enter)] - lower_[static_cast<size_t>(enter)];
        double step = gap; // bound flip distance (may be inf)
        int leave_pos = -1;
        double leave_pivot = 0.0;
        double leave_bound = 0.0;
        for (int pos = 0; pos < m_; ++pos) {
            const double wi = w[static_cast<size_t>(pos)];
            if (std::abs(wi) <= admission) continue;
            const int k = basis_[static_cast<size_t>(pos)];
            const double delta = sigma * wi; // x_k moves by -delta * step
            double lim;
            double hit;
            if (delta > 0.0) {
                if (lower_[static_cast<size_t>(k)] == -kInfinity) continue;
                lim = (x_[static_cast<size_t>(k)] - lower_[static_cast<size_t>(k)]) / delta;
                hit = lower_[static_cast<size_t>(k)];
            } else {
                if (upper_[static_cast<size_t>(k)] == kInfinity) continue;
                lim = (x_[static_cast<size_t>(k)] - upper_[static_cast<size_t>(k)]) / delta;
                hit = upper_[static_cast<size_t>(k)];
            }
            lim = std::max(lim, 0.0);
            bool better = false;
            if (lim < step - 1e-15) {
                better = true;
            } else if (leave_pos >= 0 && lim <= step + 1e-15) {
                // tie-break: Bland -> lowest variable index; else larger pivot
                if (bland_)
                    better = k < basis_[static_cast<size_t>(leave_pos)];
                else
                    better = std::abs(wi) > std::abs(leave_pivot) ||
                             (std::abs(wi) == std::abs(leave_pivot) &&
                              k < basis_[static_cast<size_t>(leave_pos)]);
            } else if (leave_pos < 0) {
                better = lim < step; // otherwise the bound flip wins
            }
            if (better) {
                step = std::min(lim, step);
                leave_pos = pos;
                leave_pivot = wi;
                leave_bound = hit;
            }
        }

        if (leave_pos < 0) {
            if (gap == kInfinity) return StepResult::Unbounded;
            // bound flip
            const double move = sigma * gap;
            for (int pos = 0; pos < m_; ++pos) {
                const double wi = w[static_cast<size_t>(pos)];
                if (wi == 0.0) continue;
                x_[static_cast<size_t>(basis_[static_cast<size_t>(pos)])] -= move * wi;
            }
            stat_[static_cast<size_t>(enter)] =
                sigma > 0.0 ? VStat::AtUpper : VStat::AtLower;
            x_[static_cast<size_t>(enter)] = sigma > 0.0 ? upper_[static_cast<size_t>(enter)]
                                                         : lower_[static_cast<size_t>(enter)];
            ++iterations_;
            return StepResult::Moved;
        }

        if (std::abs(leave_pivot) < cfg_.pivot_tol) {
            unusable[static_cast<size_t>(enter)] = 1; // try another column
            continue;
        }

        // pivot
        const double move = sigma * step;
        if (std::isfinite(move) && move != 0.0) {
            for (int pos = 0; pos < m_; ++pos) {
                const double wi = w[static_cast<size_t>(pos)];
                if (wi == 0.0) continue;
                x_[static_cast<size_t>(basis_[static_cast<size_t>(pos)])] -= move * wi;
            }
        }
        const int leaving = basis_[static_cast<size_t>(leave_pos)];
        x_[static_cast<size_t>(leaving)] = leave_bound;
        stat_[static_cast<size_t>(leaving)] =
            leave_bound == lower_[static_cast<size_t>(leaving)] ? VStat::AtLower : VStat::AtUpper;
        x_[static_cast<size_t>(enter)] =
            (stat_[static_cast<size_t>(enter)] == VStat::FreeZero
                 ? 0.0
                 : (sigma > 0.0 ? lower_[static_cast<size_t>(enter)] : upper_[static_cast<size_t>(enter)])) +
            move;
        stat_[static_cast<size_t>(enter)] = VStat::Basic;
        basis_[static_cast<size_t>(leave_pos)] = enter;

        Eta eta;
        eta.rpos = leave_pos;
        eta.diag = w[static_cast<size_t>(leave_pos)];
        for (int pos = 0; pos < m_; ++pos) {
            if (pos == leave_pos) continue;
            const double wi = w[static_cast<size_t>(pos)];
            if (wi != 0.0) eta.entries.emplace_back(pos, wi);
        }
        etas_.push_back(std::move(eta));

        if (step <= 1e-12) {
            if (++degenerate_streak_ > 1000) bland_ = true;
        } else {
            degenerate_streak_ = 0;
            bland_ = false;
        }

        ++iterations_;
        eta_entries_ += static_cast<std::int64_t>(etas_.back().entries.size()) + 1;
        if (static_cast<int>(etas_.size()) >= cfg_.refactor_interval ||
            eta_entries_ > 8 * static_cast<std::int64_t>(m_)) {
            if (!factorize(err)) return StepResult::NumericalFailure;
            recompute_basics();
        }
        return StepResult::Moved;
    }
}

SolveResult Simplex::finish_failure(const std::string& msg) const {
    SolveResult res;
    res.status = SolveStatus::Failed;
    res.iterations = iterations_;
    res.message = msg;
    return res;
}

SolveResult Simplex::run() {
    lp_.validate();
    build_working_problem();

    std::string err;
    if (!factorize(err)) return finish_failure(err);
    recompute_basics();

    // A termination verdict is only trusted when the eta file is empty, so
    // that Optimal/Unbounded always rest on a fresh factorization.
    auto optimize = [&](const Vec& cost, StepResult& verdict) -> bool {
        while (true) {
            if (iterations_ >= cfg_.max_iterations) {
                err = "iteration limit reached";
                verdict = StepResult::NumericalFailure;
                return true;
            }
            const StepResult r = iterate(cost, err);
            if (r == StepResult::Moved) continue;
            if (r == StepResult::NumericalFailure) {
                verdict = r;
                return true;
            }
            if (!etas_.empty()) {
                if (!factorize(err)) {
                    verdict = StepResult::NumericalFailure;
                    return true;
                }
                recompute_basics();
                continue;
            }
            verdict = r;
            return true;
        }
    };

    // phase 1: minimize the artificial sum (cost_ already set on artificials)
    if (!artificials_.empty()) {
        StepResult verdict{};
        optimize(cost_, verdict);
        if (verdict == StepResult::NumericalFailure) return finish_failure(err);
        if (verdict == StepResult::Unbounded)
            return finish_failure("phase-1 objective unbounded (numerical breakdown)");
        double art_sum = 0.0;
        for (int a : artificials_) art_sum += std::abs(x_[static_cast<size_t>(a)]);
        if (art_sum > cfg_.feasibility_tol) {
            SolveResult res;
            res.status = SolveStatus::Infeasible;
            res.iterations = iterations_;
            res.message = "phase-1 infeasibility " + std::to_string(art_sum);
            return res;
        }
        for (int a : artificials_) upper_[static_cast<size_t>(a)] = 0.0;
    }

    // phase 2: real cost
    Vec cost(static_cast<size_t>(ntot_), 0.0);
    for (const auto& [col, v] : lp_.objective) cost[static_cast<size_t>(col)] += v;
    {
        StepResult verdict{};
        optimize(cost, verdict);
        if (verdict == StepResult::NumericalFailure) return finish_failure(err);
        if (verdict == StepResult::Unbounded) {
            SolveResult res;
            res.status = SolveStatus::Unbounded;
            res.iterations = iterations_;
            return res;
        }
    }

    if (std::getenv("CDDR_SIMPLEX_PROFILE"))
        std::fprintf(stderr, "profile: factor %.1fs (%d) ftran %.1fs btran %.1fs price %.1fs\n",
                     time_factor_, n_factor_, time_ftran_, time_btran_, time_price_);
    SolveResult res;
    res.x.assign(x_.begin(), x_.begin() + nstruct_);
    res.iterations = iterations_;
    const ResidualReport rep = check_residuals(lp_, res.x, cfg_.feasibility_tol);
    if (!rep.feasible)
        return finish_failure("optimal candidate failed residual verification (violation " +
                              std::to_string(rep.max_violation) + ")");
    res.status = SolveStatus::Optimal;
    res.value = objective_value(lp_, res.x);
    return res;
}

} // namespace

SolveResult solve_reference(const SparseLp& lp, const SolverConfig& config) {
    Simplex s(lp, config);
    return s.run();
}

} // namespace cddr
