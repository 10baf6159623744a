#include "cddr/reformulate.hpp"

#include <algorithm>
#include <cstdio>

namespace cddr {

namespace {

std::string block_name(const char* fam, int t, int s, std::int64_t xi, int comp) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s_t%d_tau%d_x%lld_%d", fam, t, s,
                  static_cast<long long>(xi), comp);
    return buf;
}

} // namespace

VariableCatalog::VariableCatalog(int N, int mu, std::vector<int> n, std::vector<int> m,
                                 std::vector<int> d, int extra_last_stage_rows, bool memoryless)
    : N_(N), mu_(mu), n_(std::move(n)), m_(std::move(m)), d_(std::move(d)),
      extra_rows_(extra_last_stage_rows), memoryless_(memoryless) {
    require(N_ >= 1 && mu_ >= 1, "catalog: bad dimensions");
    frag_size_.resize(static_cast<size_t>(N_) + 1);
    zfrag_size_.resize(static_cast<size_t>(N_) + 1);
    for (int s = 1; s <= N_; ++s) {
        frag_size_[static_cast<size_t>(s)] = frag(s).size();
        zfrag_size_[static_cast<size_t>(s)] = zfrag(s).size();
    }

    auto table = [&]() {
        std::vector<std::vector<std::int64_t>> t(static_cast<size_t>(N_));
        for (int i = 0; i < N_; ++i) t[static_cast<size_t>(i)].assign(static_cast<size_t>(i) + 1, -1);
        return t;
    };
    u_start_ = table();
    y_start_ = table();
    z_start_ = table();

    std::int64_t col = 0;
    for (int t = 1; t <= N_; ++t) {
        for (int s = 1; s <= t; ++s) {
            if (!has_u_block(t, s)) continue;
            u_start_[static_cast<size_t>(t - 1)][static_cast<size_t>(s - 1)] = col;
            col += frag_size_[static_cast<size_t>(s)] * decision_dim(t);
        }
        for (int s = 1; s <= t; ++s) {
            y_start_[static_cast<size_t>(t - 1)][static_cast<size_t>(s - 1)] = col;
            col += frag_size_[static_cast<size_t>(s)] * row_dim(t);
        }
        for (int s = 1; s <= t; ++s) {
            z_start_[static_cast<size_t>(t - 1)][static_cast<size_t>(s - 1)] = col;
            col += zfrag_size_[static_cast<size_t>(s)] * row_dim(t);
        }
    }
    if (extra_rows_ > 0) w_col_ = col++;
    n_cols_ = col;

    eq_start_ = table();
    std::int64_t row = 0;
    for (int t = 1; t <= N_; ++t)
        for (int s = 1; s <= t; ++s) {
            eq_start_[static_cast<size_t>(t - 1)][static_cast<size_t>(s - 1)] = row;
            row += frag_size_[static_cast<size_t>(s)] * row_dim(t);
        }
    n_eq_ = row;

    dp_start_ = table();
    root_start_.assign(static_cast<size_t>(N_), -1);
    for (int t = 1; t <= N_; ++t) {
        for (int s = t; s >= 1; --s) {
            dp_start_[static_cast<size_t>(t - 1)][static_cast<size_t>(s - 1)] = row;
            row += frag_size_[static_cast<size_t>(s)] * row_dim(t);
        }
        root_start_[static_cast<size_t>(t - 1)] = row;
        row += row_dim(t);
    }
    n_ineq_ = row - n_eq_;
}

int VariableCatalog::row_dim(int t) const {
    return m_.at(static_cast<size_t>(t - 1)) + (t == N_ ? extra_rows_ : 0);
}

std::int64_t VariableCatalog::u_col(int t, int s, std::int64_t xi) const {
    const std::int64_t start = u_start_.at(static_cast<size_t>(t - 1)).at(static_cast<size_t>(s - 1));
    require(start >= 0, "catalog: no U block at (t=" + std::to_string(t) + ", s=" + std::to_string(s) + ")");
    return start + xi * decision_dim(t);
}

std::int64_t VariableCatalog::y_col(int t, int s, std::int64_t xi) const {
    return y_start_.at(static_cast<size_t>(t - 1)).at(static_cast<size_t>(s - 1)) + xi * row_dim(t);
}

std::int64_t VariableCatalog::z_col(int t, int s, std::int64_t eta) const {
    return z_start_.at(static_cast<size_t>(t - 1)).at(static_cast<size_t>(s - 1)) + eta * row_dim(t);
}

std::int64_t VariableCatalog::w_col() const {
    require(w_col_ >= 0, "catalog: no W column");
    return w_col_;
}

std::int64_t VariableCatalog::eq_row(int t, int s, std::int64_t xi) const {
    return eq_start_.at(static_cast<size_t>(t - 1)).at(static_cast<size_t>(s - 1)) + xi * row_dim(t);
}

std::int64_t VariableCatalog::dp_row(int t, int s, std::int64_t xi) const {
    return dp_start_.at(static_cast<size_t>(t - 1)).at(static_cast<size_t>(s - 1)) + xi * row_dim(t);
}

std::int64_t VariableCatalog::root_row(int t) const {
    return root_start_.at(static_cast<size_t>(t - 1));
}

std::string VariableCatalog::column_name(std::int64_t col) const {
    if (col == w_col_) return "W";
    for (int t = 1; t <= N_; ++t) {
        for (int s = 1; s <= t; ++s) {
            if (has_u_block(t, s)) {
                const std::int64_t start = u_start_[static_cast<size_t>(t - 1)][static_cast<size_t>(s - 1)];
                const std::int64_t width = frag_size_[static_cast<size_t>(s)] * decision_dim(t);
                if (col >= start && col < start + width)
                    return block_name("U", t, s, (col - start) / decision_dim(t),
                                      static_cast<int>((col - start) % decision_dim(t)));
            }
            const std::int64_t ys = y_start_[static_cast<size_t>(t - 1)][static_cast<size_t>(s - 1)];
            if (col >= ys && col < ys + frag_size_[static_cast<size_t>(s)] * row_dim(t))
                return block_name("Y", t, s, (col - ys) / row_dim(t),
                                  static_cast<int>((col - ys) % row_dim(t)));
            const std::int64_t zs = z_start_[static_cast<size_t>(t - 1)][static_cast<size_t>(s - 1)];
            if (col >= zs && col < zs + zfrag_size_[static_cast<size_t>(s)] * row_dim(t))
                return block_name("Z", t, s, (col - zs) / row_dim(t),
                                  static_cast<int>((col - zs) % row_dim(t)));
        }
    }
    fail("catalog: column " + std::to_string(col) + " out of range");
}

std::string VariableCatalog::row_name(std::int64_t row) const {
    for (int t = 1; t <= N_; ++t)
        for (int s = 1; s <= t; ++s) {
            const std::int64_t es = eq_start_[static_cast<size_t>(t - 1)][static_cast<size_t>(s - 1)];
            if (row >= es && row < es + frag_size_[static_cast<size_t>(s)] * row_dim(t))
                return block_name("EQ", t, s, (row - es) / row_dim(t),
                                  static_cast<int>((row - es) % row_dim(t)));
        }
    for (int t = 1; t <= N_; ++t) {
        for (int s = 1; s <= t; ++s) {
            const std::int64_t ds = dp_start_[static_cast<size_t>(t - 1)][static_cast<size_t>(s - 1)];
            if (row >= ds && row < ds + frag_size_[static_cast<size_t>(s)] * row_dim(t))
                return block_name("DP", t, s, (row - ds) / row_dim(t),
                                  static_cast<int>((row - ds) % row_dim(t)));
        }
        const std::int64_t rs = root_start_[static_cast<size_t>(t - 1)];
        if (row >= rs && row < rs + row_dim(t)) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "RT_t%d_%d", t, static_cast<int>(row - rs));
            return buf;
        }
    }
    fail("catalog: row " + std::to_string(row) + " out of range");
}

int VariableCatalog::stage_of_row(std::int64_t row) const {
    for (int t = 1; t <= N_; ++t)
        for (int s = 1; s <= t; ++s) {
            const std::int64_t es = eq_start_[static_cast<size_t>(t - 1)][static_cast<size_t>(s - 1)];
            if (row >= es && row < es + frag_size_[static_cast<size_t>(s)] * row_dim(t)) return t;
        }
    for (int t = 1; t <= N_; ++t) {
        const std::int64_t first = dp_start_[static_cast<size_t>(t - 1)][static_cast<size_t>(t - 1)];
        const std::int64_t last = root_start_[static_cast<size_t>(t - 1)] + row_dim(t);
        if (row >= first && row < last) return t;
    }
    fail("catalog: row " + std::to_string(row) + " out of range");
}

SizeReport VariableCatalog::sizes() const {
    SizeReport r;
    for (int t = 1; t <= N_; ++t) {
        for (int s = 1; s <= t; ++s) {
            if (has_u_block(t, s)) r.n_u += frag_size_[static_cast<size_t>(s)] * decision_dim(t);
            r.n_y += frag_size_[static_cast<size_t>(s)] * row_dim(t);
            r.n_z += zfrag_size_[static_cast<size_t>(s)] * row_dim(t);
        }
    }
    r.n_w = extra_rows_ > 0 ? 1 : 0;
    r.n_eq = n_eq_;
    r.n_ineq = n_ineq_;
    return r;
}

namespace {

// Shared recursion-inequality assembly: identical for the plain, worst-case
// and memoryless variants once the linking equalities are in place.
void assemble_dp_rows(const VariableCatalog& cat, SparseLp& lp) {
    const int N = cat.stages();
    const int mu = cat.memory();
    for (int t = 1; t <= N; ++t) {
        const int rows = cat.row_dim(t);
        for (int s = t; s >= 1; --s) {
            const FragmentSpace space = cat.frag(s);
            const FragmentSpace head_space = cat.zfrag(s);      // anchor s-1, depth mu-1
            const FragmentSpace tail_space = s < t ? cat.zfrag(s + 1) : FragmentSpace();
            std::vector<int> frag(static_cast<size_t>(mu));
            for (std::int64_t xi = 0; xi < space.size(); ++xi) {
                space.unindex(xi, frag);
                const std::int64_t head = head_space.index(
                    std::span<const int>(frag.data(), static_cast<size_t>(mu - 1)));
                std::int64_t tail = 0;
                if (s < t)
                    tail = tail_space.index(
                        std::span<const int>(frag.data() + 1, static_cast<size_t>(mu - 1)));
                for (int i = 0; i < rows; ++i) {
                    const int row = lp.add_row(Relation::LessEqual, 0.0);
                    lp.add_term(row, static_cast<int>(cat.y_col(t, s, xi) + i), 1.0);
                    if (s < t)
                        lp.add_term(row, static_cast<int>(cat.z_col(t, s + 1, tail) + i), 1.0);
                    lp.add_term(row, static_cast<int>(cat.z_col(t, s, head) + i), -1.0);
                }
            }
        }
        for (int i = 0; i < rows; ++i) {
            const int row = lp.add_row(Relation::LessEqual, 0.0);
            lp.add_term(row, static_cast<int>(cat.z_col(t, 1, 0) + i), 1.0);
        }
    }
}

void add_expected_cost(const VariableCatalog& cat, const ExpectedObjective& obj, SparseLp& lp) {
    const int N = cat.stages();
    const int mu = cat.memory();
    for (int t = 1; t <= N; ++t) {
        const Vec& f = obj.cost[static_cast<size_t>(t - 1)];
        for (int s = 1; s <= t; ++s) {
            if (!cat.has_u_block(t, s)) continue;
            const FragmentSpace space = cat.frag(s);
            std::vector<int> frag(static_cast<size_t>(mu));
            for (std::int64_t xi = 0; xi < space.size(); ++xi) {
                space.unindex(xi, frag);
                double p = 1.0;
                for (int off = 0; off < mu; ++off) {
                    const int stage = space.first_stage() + off;
                    if (stage < 1) continue;
                    p *= obj.prob[static_cast<size_t>(stage - 1)]
                                 [static_cast<size_t>(frag[static_cast<size_t>(off)] - 1)];
                }
                if (p == 0.0) continue;
                for (int j = 0; j < cat.decision_dim(t); ++j)
                    lp.add_objective_term(static_cast<int>(cat.u_col(t, s, xi) + j),
                                          p * f[static_cast<size_t>(j)]);
            }
        }
    }
}

void add_saa_cost(const VariableCatalog& cat, const SaaObjective& obj, SparseLp& lp) {
    const int N = cat.stages();
    for (size_t l = 0; l < obj.scenarios.size(); ++l) {
        const double w = obj.weights[l];
        if (w == 0.0) continue;
        const auto& scenario = obj.scenarios[l];
        for (int t = 1; t <= N; ++t) {
            const Vec& f = obj.cost[static_cast<size_t>(t - 1)];
            for (int s = 1; s <= t; ++s) {
                if (!cat.has_u_block(t, s)) continue;
                const std::int64_t xi = cat.frag(s).index_in_trajectory(scenario);
                for (int j = 0; j < cat.decision_dim(t); ++j)
                    lp.add_objective_term(static_cast<int>(cat.u_col(t, s, xi) + j),
                                          w * f[static_cast<size_t>(j)]);
            }
        }
    }
    lp.canonicalize();
}

AssembledLp assemble_discrete(const ProblemSpec& spec, const WorstCaseObjective* wc) {
    spec.validate();
    const int L = wc != nullptr ? static_cast<int>(wc->h.size()) : 0;
    if (wc != nullptr) require(L >= 1, "worst-case extension needs at least one functional");

    AssembledLp out;
    out.catalog = VariableCatalog(spec.N, spec.mu, spec.n, spec.m, spec.d, L, false);
    const VariableCatalog& cat = out.catalog;
    SparseLp& lp = out.lp;
    lp.add_cols(static_cast<int>(cat.columns()));

    // linking equalities y^t_{s,xi} = sum_{q=s}^t A^{t,q} u^q_{s,xi} - beta^t_{s,xi};
    // the worst-case rows use the functionals as an extra A row and carry -w
    // in place of their (zero) beta at the anchor s = 1.
    for (int t = 1; t <= spec.N; ++t) {
        const int m_t = spec.m[static_cast<size_t>(t - 1)];
        const int rows = cat.row_dim(t);
        for (int s = 1; s <= t; ++s) {
            const FragmentSpace space = cat.frag(s);
            for (std::int64_t xi = 0; xi < space.size(); ++xi) {
                const std::int64_t base = cat.eq_row(t, s, xi);
                const auto beta = spec.rhs.coeff(t, s, xi);
                for (int i = 0; i < rows; ++i) {
                    const int row = lp.add_row(Relation::Equal, i < m_t ? -beta[static_cast<size_t>(i)] : 0.0);
                    require(row == base + i, "assembly: equality row order out of sync");
                    lp.add_term(row, static_cast<int>(cat.y_col(t, s, xi) + i), 1.0);
                }
                for (int q = s; q <= t; ++q) {
                    const Mat* block = spec.a_block(t, q);
                    if (block != nullptr) {
                        for (int i = 0; i < m_t; ++i)
                            for (int j = 0; j < block->cols; ++j)
                                lp.add_term(static_cast<int>(base + i),
                                            static_cast<int>(cat.u_col(q, s, xi) + j),
                                            -(*block)(i, j));
                    }
                    if (t == spec.N && L > 0) {
                        for (int l = 0; l < L; ++l) {
                            const Vec& h = wc->h[static_cast<size_t>(l)][static_cast<size_t>(q - 1)];
                            for (int j = 0; j < static_cast<int>(h.size()); ++j)
                                lp.add_term(static_cast<int>(base + m_t + l),
                                            static_cast<int>(cat.u_col(q, s, xi) + j),
                                            -h[static_cast<size_t>(j)]);
                        }
                    }
                }
                if (t == spec.N && L > 0 && s == 1)
                    for (int l = 0; l < L; ++l)
                        lp.add_term(static_cast<int>(base + m_t + l),
                                    static_cast<int>(cat.w_col()), 1.0);
            }
        }
    }

    assemble_dp_rows(cat, lp);

    if (wc != nullptr) {
        lp.add_objective_term(static_cast<int>(cat.w_col()), 1.0);
    } else if (const auto* e = std::get_if<ExpectedObjective>(&spec.objective)) {
        add_expected_cost(cat, *e, lp);
    } else if (const auto* s = std::get_if<SaaObjective>(&spec.objective)) {
        add_saa_cost(cat, *s, lp);
    } else {
        fail("assembly: worst-case objective requires the worst-case path");
    }

    out.counts = cat.sizes();
    out.source = std::make_shared<ProblemSpec>(spec);
    out.worstcase_applied = wc != nullptr;
    require(out.counts == count_sizes(*out.source),
            "assembly: catalog disagrees with closed-form counts");
    require(static_cast<std::int64_t>(out.lp.rows.size()) == out.counts.total_rows(),
            "assembly: row count out of sync");
    return out;
}

} // namespace

AssembledLp build_discrete_lp(const ProblemSpec& spec) {
    if (const auto* wc = std::get_if<WorstCaseObjective>(&spec.objective))
        return assemble_discrete(spec, wc);
    return assemble_discrete(spec, nullptr);
}

AssembledLp add_worstcase(const AssembledLp& lp, const WorstCaseObjective& functionals) {
    require(lp.source != nullptr, "add_worstcase: LP was not built from a problem spec");
    require(!lp.worstcase_applied, "add_worstcase: worst-case extension already applied");
    require(!lp.catalog.memoryless(), "add_worstcase: memoryless assembly not supported");
    ProblemSpec spec = *lp.source;
    spec.objective = functionals; // shape-checked by validate() inside assembly
    return assemble_discrete(spec, &functionals);
}

AssembledLp build_memoryless_uncertain_matrix_lp(const UncertainMatrixProblem& spec) {
    spec.validate();
    AssembledLp out;
    out.catalog = VariableCatalog(spec.N, spec.mu, spec.n, spec.m, spec.d, 0, true);
    const VariableCatalog& cat = out.catalog;
    SparseLp& lp = out.lp;
    lp.add_cols(static_cast<int>(cat.columns()));

    // linking equalities y^t_{s,xi} = A^{t,s}(xi) u^s_{xi} - beta^t_{s,xi}
    for (int t = 1; t <= spec.N; ++t) {
        const int rows = cat.row_dim(t);
        for (int s = 1; s <= t; ++s) {
            const FragmentSpace space = cat.frag(s);
            const auto blocks = spec.A.find({t, s});
            for (std::int64_t xi = 0; xi < space.size(); ++xi) {
                const std::int64_t base = cat.eq_row(t, s, xi);
                const auto beta = spec.rhs.coeff(t, s, xi);
                for (int i = 0; i < rows; ++i) {
                    const int row = lp.add_row(Relation::Equal, -beta[static_cast<size_t>(i)]);
                    require(row == base + i, "assembly: equality row order out of sync");
                    lp.add_term(row, static_cast<int>(cat.y_col(t, s, xi) + i), 1.0);
                }
                if (blocks != spec.A.end()) {
                    const Mat& a = blocks->second[static_cast<size_t>(xi)];
                    for (int i = 0; i < rows; ++i)
                        for (int j = 0; j < a.cols; ++j)
                            lp.add_term(static_cast<int>(base + i),
                                        static_cast<int>(cat.u_col(s, s, xi) + j), -a(i, j));
                }
            }
        }
    }

    assemble_dp_rows(cat, lp);

    if (const auto* e = std::get_if<ExpectedObjective>(&spec.objective))
        add_expected_cost(cat, *e, lp);
    else if (const auto* s = std::get_if<SaaObjective>(&spec.objective))
        add_saa_cost(cat, *s, lp);

    out.counts = cat.sizes();
    return out;
}

SizeReport count_sizes(const ProblemSpec& spec) {
    spec.validate();
    const auto* wc = std::get_if<WorstCaseObjective>(&spec.objective);
    const std::int64_t L = wc != nullptr ? static_cast<std::int64_t>(wc->h.size()) : 0;

    SizeReport r;
    for (int t = 1; t <= spec.N; ++t) {
        const std::int64_t rows = spec.m[static_cast<size_t>(t - 1)] + (t == spec.N ? L : 0);
        std::int64_t frag_sum = 0, zfrag_sum = 0;
        for (int s = 1; s <= t; ++s) {
            const std::int64_t fs = FragmentSpace(s, spec.mu, spec.d).size();
            const std::int64_t zs = FragmentSpace(s - 1, spec.mu - 1, spec.d).size();
            frag_sum += fs;
            zfrag_sum += zs;
        }
        r.n_u += frag_sum * spec.n[static_cast<size_t>(t - 1)];
        r.n_y += frag_sum * rows;
        r.n_z += zfrag_sum * rows;
        r.n_eq += frag_sum * rows;
        r.n_ineq += frag_sum * rows + rows; // recursion rows plus the root block
    }
    r.n_w = L > 0 ? 1 : 0;
    return r;
}

std::int64_t size_bound(const ProblemSpec& spec) {
    const auto* wc = std::get_if<WorstCaseObjective>(&spec.objective);
    const std::int64_t L = wc != nullptr ? static_cast<std::int64_t>(wc->h.size()) : 0;
    std::int64_t max_m = 0, max_n = 0, max_d = 1;
    for (int t = 1; t <= spec.N; ++t) {
        max_m = std::max<std::int64_t>(max_m, spec.m[static_cast<size_t>(t - 1)] +
                                                  (t == spec.N ? L : 0));
        max_n = std::max<std::int64_t>(max_n, spec.n[static_cast<size_t>(t - 1)]);
        max_d = std::max<std::int64_t>(max_d, spec.d[static_cast<size_t>(t - 1)]);
    }
    std::int64_t dpow = 1;
    for (int k = 0; k < spec.mu; ++k) dpow *= max_d;
    return 20 * (max_m + max_n) * static_cast<std::int64_t>(spec.N) * spec.N * dpow;
}

LpNames lp_names(const AssembledLp& assembled) {
    LpNames names;
    names.problem = "CDDR";
    const std::int64_t cols = assembled.catalog.columns();
    names.col.reserve(static_cast<size_t>(assembled.lp.n_cols));
    for (std::int64_t c = 0; c < cols; ++c) names.col.push_back(assembled.catalog.column_name(c));
    char buf[24];
    for (int c = static_cast<int>(cols); c < assembled.lp.n_cols; ++c) {
        std::snprintf(buf, sizeof(buf), "X%07d", c + 1);
        names.col.emplace_back(buf);
    }
    const std::int64_t rows = assembled.catalog.num_eq_rows() + assembled.catalog.num_ineq_rows();
    names.row.reserve(assembled.lp.rows.size());
    for (std::int64_t r = 0; r < rows; ++r) names.row.push_back(assembled.catalog.row_name(r));
    for (int r = static_cast<int>(rows); r < static_cast<int>(assembled.lp.rows.size()); ++r) {
        std::snprintf(buf, sizeof(buf), "RX%06d", r + 1);
        names.row.emplace_back(buf);
    }
    return names;
}

RuleCoefficients extract_rule(const AssembledLp& assembled, const Vec& x) {
    require(assembled.source != nullptr || assembled.catalog.stages() >= 1,
            "extract_rule: missing catalog");
    const VariableCatalog& cat = assembled.catalog;
    require(static_cast<int>(x.size()) >= assembled.lp.n_cols, "extract_rule: point size mismatch");
    std::vector<int> n, d;
    for (int t = 1; t <= cat.stages(); ++t) n.push_back(cat.decision_dim(t));
    d = assembled.source != nullptr ? assembled.source->d : std::vector<int>();
    if (d.empty()) {
        for (int s = 1; s <= cat.stages(); ++s)
            d.push_back(static_cast<int>(cat.frag(s).size() /
                                         std::max<std::int64_t>(1, cat.zfrag(s).size())));
    }
    RuleCoefficients rule(cat.stages(), cat.memory(), n, d);
    for (int t = 1; t <= cat.stages(); ++t)
        for (int s = 1; s <= t; ++s) {
            if (!cat.has_u_block(t, s)) continue;
            const FragmentSpace space = cat.frag(s);
            for (std::int64_t xi = 0; xi < space.size(); ++xi) {
                auto dst = rule.coeff(t, s, xi);
                const std::int64_t base = cat.u_col(t, s, xi);
                for (int j = 0; j < cat.decision_dim(t); ++j)
                    dst[static_cast<size_t>(j)] = x[static_cast<size_t>(base + j)];
            }
        }
    return rule;
}

namespace {

void pin_rule_columns(const VariableCatalog& cat, const RuleCoefficients& rule, SparseLp& lp) {
    require(rule.stages() == cat.stages() && rule.memory() == cat.memory(),
            "rule shape does not match the assembled catalog");
    for (int t = 1; t <= cat.stages(); ++t)
        for (int s = 1; s <= t; ++s) {
            if (!cat.has_u_block(t, s)) continue;
            const FragmentSpace space = cat.frag(s);
            for (std::int64_t xi = 0; xi < space.size(); ++xi) {
                const auto v = rule.coeff(t, s, xi);
                const std::int64_t base = cat.u_col(t, s, xi);
                for (int j = 0; j < cat.decision_dim(t); ++j) {
                    lp.lower[static_cast<size_t>(base + j)] = v[static_cast<size_t>(j)];
                    lp.upper[static_cast<size_t>(base + j)] = v[static_cast<size_t>(j)];
                }
            }
        }
}

} // namespace

SolveResult solve_with_rule_fixed(const AssembledLp& assembled, const RuleCoefficients& rule,
                                  const SolverConfig& config) {
    SparseLp probe = assembled.lp;
    probe.objective.clear();
    pin_rule_columns(assembled.catalog, rule, probe);
    return solve_reference(probe, config);
}

std::vector<Vec> minimal_z_roots(const AssembledLp& assembled, const RuleCoefficients& rule,
                                 const SolverConfig& config) {
    const VariableCatalog& cat = assembled.catalog;
    SparseLp probe;
    probe.n_cols = assembled.lp.n_cols;
    probe.lower = assembled.lp.lower;
    probe.upper = assembled.lp.upper;
    // all rows except the per-stage root bounds
    std::vector<char> drop(assembled.lp.rows.size(), 0);
    for (int t = 1; t <= cat.stages(); ++t) {
        const std::int64_t base = cat.root_row(t);
        for (int i = 0; i < cat.row_dim(t); ++i) drop[static_cast<size_t>(base + i)] = 1;
    }
    for (size_t r = 0; r < assembled.lp.rows.size(); ++r)
        if (!drop[r]) probe.rows.push_back(assembled.lp.rows[r]);
    for (int t = 1; t <= cat.stages(); ++t)
        for (int i = 0; i < cat.row_dim(t); ++i)
            probe.add_objective_term(static_cast<int>(cat.z_col(t, 1, 0) + i), 1.0);
    pin_rule_columns(cat, rule, probe);

    const SolveResult res = solve_reference(probe, config);
    require(res.status == SolveStatus::Optimal,
            "minimal_z_roots: probe LP not optimal (" + to_string(res.status) + ")");
    std::vector<Vec> roots;
    roots.reserve(static_cast<size_t>(cat.stages()));
    for (int t = 1; t <= cat.stages(); ++t) {
        Vec z(static_cast<size_t>(cat.row_dim(t)));
        for (int i = 0; i < cat.row_dim(t); ++i)
            z[static_cast<size_t>(i)] = res.x[static_cast<size_t>(cat.z_col(t, 1, 0) + i)];
        roots.push_back(std::move(z));
    }
    return roots;
}

InfeasibilityDiagnosis diagnose_infeasibility(const AssembledLp& assembled,
                                              const SolverConfig& config) {
    const VariableCatalog& cat = assembled.catalog;
    SparseLp relaxed = assembled.lp;
    relaxed.objective.clear();
    // one slack per root row: z_root - s <= 0, minimize the slack sum
    for (int t = 1; t <= cat.stages(); ++t) {
        const std::int64_t base = cat.root_row(t);
        for (int i = 0; i < cat.row_dim(t); ++i) {
            const int slack = relaxed.add_col(0.0, kInfinity);
            relaxed.add_term(static_cast<int>(base + i), slack, -1.0);
            relaxed.add_objective_term(slack, 1.0);
        }
    }
    const SolveResult res = solve_reference(relaxed, config);
    InfeasibilityDiagnosis diag;
    if (res.status != SolveStatus::Optimal) return diag;
    int slack_col = assembled.lp.n_cols;
    for (int t = 1; t <= cat.stages() && !diag.diagnosed; ++t)
        for (int i = 0; i < cat.row_dim(t); ++i, ++slack_col) {
            const double excess = res.x[static_cast<size_t>(slack_col)];
            if (excess > config.feasibility_tol) {
                diag.diagnosed = true;
                diag.stage = t;
                diag.row = i;
                diag.excess = excess;
                diag.row_name = cat.row_name(cat.root_row(t) + i);
                break;
            }
        }
    return diag;
}

} // namespace cddr
