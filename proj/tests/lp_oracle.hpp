#pragma once

// Vertex-enumeration optimum for small LPs: enumerate every choice of
// n_cols active constraints among rows and finite bounds, solve the square
// system, keep the best feasible point. Independent of the simplex path.

#include "cddr/lp.hpp"
#include "cddr/rng.hpp"

namespace cddr::testing {

struct VertexOracle {
    bool feasible = false;
    double value = 0.0;
};

inline VertexOracle vertex_enumeration_optimum(const SparseLp& lp) {
    const int n = lp.n_cols;
    struct Plane {
        Vec a;
        double b;
    };
    std::vector<Plane> planes;
    for (const auto& row : lp.rows) {
        Plane p{Vec(static_cast<size_t>(n), 0.0), row.rhs};
        for (const auto& [c, v] : row.terms) p.a[static_cast<size_t>(c)] += v;
        planes.push_back(std::move(p));
    }
    for (int j = 0; j < n; ++j) {
        if (lp.lower[static_cast<size_t>(j)] != -kInfinity) {
            Plane p{Vec(static_cast<size_t>(n), 0.0), lp.lower[static_cast<size_t>(j)]};
            p.a[static_cast<size_t>(j)] = 1.0;
            planes.push_back(std::move(p));
        }
        if (lp.upper[static_cast<size_t>(j)] != kInfinity) {
            Plane p{Vec(static_cast<size_t>(n), 0.0), lp.upper[static_cast<size_t>(j)]};
            p.a[static_cast<size_t>(j)] = 1.0;
            planes.push_back(std::move(p));
        }
    }
    const Vec c = lp.dense_objective();

    VertexOracle best;
    const int total = static_cast<int>(planes.size());
    if (total < n) return best;
    std::vector<int> idx(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<size_t>(i)] = i;
    while (true) {
        Mat sys(n, n);
        Vec rhs(static_cast<size_t>(n));
        for (int r = 0; r < n; ++r) {
            const Plane& p = planes[static_cast<size_t>(idx[static_cast<size_t>(r)])];
            for (int j = 0; j < n; ++j) sys(r, j) = p.a[static_cast<size_t>(j)];
            rhs[static_cast<size_t>(r)] = p.b;
        }
        Vec x;
        if (solve_dense(sys, rhs, x, 1e-9)) {
            const ResidualReport rep = check_residuals(lp, x, 1e-8);
            if (rep.feasible) {
                double v = 0.0;
                for (int j = 0; j < n; ++j) v += c[static_cast<size_t>(j)] * x[static_cast<size_t>(j)];
                if (!best.feasible || v < best.value) {
                    best.feasible = true;
                    best.value = v;
                }
            }
        }
        int pos = n - 1;
        while (pos >= 0 && idx[static_cast<size_t>(pos)] == total - n + pos) --pos;
        if (pos < 0) break;
        ++idx[static_cast<size_t>(pos)];
        for (int q = pos + 1; q < n; ++q)
            idx[static_cast<size_t>(q)] = idx[static_cast<size_t>(q - 1)] + 1;
    }
    return best;
}

/// Random LP with a finite box and rows cut through its interior, so it is
/// feasible and bounded by construction.
inline SparseLp random_boxed_lp(SplitMix64& rng) {
    SparseLp lp;
    const int n = rng.uniform_int(2, 5);
    const int m = rng.uniform_int(2, 6);
    for (int j = 0; j < n; ++j) {
        const double lo = rng.uniform(-3.0, 0.0);
        lp.add_col(lo, lo + rng.uniform(0.5, 4.0));
    }
    Vec center(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j)
        center[static_cast<size_t>(j)] =
            0.5 * (lp.lower[static_cast<size_t>(j)] + lp.upper[static_cast<size_t>(j)]);
    for (int r = 0; r < m; ++r) {
        const int row = lp.add_row(Relation::LessEqual, 0.0);
        double at_center = 0.0;
        for (int j = 0; j < n; ++j) {
            if (rng.next_double() < 0.6) {
                const double a = rng.uniform(-2.0, 2.0);
                lp.add_term(row, j, a);
                at_center += a * center[static_cast<size_t>(j)];
            }
        }
        lp.rows[static_cast<size_t>(row)].rhs = at_center + rng.uniform(0.1, 2.0);
    }
    for (int j = 0; j < n; ++j)
        if (rng.next_double() < 0.8) lp.add_objective_term(j, rng.uniform(-2.0, 2.0));
    return lp;
}

} // namespace cddr::testing
