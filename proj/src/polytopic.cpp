#include "cddr/polytopic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace cddr {

PolytopeStage::PolytopeStage(int dim, std::vector<Vec> vertices)
    : dim_(dim), vertices_(std::move(vertices)) {
    finish_construction();
}

PolytopeStage::PolytopeStage(int dim, std::vector<Vec> vertices, std::vector<Vec> basis_points)
    : dim_(dim), vertices_(std::move(vertices)), basis_points_(std::move(basis_points)) {
    finish_construction();
}

void PolytopeStage::finish_construction() {
    require(dim_ >= 0, "polytope: negative dimension");
    require(!vertices_.empty(), "polytope: no vertices");
    for (const Vec& v : vertices_)
        require(static_cast<int>(v.size()) == dim_, "polytope: vertex dimension mismatch");
    require(nu() <= vertex_count(),
            "polytope: need at least nu = dim + 1 vertices to affinely span");

    // affine span check: rank of vertex differences must be dim
    if (dim_ > 0) {
        Mat diff(vertex_count() - 1, dim_);
        for (int j = 1; j < vertex_count(); ++j)
            for (int c = 0; c < dim_; ++c)
                diff(j - 1, c) = vertices_[static_cast<size_t>(j)][static_cast<size_t>(c)] -
                                 vertices_[0][static_cast<size_t>(c)];
        require(matrix_rank(diff) == dim_, "polytope: vertices do not affinely span the space");
    }

    if (!basis_points_.empty()) {
        require(static_cast<int>(basis_points_.size()) == nu(),
                "polytope: affine basis needs nu points");
        for (const Vec& b : basis_points_)
            require(static_cast<int>(b.size()) == dim_, "polytope: basis point dimension mismatch");
        // lambda(zeta) solves [B; 1...1] lambda = [zeta; 1]; keep the inverse
        const int n = nu();
        Mat system(n, n);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < n; ++j)
                system(i, j) = basis_points_[static_cast<size_t>(j)][static_cast<size_t>(i)];
        for (int j = 0; j < n; ++j) system(dim_, j) = 1.0;
        coord_solver_ = Mat(n, n);
        Vec e(static_cast<size_t>(n), 0.0), col;
        for (int j = 0; j < n; ++j) {
            std::fill(e.begin(), e.end(), 0.0);
            e[static_cast<size_t>(j)] = 1.0;
            require(solve_dense(system, e, col), "polytope: affine basis is degenerate");
            for (int i = 0; i < n; ++i) coord_solver_(i, j) = col[static_cast<size_t>(i)];
        }
    }

    vertex_lambda_ = Mat(vertex_count(), nu());
    for (int j = 0; j < vertex_count(); ++j) {
        const Vec l = lambda(vertices_[static_cast<size_t>(j)]);
        for (int i = 0; i < nu(); ++i) vertex_lambda_(j, i) = l[static_cast<size_t>(i)];
    }
}

Vec PolytopeStage::lambda(std::span<const double> zeta) const {
    require(static_cast<int>(zeta.size()) == dim_, "lambda: point dimension mismatch");
    Vec out(static_cast<size_t>(nu()), 0.0);
    if (default_basis()) {
        double sum = 0.0;
        for (int i = 0; i < dim_; ++i) {
            out[static_cast<size_t>(i)] = zeta[static_cast<size_t>(i)];
            sum += zeta[static_cast<size_t>(i)];
        }
        out[static_cast<size_t>(dim_)] = 1.0 - sum;
        return out;
    }
    // coord_solver * [zeta; 1]
    for (int i = 0; i < nu(); ++i) {
        double acc = coord_solver_(i, dim_);
        for (int j = 0; j < dim_; ++j) acc += coord_solver_(i, j) * zeta[static_cast<size_t>(j)];
        out[static_cast<size_t>(i)] = acc;
    }
    return out;
}

PolyAffineTable::PolyAffineTable(int stages, int memory, std::vector<int> value_dims,
                                 std::vector<int> nu)
    : n_stages_(stages), memory_(memory), dims_(std::move(value_dims)), nu_(std::move(nu)) {
    require(stages >= 0 && memory >= 1, "poly-affine table: bad shape");
    require(static_cast<int>(dims_.size()) == stages, "poly-affine table: value_dims size");
    require(static_cast<int>(nu_.size()) == stages, "poly-affine table: nu size");
    table_.resize(static_cast<size_t>(stages));
    for (int t = 1; t <= stages; ++t) {
        table_[static_cast<size_t>(t - 1)].resize(static_cast<size_t>(t));
        for (int tau = 1; tau <= t; ++tau)
            table_[static_cast<size_t>(t - 1)][static_cast<size_t>(tau - 1)].assign(
                static_cast<size_t>(index_space(tau).size()) * dims_[static_cast<size_t>(t - 1)], 0.0);
    }
}

std::span<double> PolyAffineTable::coeff(int t, int tau, std::int64_t kappa) {
    require(t >= 1 && t <= n_stages_ && tau >= 1 && tau <= t, "poly-affine table: bad (t, tau)");
    const int dim = dims_[static_cast<size_t>(t - 1)];
    auto& flat = table_[static_cast<size_t>(t - 1)][static_cast<size_t>(tau - 1)];
    require(kappa >= 0 && static_cast<size_t>(kappa + 1) * dim <= flat.size(),
            "poly-affine table: kappa out of range");
    return {flat.data() + kappa * dim, static_cast<size_t>(dim)};
}

std::span<const double> PolyAffineTable::coeff(int t, int tau, std::int64_t kappa) const {
    return const_cast<PolyAffineTable*>(this)->coeff(t, tau, kappa);
}

PolyAffineTable PolyAffineTable::widened(int target_memory) const {
    require(target_memory >= memory_, "PolyAffineTable::widened: target depth below current");
    if (target_memory == memory_) return *this;
    PolyAffineTable out(n_stages_, target_memory, dims_, nu_);
    for (int t = 1; t <= n_stages_; ++t)
        for (int tau = 1; tau <= t; ++tau) {
            const FragmentSpace wide = out.index_space(tau);
            const FragmentSpace narrow = index_space(tau);
            std::vector<int> kappa(static_cast<size_t>(target_memory));
            for (std::int64_t k = 0; k < wide.size(); ++k) {
                wide.unindex(k, kappa);
                const std::span<const int> suffix{kappa.data() + (target_memory - memory_),
                                                  static_cast<size_t>(memory_)};
                const auto src = coeff(t, tau, narrow.index(suffix));
                auto dst = out.coeff(t, tau, k);
                std::copy(src.begin(), src.end(), dst.begin());
            }
        }
    return out;
}

std::vector<int> PolyProblem::cardinalities() const {
    std::vector<int> d;
    d.reserve(stages.size());
    for (const auto& s : stages) d.push_back(s.vertex_count());
    return d;
}

std::vector<int> PolyProblem::nu() const {
    std::vector<int> v;
    v.reserve(stages.size());
    for (const auto& s : stages) v.push_back(s.nu());
    return v;
}

void PolyProblem::validate() const {
    require(N >= 1 && mu >= 1, "poly problem: bad dimensions");
    require(static_cast<int>(n.size()) == N && static_cast<int>(m.size()) == N &&
                static_cast<int>(stages.size()) == N,
            "poly problem: per-stage arrays must have length N");
    for (const auto& [key, block] : A) {
        const auto [t, tau] = key;
        require(t >= 1 && t <= N && tau >= 1 && tau <= t, "poly problem: A block out of range");
        require(block.rows == m[static_cast<size_t>(t - 1)] &&
                    block.cols == n[static_cast<size_t>(tau - 1)],
                "poly problem: A block shape mismatch");
    }
    require(rhs.stages() == N && rhs.memory() == mu, "poly problem: rhs shape mismatch");
    require(rhs.value_dims() == m, "poly problem: rhs value dims mismatch");
    require(rhs.nu() == nu(), "poly problem: rhs nu mismatch");
}

namespace {

// weight of (xi window, kappa) at anchor tau:
//   prod_s lambda_{kappa_s}(chi_{tau-mu+s, xi_{tau-mu+s}})
double scenario_weight(const std::vector<PolytopeStage>& stages, int first_stage,
                       std::span<const int> frag, std::span<const int> kappa) {
    double w = 1.0;
    for (size_t off = 0; off < frag.size(); ++off) {
        const int stage = first_stage + static_cast<int>(off);
        if (stage < 1) continue; // padded stage contributes lambda_1 = 1
        const Mat& vl = stages[static_cast<size_t>(stage - 1)].vertex_lambda();
        w *= vl(frag[off] - 1, kappa[off] - 1);
    }
    return w;
}

} // namespace

Vec eval_polyaffine(const PolyAffineTable& table, const std::vector<PolytopeStage>& stages,
                    const std::vector<Vec>& zeta) {
    const int t = static_cast<int>(zeta.size());
    require(t >= 1 && t <= table.stages(), "eval_polyaffine: trajectory length out of range");
    require(static_cast<int>(stages.size()) >= t, "eval_polyaffine: stage list too short");
    const int mu = table.memory();

    // per-stage lambda vectors of the supplied points
    std::vector<Vec> lam(static_cast<size_t>(t));
    for (int s = 1; s <= t; ++s)
        lam[static_cast<size_t>(s - 1)] = stages[static_cast<size_t>(s - 1)].lambda(
            zeta[static_cast<size_t>(s - 1)]);

    Vec out(static_cast<size_t>(table.value_dim(t)), 0.0);
    for (int tau = 1; tau <= t; ++tau) {
        const FragmentSpace space = table.index_space(tau);
        std::vector<int> kappa(static_cast<size_t>(mu));
        for (std::int64_t k = 0; k < space.size(); ++k) {
            space.unindex(k, kappa);
            double w = 1.0;
            for (int off = 0; off < mu; ++off) {
                const int stage = space.first_stage() + off;
                if (stage < 1) continue;
                w *= lam[static_cast<size_t>(stage - 1)]
                        [static_cast<size_t>(kappa[static_cast<size_t>(off)] - 1)];
            }
            if (w == 0.0) continue;
            const auto g = table.coeff(t, tau, k);
            for (size_t i = 0; i < out.size(); ++i) out[i] += w * g[i];
        }
    }
    return out;
}

std::vector<Vec> scenario_trajectory(const std::vector<PolytopeStage>& stages,
                                     std::span<const int> xi) {
    require(xi.size() <= stages.size(), "scenario_trajectory: trajectory longer than stage list");
    std::vector<Vec> zeta;
    zeta.reserve(xi.size());
    for (size_t s = 0; s < xi.size(); ++s) {
        const auto& stage = stages[s];
        require(xi[s] >= 1 && xi[s] <= stage.vertex_count(),
                "scenario_trajectory: vertex index out of range");
        zeta.push_back(stage.vertex(xi[s] - 1));
    }
    return zeta;
}

ProblemSpec discretize(const PolyProblem& poly) {
    poly.validate();
    ProblemSpec spec;
    spec.N = poly.N;
    spec.mu = poly.mu;
    spec.n = poly.n;
    spec.m = poly.m;
    spec.d = poly.cardinalities();
    spec.A = poly.A;
    spec.objective = poly.objective;
    spec.rhs = AdditiveRhs(poly.N, poly.mu, poly.m, spec.d);

    const std::vector<int> nu = poly.nu();
    for (int t = 1; t <= poly.N; ++t) {
        for (int tau = 1; tau <= t; ++tau) {
            const FragmentSpace xi_space = spec.rhs.fragment_space(tau);
            const FragmentSpace kappa_space = poly.rhs.index_space(tau);
            std::vector<int> frag(static_cast<size_t>(poly.mu));
            std::vector<int> kappa(static_cast<size_t>(poly.mu));
            for (std::int64_t xi = 0; xi < xi_space.size(); ++xi) {
                xi_space.unindex(xi, frag);
                auto beta = spec.rhs.coeff(t, tau, xi);
                for (std::int64_t k = 0; k < kappa_space.size(); ++k) {
                    kappa_space.unindex(k, kappa);
                    const double w =
                        scenario_weight(poly.stages, xi_space.first_stage(), frag, kappa);
                    if (w == 0.0) continue;
                    const auto g = poly.rhs.coeff(t, tau, k);
                    for (size_t i = 0; i < beta.size(); ++i) beta[i] += w * g[i];
                }
            }
        }
    }
    spec.validate();
    return spec;
}

RuleCoefficients v_to_u(const PolyAffineCoefficients& v, const std::vector<PolytopeStage>& stages) {
    require(static_cast<int>(stages.size()) == v.stages(), "v_to_u: stage list size mismatch");
    std::vector<int> d;
    d.reserve(stages.size());
    for (const auto& s : stages) d.push_back(s.vertex_count());

    RuleCoefficients u(v.stages(), v.memory(), v.value_dims(), d);
    for (int t = 1; t <= v.stages(); ++t)
        for (int tau = 1; tau <= t; ++tau) {
            const FragmentSpace xi_space = u.fragment_space(tau);
            const FragmentSpace kappa_space = v.index_space(tau);
            std::vector<int> frag(static_cast<size_t>(v.memory()));
            std::vector<int> kappa(static_cast<size_t>(v.memory()));
            for (std::int64_t xi = 0; xi < xi_space.size(); ++xi) {
                xi_space.unindex(xi, frag);
                auto dst = u.coeff(t, tau, xi);
                for (std::int64_t k = 0; k < kappa_space.size(); ++k) {
                    kappa_space.unindex(k, kappa);
                    const double w =
                        scenario_weight(stages, xi_space.first_stage(), frag, kappa);
                    if (w == 0.0) continue;
                    const auto src = v.coeff(t, tau, k);
                    for (size_t i = 0; i < dst.size(); ++i) dst[i] += w * src[i];
                }
            }
        }
    return u;
}

PolyAffineTable affine_to_polyaffine(const std::vector<Vec>& p, const std::vector<Mat>& P,
                                     const std::vector<PolytopeStage>& stages) {
    const int N = static_cast<int>(stages.size());
    require(static_cast<int>(p.size()) == N && static_cast<int>(P.size()) == N,
            "affine_to_polyaffine: per-stage map count mismatch");
    std::vector<int> dims, nu;
    for (int t = 1; t <= N; ++t) {
        dims.push_back(static_cast<int>(p[static_cast<size_t>(t - 1)].size()));
        nu.push_back(stages[static_cast<size_t>(t - 1)].nu());
        require(dims.back() == dims.front(),
                "affine_to_polyaffine: the per-stage maps must share one value dimension");
        require(P[static_cast<size_t>(t - 1)].rows == dims.back() &&
                    P[static_cast<size_t>(t - 1)].cols == stages[static_cast<size_t>(t - 1)].dim(),
                "affine_to_polyaffine: map shape mismatch at stage " + std::to_string(t));
    }
    // memory 1: the tau-th summand depends on zeta_tau alone, and the
    // coefficient at kappa is the stage-tau map evaluated at basis point
    // kappa (default basis lists the standard vectors then the origin)
    PolyAffineTable table(N, 1, dims, nu);
    for (int t = 1; t <= N; ++t)
        for (int tau = 1; tau <= t; ++tau) {
            const auto& stage = stages[static_cast<size_t>(tau - 1)];
            for (int k = 0; k < stage.nu(); ++k) {
                Vec point;
                if (stage.default_basis()) {
                    point.assign(static_cast<size_t>(stage.dim()), 0.0);
                    if (k < stage.dim()) point[static_cast<size_t>(k)] = 1.0;
                } else {
                    point = stage.basis_points()[static_cast<size_t>(k)];
                }
                const Vec val = matvec(P[static_cast<size_t>(tau - 1)], point);
                auto dst = table.coeff(t, tau, k);
                for (size_t i = 0; i < dst.size(); ++i)
                    dst[i] = p[static_cast<size_t>(tau - 1)][i] + val[i];
            }
        }
    return table;
}

PolySolveResult solve_polytopic(const PolyProblem& poly, const SolverConfig& config) {
    poly.validate();
    const ProblemSpec spec = discretize(poly);
    AssembledLp assembled = build_discrete_lp(spec);
    const VariableCatalog& cat = assembled.catalog;
    SparseLp& lp = assembled.lp;

    // append V columns and the coefficient-map equalities
    //   u^t_{tau,xi} - sum_kappa w(xi, kappa) v^t_{tau,kappa} = 0
    const std::vector<int> nu = poly.nu();
    std::vector<std::vector<std::int64_t>> v_start(static_cast<size_t>(poly.N));
    for (int t = 1; t <= poly.N; ++t) {
        v_start[static_cast<size_t>(t - 1)].assign(static_cast<size_t>(t), -1);
        for (int tau = 1; tau <= t; ++tau) {
            const FragmentSpace kappa_space = FragmentSpace(tau, poly.mu, nu);
            v_start[static_cast<size_t>(t - 1)][static_cast<size_t>(tau - 1)] = lp.add_cols(
                static_cast<int>(kappa_space.size()) * spec.n[static_cast<size_t>(t - 1)]);
        }
    }
    for (int t = 1; t <= poly.N; ++t)
        for (int tau = 1; tau <= t; ++tau) {
            const FragmentSpace xi_space = cat.frag(tau);
            const FragmentSpace kappa_space = FragmentSpace(tau, poly.mu, nu);
            const int width = spec.n[static_cast<size_t>(t - 1)];
            std::vector<int> frag(static_cast<size_t>(poly.mu));
            std::vector<int> kappa(static_cast<size_t>(poly.mu));
            for (std::int64_t xi = 0; xi < xi_space.size(); ++xi) {
                xi_space.unindex(xi, frag);
                const std::int64_t u_base = cat.u_col(t, tau, xi);
                std::vector<int> rows(static_cast<size_t>(width));
                for (int j = 0; j < width; ++j) {
                    rows[static_cast<size_t>(j)] = lp.add_row(Relation::Equal, 0.0);
                    lp.add_term(rows[static_cast<size_t>(j)], static_cast<int>(u_base + j), 1.0);
                }
                for (std::int64_t k = 0; k < kappa_space.size(); ++k) {
                    kappa_space.unindex(k, kappa);
                    const double w =
                        scenario_weight(poly.stages, xi_space.first_stage(), frag, kappa);
                    if (w == 0.0) continue;
                    const std::int64_t v_base =
                        v_start[static_cast<size_t>(t - 1)][static_cast<size_t>(tau - 1)] + k * width;
                    for (int j = 0; j < width; ++j)
                        lp.add_term(rows[static_cast<size_t>(j)], static_cast<int>(v_base + j), -w);
                }
            }
        }

    const SolveResult res = solve_reference(lp, config);
    PolySolveResult out;
    out.status = res.status;
    out.value = res.value;
    out.iterations = res.iterations;
    out.message = res.message;
    if (res.status == SolveStatus::Optimal) {
        out.u = extract_rule(assembled, res.x);
        out.v = PolyAffineCoefficients(poly.N, poly.mu, spec.n, nu);
        for (int t = 1; t <= poly.N; ++t)
            for (int tau = 1; tau <= t; ++tau) {
                const FragmentSpace kappa_space = FragmentSpace(tau, poly.mu, nu);
                const int width = spec.n[static_cast<size_t>(t - 1)];
                for (std::int64_t k = 0; k < kappa_space.size(); ++k) {
                    auto dst = out.v.coeff(t, tau, k);
                    const std::int64_t base =
                        v_start[static_cast<size_t>(t - 1)][static_cast<size_t>(tau - 1)] + k * width;
                    for (int j = 0; j < width; ++j)
                        dst[static_cast<size_t>(j)] = res.x[static_cast<size_t>(base + j)];
                }
            }
    }
    return out;
}

} // namespace cddr
