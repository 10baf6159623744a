#include "cddr/oracle.hpp"

#include <algorithm>
#include <cstdio>

namespace cddr {

namespace {

constexpr std::int64_t kMaxTrajectories = 1'000'000;
constexpr std::int64_t kMaxTreeNodes = 100'000;

} // namespace

Vec brute_force_max(const ProblemSpec& spec, const RuleCoefficients& rule, int t) {
    spec.validate();
    require(t >= 1 && t <= spec.N, "brute_force_max: stage out of range");
    require(rule.stages() == spec.N && rule.memory() == spec.mu && rule.value_dims() == spec.n,
            "brute_force_max: rule shape mismatch");
    require(trajectory_count(spec.d, t) <= kMaxTrajectories,
            "brute_force_max: trajectory count exceeds the enumeration guard");

    const int m_t = spec.m[static_cast<size_t>(t - 1)];

    // y^t_{s,xi} tables, fragment-major
    std::vector<Vec> y(static_cast<size_t>(t));
    std::vector<FragmentSpace> spaces;
    for (int s = 1; s <= t; ++s) {
        const FragmentSpace space = spec.fragment_space(s);
        spaces.push_back(space);
        Vec& table = y[static_cast<size_t>(s - 1)];
        table.assign(static_cast<size_t>(space.size()) * m_t, 0.0);
        for (std::int64_t xi = 0; xi < space.size(); ++xi) {
            double* dst = table.data() + static_cast<std::int64_t>(m_t) * xi;
            const auto beta = spec.rhs.coeff(t, s, xi);
            for (int i = 0; i < m_t; ++i) dst[i] = -beta[static_cast<size_t>(i)];
            for (int q = s; q <= t; ++q) {
                const Mat* block = spec.a_block(t, q);
                if (block == nullptr) continue;
                const auto u = rule.coeff(q, s, xi);
                for (int i = 0; i < m_t; ++i) {
                    double acc = 0.0;
                    for (int j = 0; j < block->cols; ++j) acc += (*block)(i, j) * u[static_cast<size_t>(j)];
                    dst[i] += acc;
                }
            }
        }
    }

    Vec best(static_cast<size_t>(m_t), -kInfinity);
    std::vector<int> xi(static_cast<size_t>(t), 1);
    Vec sum(static_cast<size_t>(m_t));
    do {
        std::fill(sum.begin(), sum.end(), 0.0);
        for (int s = 1; s <= t; ++s) {
            const std::int64_t idx = spaces[static_cast<size_t>(s - 1)].index_in_trajectory(xi);
            const double* src = y[static_cast<size_t>(s - 1)].data() + static_cast<std::int64_t>(m_t) * idx;
            for (int i = 0; i < m_t; ++i) sum[static_cast<size_t>(i)] += src[i];
        }
        for (int i = 0; i < m_t; ++i)
            best[static_cast<size_t>(i)] = std::max(best[static_cast<size_t>(i)], sum[static_cast<size_t>(i)]);
    } while (next_tuple(xi, std::span<const int>(spec.d.data(), static_cast<size_t>(t))));
    return best;
}

Vec brute_force_max_memoryless(const UncertainMatrixProblem& spec, const RuleCoefficients& rule,
                               int t) {
    spec.validate();
    require(t >= 1 && t <= spec.N, "brute_force_max: stage out of range");
    require(trajectory_count(spec.d, t) <= kMaxTrajectories,
            "brute_force_max: trajectory count exceeds the enumeration guard");
    const int m_t = spec.m[static_cast<size_t>(t - 1)];

    std::vector<Vec> y(static_cast<size_t>(t));
    std::vector<FragmentSpace> spaces;
    for (int s = 1; s <= t; ++s) {
        const FragmentSpace space = spec.fragment_space(s);
        spaces.push_back(space);
        Vec& table = y[static_cast<size_t>(s - 1)];
        table.assign(static_cast<size_t>(space.size()) * m_t, 0.0);
        const auto blocks = spec.A.find({t, s});
        for (std::int64_t xi = 0; xi < space.size(); ++xi) {
            double* dst = table.data() + static_cast<std::int64_t>(m_t) * xi;
            const auto beta = spec.rhs.coeff(t, s, xi);
            for (int i = 0; i < m_t; ++i) dst[i] = -beta[static_cast<size_t>(i)];
            if (blocks != spec.A.end()) {
                const Mat& a = blocks->second[static_cast<size_t>(xi)];
                const auto u = rule.coeff(s, s, xi);
                for (int i = 0; i < m_t; ++i) {
                    double acc = 0.0;
                    for (int j = 0; j < a.cols; ++j) acc += a(i, j) * u[static_cast<size_t>(j)];
                    dst[i] += acc;
                }
            }
        }
    }

    Vec best(static_cast<size_t>(m_t), -kInfinity);
    std::vector<int> xi(static_cast<size_t>(t), 1);
    Vec sum(static_cast<size_t>(m_t));
    do {
        std::fill(sum.begin(), sum.end(), 0.0);
        for (int s = 1; s <= t; ++s) {
            const std::int64_t idx = spaces[static_cast<size_t>(s - 1)].index_in_trajectory(xi);
            const double* src = y[static_cast<size_t>(s - 1)].data() + static_cast<std::int64_t>(m_t) * idx;
            for (int i = 0; i < m_t; ++i) sum[static_cast<size_t>(i)] += src[i];
        }
        for (int i = 0; i < m_t; ++i)
            best[static_cast<size_t>(i)] = std::max(best[static_cast<size_t>(i)], sum[static_cast<size_t>(i)]);
    } while (next_tuple(xi, std::span<const int>(spec.d.data(), static_cast<size_t>(t))));
    return best;
}

ScenarioTreeLp scenario_tree_lp(const ProblemSpec& spec) {
    spec.validate();
    const auto* expected = std::get_if<ExpectedObjective>(&spec.objective);
    require(expected != nullptr, "scenario_tree_lp: Expected objective required");

    std::int64_t node_count = 0;
    for (int t = 1; t <= spec.N; ++t) node_count += trajectory_count(spec.d, t);
    require(node_count <= kMaxTreeNodes, "scenario_tree_lp: node count exceeds the guard");

    ScenarioTreeLp out;
    out.nodes.reserve(static_cast<size_t>(node_count));
    out.node_col.reserve(static_cast<size_t>(node_count));

    // depth-first lexicographic node enumeration with parent links
    std::vector<std::int64_t> parent;
    {
        std::vector<int> prefix;
        struct Frame {
            int next_value;
        };
        // iterative DFS
        std::vector<Frame> stack;
        stack.push_back({1});
        prefix.clear();
        std::vector<std::int64_t> path_nodes; // node id per depth along the current path
        while (!stack.empty()) {
            Frame& f = stack.back();
            const int depth = static_cast<int>(stack.size()) - 1; // prefix length
            if (depth == spec.N || f.next_value > spec.d[static_cast<size_t>(depth)]) {
                stack.pop_back();
                if (!prefix.empty()) prefix.pop_back();
                if (!path_nodes.empty()) path_nodes.pop_back();
                continue;
            }
            prefix.push_back(f.next_value);
            ++f.next_value;
            const std::int64_t id = static_cast<std::int64_t>(out.nodes.size());
            out.nodes.emplace_back(static_cast<int>(prefix.size()), prefix);
            parent.push_back(path_nodes.empty() ? -1 : path_nodes.back());
            path_nodes.push_back(id);
            stack.push_back({1});
        }
    }

    SparseLp& lp = out.lp;
    for (const auto& [t, prefix] : out.nodes)
        out.node_col.push_back(lp.add_cols(spec.n[static_cast<size_t>(t - 1)]));

    // per-node constraint block over the ancestor chain
    for (size_t k = 0; k < out.nodes.size(); ++k) {
        const auto& [t, prefix] = out.nodes[k];
        const int m_t = spec.m[static_cast<size_t>(t - 1)];
        const Vec b = spec.rhs.evaluate(prefix);
        const int base = lp.add_row(Relation::LessEqual, b[0]);
        for (int i = 1; i < m_t; ++i) lp.add_row(Relation::LessEqual, b[static_cast<size_t>(i)]);
        // walk ancestors: node at stage tau on the path of node k
        std::int64_t cur = static_cast<std::int64_t>(k);
        while (cur >= 0) {
            const auto& [tau, pfx] = out.nodes[static_cast<size_t>(cur)];
            if (const Mat* block = spec.a_block(t, tau)) {
                const std::int64_t col = out.node_col[static_cast<size_t>(cur)];
                for (int i = 0; i < m_t; ++i)
                    for (int j = 0; j < block->cols; ++j)
                        lp.add_term(base + i, static_cast<int>(col + j), (*block)(i, j));
            }
            cur = parent[static_cast<size_t>(cur)];
        }
    }

    // expected cost weighted by path probability
    for (size_t k = 0; k < out.nodes.size(); ++k) {
        const auto& [t, prefix] = out.nodes[k];
        const double p = trajectory_probability(*expected, prefix);
        if (p == 0.0) continue;
        const Vec& f = expected->cost[static_cast<size_t>(t - 1)];
        for (int j = 0; j < static_cast<int>(f.size()); ++j)
            lp.add_objective_term(static_cast<int>(out.node_col[k] + j), p * f[static_cast<size_t>(j)]);
    }

    // names: X_t{t}_p{k}_{j} by node order, rows N_t{t}_p{k}_{i}
    out.names.problem = "TREE";
    char buf[48];
    for (size_t k = 0; k < out.nodes.size(); ++k) {
        const auto& [t, prefix] = out.nodes[k];
        for (int j = 0; j < spec.n[static_cast<size_t>(t - 1)]; ++j) {
            std::snprintf(buf, sizeof(buf), "X_t%d_p%zu_%d", t, k, j);
            out.names.col.emplace_back(buf);
        }
    }
    for (size_t k = 0; k < out.nodes.size(); ++k) {
        const auto& [t, prefix] = out.nodes[k];
        for (int i = 0; i < spec.m[static_cast<size_t>(t - 1)]; ++i) {
            std::snprintf(buf, sizeof(buf), "N_t%d_p%zu_%d", t, k, i);
            out.names.row.emplace_back(buf);
        }
    }
    return out;
}

} // namespace cddr
