#include "cddr/policy.hpp"

#include <algorithm>
#include <cmath>

#include "cddr/lp.hpp"
#include "cddr/rng.hpp"

namespace cddr {

namespace {

constexpr std::int64_t kMaxExhaustive = 1'000'000;

// compensated (Kahan) accumulator so weighted means do not depend on
// magnitude ordering more than necessary
struct Kahan {
    double sum = 0.0;
    double carry = 0.0;
    void add(double v) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

} // namespace

ScenarioSet exhaustive_scenarios(const ProblemSpec& spec) {
    spec.validate();
    require(trajectory_count(spec.d, spec.N) <= kMaxExhaustive,
            "exhaustive_scenarios: trajectory count exceeds the guard");
    ScenarioSet set;
    const auto* expected = std::get_if<ExpectedObjective>(&spec.objective);
    std::vector<int> xi(static_cast<size_t>(spec.N), 1);
    do {
        set.trajectories.emplace_back(xi);
        if (expected != nullptr)
            set.weights.push_back(trajectory_probability(*expected, xi));
    } while (next_tuple(xi, spec.d));
    return set;
}

ScenarioSet sample_scenarios(const ProblemSpec& spec, int count, std::uint64_t seed) {
    spec.validate();
    require(count >= 1, "sample_scenarios: count must be >= 1");
    const auto* expected = std::get_if<ExpectedObjective>(&spec.objective);
    require(expected != nullptr, "sample_scenarios: objective carries no sampling distribution");
    ScenarioSet set;
    set.trajectories.reserve(static_cast<size_t>(count));
    SplitMix64 rng(seed);
    for (int k = 0; k < count; ++k) {
        std::vector<int> xi(static_cast<size_t>(spec.N));
        for (int t = 1; t <= spec.N; ++t)
            xi[static_cast<size_t>(t - 1)] =
                rng.categorical(expected->prob[static_cast<size_t>(t - 1)]) + 1;
        set.trajectories.push_back(std::move(xi));
    }
    return set;
}

SimulationReport simulate(const ProblemSpec& spec, const RuleCoefficients& rule,
                          const ScenarioSet& scenarios, const SimulationOptions& options) {
    spec.validate();
    require(rule.stages() == spec.N && rule.memory() == spec.mu && rule.value_dims() == spec.n,
            "simulate: rule shape mismatch");
    require(!scenarios.trajectories.empty(), "simulate: empty scenario set");
    const bool weighted = !scenarios.weights.empty();
    require(!weighted || scenarios.weights.size() == scenarios.trajectories.size(),
            "simulate: weight count mismatch");

    const std::vector<Vec>* cost = nullptr;
    const WorstCaseObjective* wc = nullptr;
    if (const auto* e = std::get_if<ExpectedObjective>(&spec.objective)) cost = &e->cost;
    else if (const auto* s = std::get_if<SaaObjective>(&spec.objective)) cost = &s->cost;
    else wc = &std::get<WorstCaseObjective>(spec.objective);

    SimulationReport rep;
    rep.scenario_count = scenarios.trajectories.size();
    rep.costs.reserve(rep.scenario_count);
    rep.mean_violation.resize(static_cast<size_t>(spec.N));
    for (int t = 1; t <= spec.N; ++t)
        rep.mean_violation[static_cast<size_t>(t - 1)].assign(
            static_cast<size_t>(spec.m[static_cast<size_t>(t - 1)]), 0.0);
    if (options.keep_traces) rep.traces.emplace();

    std::vector<std::vector<Kahan>> viol_acc(static_cast<size_t>(spec.N));
    for (int t = 1; t <= spec.N; ++t)
        viol_acc[static_cast<size_t>(t - 1)].resize(
            static_cast<size_t>(spec.m[static_cast<size_t>(t - 1)]));
    Kahan cost_acc, weight_acc, feasible_acc;

    for (size_t k = 0; k < scenarios.trajectories.size(); ++k) {
        const auto& xi = scenarios.trajectories[k];
        require(static_cast<int>(xi.size()) == spec.N, "simulate: scenario length != N");
        const double w = weighted ? scenarios.weights[k]
                                  : 1.0 / static_cast<double>(rep.scenario_count);

        // decisions per stage
        std::vector<Vec> x(static_cast<size_t>(spec.N));
        for (int t = 1; t <= spec.N; ++t)
            x[static_cast<size_t>(t - 1)] =
                rule.evaluate(std::span<const int>(xi.data(), static_cast<size_t>(t)));

        // cost
        double c = 0.0;
        if (cost != nullptr) {
            for (int t = 1; t <= spec.N; ++t) {
                const Vec& f = (*cost)[static_cast<size_t>(t - 1)];
                const Vec& xt = x[static_cast<size_t>(t - 1)];
                for (size_t j = 0; j < f.size(); ++j) c += f[j] * xt[j];
            }
        } else {
            c = -kInfinity;
            for (const auto& hl : wc->h) {
                double v = 0.0;
                for (int t = 1; t <= spec.N; ++t) {
                    const Vec& h = hl[static_cast<size_t>(t - 1)];
                    const Vec& xt = x[static_cast<size_t>(t - 1)];
                    for (size_t j = 0; j < h.size(); ++j) v += h[j] * xt[j];
                }
                c = std::max(c, v);
            }
        }
        rep.costs.push_back(c);
        cost_acc.add(w * c);
        weight_acc.add(w);

        // constraints
        bool feasible = true;
        for (int t = 1; t <= spec.N; ++t) {
            const int m_t = spec.m[static_cast<size_t>(t - 1)];
            Vec lhs(static_cast<size_t>(m_t), 0.0);
            for (int tau = 1; tau <= t; ++tau) {
                const Mat* block = spec.a_block(t, tau);
                if (block == nullptr) continue;
                const Vec& xt = x[static_cast<size_t>(tau - 1)];
                for (int i = 0; i < m_t; ++i) {
                    double acc = 0.0;
                    for (int j = 0; j < block->cols; ++j) acc += (*block)(i, j) * xt[static_cast<size_t>(j)];
                    lhs[static_cast<size_t>(i)] += acc;
                }
            }
            const Vec b = spec.rhs.evaluate(std::span<const int>(xi.data(), static_cast<size_t>(t)));
            for (int i = 0; i < m_t; ++i) {
                const double excess = lhs[static_cast<size_t>(i)] - b[static_cast<size_t>(i)];
                double viol = 0.0;
                if (excess > options.violation_tol) {
                    feasible = false;
                    viol = b[static_cast<size_t>(i)] != 0.0
                               ? excess / std::abs(b[static_cast<size_t>(i)])
                               : excess;
                }
                viol_acc[static_cast<size_t>(t - 1)][static_cast<size_t>(i)].add(w * viol);
                rep.max_violation = std::max(rep.max_violation, viol);
            }
        }
        if (feasible) feasible_acc.add(w);
        if (rep.traces) rep.traces->push_back(std::move(x));
    }

    const double total_w = weight_acc.sum;
    require(total_w > 0.0, "simulate: total scenario weight is zero");
    rep.mean_cost = cost_acc.sum / total_w;
    rep.feasibility_rate = feasible_acc.sum / total_w;
    for (int t = 1; t <= spec.N; ++t)
        for (int i = 0; i < spec.m[static_cast<size_t>(t - 1)]; ++i)
            rep.mean_violation[static_cast<size_t>(t - 1)][static_cast<size_t>(i)] =
                viol_acc[static_cast<size_t>(t - 1)][static_cast<size_t>(i)].sum / total_w;
    return rep;
}

double expected_cost(const ProblemSpec& spec, const RuleCoefficients& rule) {
    spec.validate();
    require(rule.stages() == spec.N && rule.memory() == spec.mu && rule.value_dims() == spec.n,
            "expected_cost: rule shape mismatch");
    const auto* expected = std::get_if<ExpectedObjective>(&spec.objective);
    require(expected != nullptr, "expected_cost: Expected objective required");

    Kahan total;
    for (int t = 1; t <= spec.N; ++t) {
        const Vec& f = expected->cost[static_cast<size_t>(t - 1)];
        for (int s = 1; s <= t; ++s) {
            const FragmentSpace space = spec.fragment_space(s);
            std::vector<int> frag(static_cast<size_t>(spec.mu));
            for (std::int64_t xi = 0; xi < space.size(); ++xi) {
                space.unindex(xi, frag);
                double p = 1.0;
                for (int off = 0; off < spec.mu; ++off) {
                    const int stage = space.first_stage() + off;
                    if (stage < 1) continue;
                    p *= expected->prob[static_cast<size_t>(stage - 1)]
                                       [static_cast<size_t>(frag[static_cast<size_t>(off)] - 1)];
                }
                if (p == 0.0) continue;
                const auto u = rule.coeff(t, s, xi);
                double dot = 0.0;
                for (size_t j = 0; j < f.size(); ++j) dot += f[j] * u[j];
                total.add(p * dot);
            }
        }
    }
    return total.sum;
}

} // namespace cddr
