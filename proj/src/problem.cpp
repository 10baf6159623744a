#include "cddr/problem.hpp"

#include <cmath>

namespace cddr {

AdditiveCoefficients::AdditiveCoefficients(int stages, int memory, std::vector<int> value_dims,
                                           std::vector<int> cardinalities)
    : n_stages_(stages), memory_(memory), dims_(std::move(value_dims)), d_(std::move(cardinalities)) {
    require(stages >= 0, "AdditiveCoefficients: negative stage count");
    require(memory >= 1, "AdditiveCoefficients: memory depth must be >= 1");
    require(static_cast<int>(dims_.size()) == stages, "AdditiveCoefficients: value_dims size != stages");
    require(static_cast<int>(d_.size()) == stages, "AdditiveCoefficients: cardinalities size != stages");
    table_.resize(static_cast<size_t>(stages));
    for (int t = 1; t <= stages; ++t) {
        require(dims_[static_cast<size_t>(t - 1)] >= 1, "AdditiveCoefficients: value dim must be >= 1");
        table_[static_cast<size_t>(t - 1)].resize(static_cast<size_t>(t));
        for (int s = 1; s <= t; ++s) {
            const auto space = fragment_space(s);
            table_[static_cast<size_t>(t - 1)][static_cast<size_t>(s - 1)].assign(
                static_cast<size_t>(space.size()) * dims_[static_cast<size_t>(t - 1)], 0.0);
        }
    }
}

FragmentSpace AdditiveCoefficients::fragment_space(int s) const {
    return FragmentSpace(s, memory_, d_);
}

std::span<double> AdditiveCoefficients::coeff(int t, int s, std::int64_t xi) {
    require(t >= 1 && t <= n_stages_ && s >= 1 && s <= t, "AdditiveCoefficients::coeff: bad (t, s)");
    const int dim = dims_[static_cast<size_t>(t - 1)];
    auto& flat = table_[static_cast<size_t>(t - 1)][static_cast<size_t>(s - 1)];
    require(xi >= 0 && static_cast<size_t>(xi + 1) * dim <= flat.size(),
            "AdditiveCoefficients::coeff: fragment index out of range");
    return {flat.data() + xi * dim, static_cast<size_t>(dim)};
}

std::span<const double> AdditiveCoefficients::coeff(int t, int s, std::int64_t xi) const {
    return const_cast<AdditiveCoefficients*>(this)->coeff(t, s, xi);
}

Vec AdditiveCoefficients::evaluate(std::span<const int> trajectory) const {
    const int t = static_cast<int>(trajectory.size());
    require(t >= 1 && t <= n_stages_, "AdditiveCoefficients::evaluate: trajectory length out of range");
    Vec out(static_cast<size_t>(dims_[static_cast<size_t>(t - 1)]), 0.0);
    for (int s = 1; s <= t; ++s) {
        const auto space = fragment_space(s);
        const auto c = coeff(t, s, space.index_in_trajectory(trajectory));
        for (size_t i = 0; i < out.size(); ++i) out[i] += c[i];
    }
    return out;
}

AdditiveCoefficients AdditiveCoefficients::widened(int target_memory) const {
    require(target_memory >= memory_,
            "AdditiveCoefficients::widened: target depth smaller than current depth");
    if (target_memory == memory_) return *this;
    AdditiveCoefficients out(n_stages_, target_memory, dims_, d_);
    for (int t = 1; t <= n_stages_; ++t) {
        for (int s = 1; s <= t; ++s) {
            const auto wide = out.fragment_space(s);
            const auto narrow = fragment_space(s);
            std::vector<int> frag(static_cast<size_t>(target_memory));
            for (std::int64_t xi = 0; xi < wide.size(); ++xi) {
                wide.unindex(xi, frag);
                // trailing memory_ entries form the original fragment
                const std::span<const int> suffix{frag.data() + (target_memory - memory_),
                                                  static_cast<size_t>(memory_)};
                const auto src = coeff(t, s, narrow.index(suffix));
                auto dst = out.coeff(t, s, xi);
                std::copy(src.begin(), src.end(), dst.begin());
            }
        }
    }
    return out;
}

namespace {

void validate_objective(const ObjectiveSpec& objective, int N, const std::vector<int>& n,
                        const std::vector<int>& d) {
    if (const auto* e = std::get_if<ExpectedObjective>(&objective)) {
        require(static_cast<int>(e->cost.size()) == N, "objective: cost table must cover all stages");
        require(static_cast<int>(e->prob.size()) == N, "objective: marginals must cover all stages");
        for (int t = 1; t <= N; ++t) {
            require(static_cast<int>(e->cost[t - 1].size()) == n[static_cast<size_t>(t - 1)],
                    "objective: cost dimension mismatch at stage " + std::to_string(t));
            const auto& p = e->prob[t - 1];
            require(static_cast<int>(p.size()) == d[static_cast<size_t>(t - 1)],
                    "objective: marginal size mismatch at stage " + std::to_string(t));
            double sum = 0.0;
            for (double v : p) {
                require(v >= 0.0, "objective: negative probability");
                sum += v;
            }
            require(std::abs(sum - 1.0) <= 1e-12, "objective: marginal does not sum to 1");
        }
    } else if (const auto* s = std::get_if<SaaObjective>(&objective)) {
        require(static_cast<int>(s->cost.size()) == N, "objective: cost table must cover all stages");
        for (int t = 1; t <= N; ++t)
            require(static_cast<int>(s->cost[t - 1].size()) == n[static_cast<size_t>(t - 1)],
                    "objective: cost dimension mismatch at stage " + std::to_string(t));
        require(!s->scenarios.empty(), "objective: SAA scenario list is empty");
        require(s->weights.size() == s->scenarios.size(), "objective: SAA weights size mismatch");
        double sum = 0.0;
        for (double w : s->weights) {
            require(w >= 0.0, "objective: negative SAA weight");
            sum += w;
        }
        require(std::abs(sum - 1.0) <= 1e-9, "objective: SAA weights do not sum to 1");
        for (const auto& sc : s->scenarios) {
            require(static_cast<int>(sc.size()) == N, "objective: SAA scenario length != N");
            for (int t = 1; t <= N; ++t)
                require(sc[static_cast<size_t>(t - 1)] >= 1 &&
                            sc[static_cast<size_t>(t - 1)] <= d[static_cast<size_t>(t - 1)],
                        "objective: SAA scenario entry out of range");
        }
    } else if (const auto* w = std::get_if<WorstCaseObjective>(&objective)) {
        require(!w->h.empty(), "objective: worst-case functional list is empty");
        for (const auto& hl : w->h) {
            require(static_cast<int>(hl.size()) == N, "objective: functional must cover all stages");
            for (int t = 1; t <= N; ++t)
                require(static_cast<int>(hl[t - 1].size()) == n[static_cast<size_t>(t - 1)],
                        "objective: functional dimension mismatch at stage " + std::to_string(t));
        }
    }
}

void validate_dims(int N, int mu, const std::vector<int>& n, const std::vector<int>& m,
                   const std::vector<int>& d) {
    require(N >= 1, "spec: stage count must be >= 1");
    require(mu >= 1, "spec: memory depth must be >= 1");
    require(static_cast<int>(n.size()) == N && static_cast<int>(m.size()) == N &&
                static_cast<int>(d.size()) == N,
            "spec: dimension arrays must have length N");
    for (int t = 1; t <= N; ++t) {
        require(n[static_cast<size_t>(t - 1)] >= 1, "spec: n_t must be >= 1");
        require(m[static_cast<size_t>(t - 1)] >= 1, "spec: m_t must be >= 1");
        require(d[static_cast<size_t>(t - 1)] >= 1, "spec: d_t must be >= 1");
    }
}

} // namespace

void ProblemSpec::validate() const {
    validate_dims(N, mu, n, m, d);
    for (const auto& [key, block] : A) {
        const auto [t, tau] = key;
        require(t >= 1 && t <= N && tau >= 1 && tau <= t,
                "spec: A block index (t=" + std::to_string(t) + ", tau=" + std::to_string(tau) +
                    ") out of the lower-triangular range");
        require(block.rows == m[static_cast<size_t>(t - 1)] &&
                    block.cols == n[static_cast<size_t>(tau - 1)],
                "spec: A block (t=" + std::to_string(t) + ", tau=" + std::to_string(tau) +
                    ") has wrong shape");
    }
    require(rhs.stages() == N, "spec: rhs stage count mismatch");
    require(rhs.memory() == mu, "spec: rhs memory depth differs from mu (widen first)");
    require(rhs.value_dims() == m, "spec: rhs value dimensions differ from m");
    require(rhs.cardinalities() == d, "spec: rhs cardinalities differ from d");
    validate_objective(objective, N, n, d);
}

double trajectory_probability(const ExpectedObjective& obj, std::span<const int> trajectory) {
    double p = 1.0;
    for (size_t s = 0; s < trajectory.size(); ++s) {
        const auto& marginal = obj.prob.at(s);
        const int v = trajectory[s];
        require(v >= 1 && v <= static_cast<int>(marginal.size()),
                "trajectory_probability: entry out of range");
        p *= marginal[static_cast<size_t>(v - 1)];
    }
    return p;
}

void UncertainMatrixProblem::validate() const {
    validate_dims(N, mu, n, m, d);
    for (const auto& [key, mats] : A) {
        const auto [t, s] = key;
        require(t >= 1 && t <= N && s >= 1 && s <= t, "spec: uncertain A index out of range");
        const auto space = fragment_space(s);
        require(static_cast<std::int64_t>(mats.size()) == space.size(),
                "spec: uncertain A block (t=" + std::to_string(t) + ", s=" + std::to_string(s) +
                    ") must supply one matrix per fragment");
        for (const auto& mat : mats)
            require(mat.rows == m[static_cast<size_t>(t - 1)] &&
                        mat.cols == n[static_cast<size_t>(s - 1)],
                    "spec: uncertain A block (t=" + std::to_string(t) + ", s=" + std::to_string(s) +
                        ") has wrong shape");
    }
    require(rhs.stages() == N && rhs.memory() == mu, "spec: rhs shape mismatch");
    require(rhs.value_dims() == m && rhs.cardinalities() == d, "spec: rhs shape mismatch");
    require(!std::holds_alternative<WorstCaseObjective>(objective),
            "spec: worst-case objective is not supported with uncertain matrices");
    validate_objective(objective, N, n, d);
}

} // namespace cddr
