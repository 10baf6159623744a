#include "cddr/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace cddr {

namespace {

Vec vec_from_json(const Json& j) { return j.get<Vec>(); }

std::vector<int> ints_from_json(const Json& j) { return j.get<std::vector<int>>(); }

Mat mat_from_json(const Json& j, int rows, int cols, const std::string& what) {
    require(j.is_array() && static_cast<int>(j.size()) == rows, what + ": expected " +
                                                                    std::to_string(rows) + " rows");
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        const Json& row = j[static_cast<size_t>(i)];
        require(row.is_array() && static_cast<int>(row.size()) == cols,
                what + ": expected " + std::to_string(cols) + " columns");
        for (int c = 0; c < cols; ++c) m(i, c) = row[static_cast<size_t>(c)].get<double>();
    }
    return m;
}

Json mat_to_json(const Mat& m) {
    Json rows = Json::array();
    for (int i = 0; i < m.rows; ++i) {
        Json row = Json::array();
        for (int j = 0; j < m.cols; ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

const Json& field(const Json& j, const char* key) {
    require(j.contains(key), std::string("missing field '") + key + "'");
    return j.at(key);
}

ObjectiveSpec objective_from_json(const Json& j, int N, const std::vector<int>& /*n*/) {
    const std::string kind = field(j, "kind").get<std::string>();
    if (kind == "expected") {
        ExpectedObjective obj;
        for (const Json& f : field(j, "f")) obj.cost.push_back(vec_from_json(f));
        for (const Json& p : field(j, "P")) obj.prob.push_back(vec_from_json(p));
        return obj;
    }
    if (kind == "saa") {
        SaaObjective obj;
        for (const Json& f : field(j, "f")) obj.cost.push_back(vec_from_json(f));
        for (const Json& s : field(j, "scenarios")) {
            obj.scenarios.push_back(ints_from_json(field(s, "xi")));
            obj.weights.push_back(field(s, "weight").get<double>());
        }
        return obj;
    }
    if (kind == "worstcase") {
        WorstCaseObjective obj;
        for (const Json& hl : field(j, "h")) {
            std::vector<Vec> stage_vectors;
            for (const Json& ht : hl) stage_vectors.push_back(vec_from_json(ht));
            require(static_cast<int>(stage_vectors.size()) == N,
                    "objective: functional must cover all stages");
            obj.h.push_back(std::move(stage_vectors));
        }
        return obj;
    }
    fail("objective: unknown kind '" + kind + "'");
}

Json objective_to_json(const ObjectiveSpec& objective) {
    Json j;
    if (const auto* e = std::get_if<ExpectedObjective>(&objective)) {
        j["kind"] = "expected";
        j["f"] = e->cost;
        j["P"] = e->prob;
    } else if (const auto* s = std::get_if<SaaObjective>(&objective)) {
        j["kind"] = "saa";
        j["f"] = s->cost;
        Json scenarios = Json::array();
        for (size_t l = 0; l < s->scenarios.size(); ++l)
            scenarios.push_back(Json{{"xi", s->scenarios[l]}, {"weight", s->weights[l]}});
        j["scenarios"] = std::move(scenarios);
    } else {
        const auto& w = std::get<WorstCaseObjective>(objective);
        j["kind"] = "worstcase";
        j["h"] = w.h;
    }
    return j;
}

} // namespace

ProblemSpec problem_from_json(const Json& j) {
    ProblemSpec spec;
    spec.N = field(j, "N").get<int>();
    spec.mu = field(j, "mu").get<int>();
    spec.n = ints_from_json(field(j, "n"));
    spec.m = ints_from_json(field(j, "m"));
    spec.d = ints_from_json(field(j, "d"));
    require(static_cast<int>(spec.n.size()) == spec.N && static_cast<int>(spec.m.size()) == spec.N &&
                static_cast<int>(spec.d.size()) == spec.N,
            "problem: dimension arrays must have length N");

    for (const Json& blk : field(j, "A")) {
        const int t = field(blk, "t").get<int>();
        const int tau = field(blk, "tau").get<int>();
        require(t >= 1 && t <= spec.N && tau >= 1 && tau <= t, "problem: A block index out of range");
        Mat m(spec.m[static_cast<size_t>(t - 1)], spec.n[static_cast<size_t>(tau - 1)]);
        for (const Json& trip : field(blk, "triplets")) {
            require(trip.is_array() && trip.size() == 3, "problem: triplet must be [row, col, value]");
            const int r = trip[0].get<int>(), c = trip[1].get<int>();
            require(r >= 1 && r <= m.rows && c >= 1 && c <= m.cols,
                    "problem: triplet index out of range in A block");
            m(r - 1, c - 1) += trip[2].get<double>(); // duplicate triplets sum
        }
        require(spec.A.emplace(std::make_pair(t, tau), std::move(m)).second,
                "problem: duplicate A block (t=" + std::to_string(t) + ", tau=" + std::to_string(tau) + ")");
    }

    spec.rhs = AdditiveRhs(spec.N, spec.mu, spec.m, spec.d);
    if (j.contains("beta")) {
        for (const Json& entry : j.at("beta")) {
            const int t = field(entry, "t").get<int>();
            const int s = field(entry, "s").get<int>();
            require(t >= 1 && t <= spec.N && s >= 1 && s <= t, "problem: beta index out of range");
            const auto xi_tuple = ints_from_json(field(entry, "xi"));
            const FragmentSpace space = spec.rhs.fragment_space(s);
            const Vec values = vec_from_json(field(entry, "values"));
            auto dst = spec.rhs.coeff(t, s, space.index(xi_tuple));
            require(values.size() == dst.size(), "problem: beta value dimension mismatch");
            std::copy(values.begin(), values.end(), dst.begin());
        }
    }

    spec.objective = objective_from_json(field(j, "objective"), spec.N, spec.n);
    spec.validate();
    return spec;
}

Json problem_to_json(const ProblemSpec& spec) {
    Json j;
    j["N"] = spec.N;
    j["mu"] = spec.mu;
    j["n"] = spec.n;
    j["m"] = spec.m;
    j["d"] = spec.d;

    Json blocks = Json::array();
    for (const auto& [key, mat] : spec.A) {
        Json triplets = Json::array();
        for (int r = 0; r < mat.rows; ++r)
            for (int c = 0; c < mat.cols; ++c)
                if (mat(r, c) != 0.0) triplets.push_back(Json::array({r + 1, c + 1, mat(r, c)}));
        blocks.push_back(Json{{"t", key.first}, {"tau", key.second}, {"triplets", std::move(triplets)}});
    }
    j["A"] = std::move(blocks);

    Json beta = Json::array();
    for (int t = 1; t <= spec.N; ++t)
        for (int s = 1; s <= t; ++s) {
            const FragmentSpace space = spec.rhs.fragment_space(s);
            for (std::int64_t xi = 0; xi < space.size(); ++xi) {
                const auto values = spec.rhs.coeff(t, s, xi);
                bool nonzero = false;
                for (double v : values) nonzero |= v != 0.0;
                if (!nonzero) continue;
                beta.push_back(Json{{"t", t},
                                    {"s", s},
                                    {"xi", space.fragment(xi)},
                                    {"values", Vec(values.begin(), values.end())}});
            }
        }
    j["beta"] = std::move(beta);
    j["objective"] = objective_to_json(spec.objective);
    return j;
}

bool is_polytopic_problem(const Json& j) { return j.contains("stages"); }

PolyProblem poly_problem_from_json(const Json& j) {
    PolyProblem poly;
    poly.N = field(j, "N").get<int>();
    poly.mu = field(j, "mu").get<int>();
    poly.n = ints_from_json(field(j, "n"));
    poly.m = ints_from_json(field(j, "m"));

    for (const Json& st : field(j, "stages")) {
        const int dim = field(st, "dim").get<int>();
        std::vector<Vec> vertices;
        for (const Json& v : field(st, "vertices")) vertices.push_back(vec_from_json(v));
        if (st.contains("basis")) {
            std::vector<Vec> basis;
            for (const Json& b : st.at("basis")) basis.push_back(vec_from_json(b));
            poly.stages.emplace_back(dim, std::move(vertices), std::move(basis));
        } else {
            poly.stages.emplace_back(dim, std::move(vertices));
        }
    }
    require(static_cast<int>(poly.stages.size()) == poly.N, "poly problem: stage count mismatch");

    for (const Json& blk : field(j, "A")) {
        const int t = field(blk, "t").get<int>();
        const int tau = field(blk, "tau").get<int>();
        require(t >= 1 && t <= poly.N && tau >= 1 && tau <= t, "poly problem: A block out of range");
        Mat m(poly.m[static_cast<size_t>(t - 1)], poly.n[static_cast<size_t>(tau - 1)]);
        for (const Json& trip : field(blk, "triplets")) {
            const int r = trip[0].get<int>(), c = trip[1].get<int>();
            require(r >= 1 && r <= m.rows && c >= 1 && c <= m.cols,
                    "poly problem: triplet index out of range");
            m(r - 1, c - 1) += trip[2].get<double>();
        }
        poly.A.emplace(std::make_pair(t, tau), std::move(m));
    }

    poly.rhs = PolyAffineRhs(poly.N, poly.mu, poly.m, poly.nu());
    for (const Json& entry : field(j, "rhs_poly")) {
        const int t = field(entry, "t").get<int>();
        const int s = field(entry, "s").get<int>();
        require(t >= 1 && t <= poly.N && s >= 1 && s <= t, "poly problem: rhs_poly index out of range");
        const auto kappa = ints_from_json(field(entry, "kappa"));
        const Vec values = vec_from_json(field(entry, "values"));
        auto dst = poly.rhs.coeff(t, s, poly.rhs.index_space(s).index(kappa));
        require(values.size() == dst.size(), "poly problem: rhs_poly value dimension mismatch");
        std::copy(values.begin(), values.end(), dst.begin());
    }

    poly.objective = objective_from_json(field(j, "objective"), poly.N, poly.n);
    poly.validate();
    return poly;
}

Json poly_problem_to_json(const PolyProblem& poly) {
    Json j;
    j["N"] = poly.N;
    j["mu"] = poly.mu;
    j["n"] = poly.n;
    j["m"] = poly.m;
    Json stages = Json::array();
    for (const auto& st : poly.stages) {
        Json s;
        s["dim"] = st.dim();
        s["vertices"] = st.vertices();
        if (!st.default_basis()) s["basis"] = st.basis_points();
        stages.push_back(std::move(s));
    }
    j["stages"] = std::move(stages);

    Json blocks = Json::array();
    for (const auto& [key, mat] : poly.A) {
        Json triplets = Json::array();
        for (int r = 0; r < mat.rows; ++r)
            for (int c = 0; c < mat.cols; ++c)
                if (mat(r, c) != 0.0) triplets.push_back(Json::array({r + 1, c + 1, mat(r, c)}));
        blocks.push_back(Json{{"t", key.first}, {"tau", key.second}, {"triplets", std::move(triplets)}});
    }
    j["A"] = std::move(blocks);

    Json rhs = Json::array();
    for (int t = 1; t <= poly.N; ++t)
        for (int s = 1; s <= t; ++s) {
            const FragmentSpace space = poly.rhs.index_space(s);
            for (std::int64_t k = 0; k < space.size(); ++k) {
                const auto values = poly.rhs.coeff(t, s, k);
                bool nonzero = false;
                for (double v : values) nonzero |= v != 0.0;
                if (!nonzero) continue;
                rhs.push_back(Json{{"t", t},
                                   {"s", s},
                                   {"kappa", space.fragment(k)},
                                   {"values", Vec(values.begin(), values.end())}});
            }
        }
    j["rhs_poly"] = std::move(rhs);
    j["objective"] = objective_to_json(poly.objective);
    return j;
}

RuleCoefficients rule_from_json(const Json& j) {
    const int N = field(j, "N").get<int>();
    const int mu = field(j, "mu").get<int>();
    const auto n = ints_from_json(field(j, "n"));
    const auto d = ints_from_json(field(j, "d"));
    RuleCoefficients rule(N, mu, n, d);
    for (const Json& entry : field(j, "u")) {
        const int t = field(entry, "t").get<int>();
        const int tau = field(entry, "tau").get<int>();
        require(t >= 1 && t <= N && tau >= 1 && tau <= t, "rule: index out of range");
        const auto xi = ints_from_json(field(entry, "xi"));
        const Vec values = vec_from_json(field(entry, "values"));
        auto dst = rule.coeff(t, tau, rule.fragment_space(tau).index(xi));
        require(values.size() == dst.size(), "rule: value dimension mismatch");
        std::copy(values.begin(), values.end(), dst.begin());
    }
    return rule;
}

Json rule_to_json(const RuleCoefficients& rule) {
    Json j;
    j["kind"] = "discrete";
    j["N"] = rule.stages();
    j["mu"] = rule.memory();
    j["n"] = rule.value_dims();
    j["d"] = rule.cardinalities();
    Json table = Json::array();
    for (int t = 1; t <= rule.stages(); ++t)
        for (int tau = 1; tau <= t; ++tau) {
            const FragmentSpace space = rule.fragment_space(tau);
            for (std::int64_t xi = 0; xi < space.size(); ++xi) {
                const auto values = rule.coeff(t, tau, xi);
                table.push_back(Json{{"t", t},
                                     {"tau", tau},
                                     {"xi", space.fragment(xi)},
                                     {"values", Vec(values.begin(), values.end())}});
            }
        }
    j["u"] = std::move(table);
    return j;
}

Json poly_rule_to_json(const PolyAffineCoefficients& v, const RuleCoefficients& u) {
    Json j = rule_to_json(u);
    j["kind"] = "polyaffine";
    j["nu"] = v.nu();
    Json table = Json::array();
    for (int t = 1; t <= v.stages(); ++t)
        for (int tau = 1; tau <= t; ++tau) {
            const FragmentSpace space = v.index_space(tau);
            for (std::int64_t k = 0; k < space.size(); ++k) {
                const auto values = v.coeff(t, tau, k);
                table.push_back(Json{{"t", t},
                                     {"tau", tau},
                                     {"kappa", space.fragment(k)},
                                     {"values", Vec(values.begin(), values.end())}});
            }
        }
    j["v"] = std::move(table);
    return j;
}

HydroParams hydro_params_from_json(const Json& j) {
    HydroParams p;
    p.K = field(j, "K").get<int>();
    p.N = field(j, "N").get<int>();
    p.v0 = vec_from_json(field(j, "v0"));
    if (j.contains("rho")) p.final_level_factor = j.at("rho").get<double>();
    if (j.contains("rcr")) p.rcr_relaxation = j.at("rcr").get<bool>();
    for (const Json& st : field(j, "stages")) {
        HydroStage s;
        s.demand = vec_from_json(field(st, "demand"));
        s.thermal_cost = vec_from_json(field(st, "thermal_cost"));
        s.deficit_penalty = vec_from_json(field(st, "deficit_penalty"));
        s.g_diag = vec_from_json(field(st, "g_diag"));
        s.v_min = vec_from_json(field(st, "v_min"));
        s.v_max = vec_from_json(field(st, "v_max"));
        s.h_max = vec_from_json(field(st, "h_max"));
        s.w_max = vec_from_json(field(st, "w_max"));
        if (st.contains("rcr_penalty")) s.rcr_penalty = vec_from_json(st.at("rcr_penalty"));
        p.stage.push_back(std::move(s));
    }
    p.validate();
    return p;
}

ParModel par_model_from_json(const Json& j) {
    ParModel m;
    m.K = field(j, "K").get<int>();
    m.N = field(j, "N").get<int>();
    m.first_index = field(j, "first_index").get<int>();
    for (const Json& th : field(j, "theta")) m.theta.push_back(vec_from_json(th));
    for (const Json& h : field(j, "history")) m.history.push_back(vec_from_json(h));
    for (const Json& st : field(j, "stages")) {
        const int lag = field(st, "lag").get<int>();
        m.lag.push_back(lag);
        std::vector<Mat> bs;
        for (const Json& b : field(st, "B")) bs.push_back(mat_from_json(b, m.K, m.K, "B"));
        require(static_cast<int>(bs.size()) == lag, "par model: B count != lag");
        m.coeff.push_back(std::move(bs));
        m.noise_gain.push_back(mat_from_json(field(st, "C"), m.K, m.K, "C"));
        std::vector<Vec> pts;
        for (const Json& chi : field(st, "support")) pts.push_back(vec_from_json(chi));
        m.support.push_back(std::move(pts));
        m.prob.push_back(vec_from_json(field(st, "prob")));
    }
    m.validate();
    return m;
}

Json hydro_to_json(const HydroParams& params, const ParModel& model) {
    Json j;
    j["K"] = params.K;
    j["N"] = params.N;
    j["v0"] = params.v0;
    j["rho"] = params.final_level_factor;
    j["rcr"] = params.rcr_relaxation;
    Json stages = Json::array();
    for (const auto& s : params.stage) {
        Json st;
        st["demand"] = s.demand;
        st["thermal_cost"] = s.thermal_cost;
        st["deficit_penalty"] = s.deficit_penalty;
        st["g_diag"] = s.g_diag;
        st["v_min"] = s.v_min;
        st["v_max"] = s.v_max;
        st["h_max"] = s.h_max;
        st["w_max"] = s.w_max;
        if (!s.rcr_penalty.empty()) st["rcr_penalty"] = s.rcr_penalty;
        stages.push_back(std::move(st));
    }
    j["stages"] = std::move(stages);

    Json inflow;
    inflow["K"] = model.K;
    inflow["N"] = model.N;
    inflow["first_index"] = model.first_index;
    inflow["theta"] = model.theta;
    inflow["history"] = model.history;
    Json model_stages = Json::array();
    for (int t = 2; t <= model.N; ++t) {
        Json st;
        st["t"] = t;
        st["lag"] = model.lag_at(t);
        Json bs = Json::array();
        for (int l = 1; l <= model.lag_at(t); ++l) bs.push_back(mat_to_json(model.coeff_at(t, l)));
        st["B"] = std::move(bs);
        st["C"] = mat_to_json(model.noise_gain_at(t));
        st["support"] = model.support[static_cast<size_t>(t - 2)];
        st["prob"] = model.prob[static_cast<size_t>(t - 2)];
        model_stages.push_back(std::move(st));
    }
    inflow["stages"] = std::move(model_stages);
    j["inflow"] = std::move(inflow);
    return j;
}

Json size_report_to_json(const SizeReport& report) {
    return Json{{"n_u", report.n_u},     {"n_y", report.n_y},       {"n_z", report.n_z},
                {"n_w", report.n_w},     {"n_eq", report.n_eq},     {"n_ineq", report.n_ineq},
                {"columns", report.total_columns()}, {"rows", report.total_rows()}};
}

Json simulation_report_to_json(const SimulationReport& report) {
    Json j;
    j["scenarios"] = report.scenario_count;
    j["mean_cost"] = report.mean_cost;
    j["feasibility_rate"] = report.feasibility_rate;
    j["max_violation"] = report.max_violation;
    j["mean_violation"] = report.mean_violation;
    j["costs"] = report.costs;
    return j;
}

std::string simulation_report_table(const SimulationReport& report) {
    std::ostringstream os;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-24s %14zu\n", "scenarios", report.scenario_count);
    os << buf;
    std::snprintf(buf, sizeof(buf), "%-24s %14.6e\n", "mean cost", report.mean_cost);
    os << buf;
    std::snprintf(buf, sizeof(buf), "%-24s %14.6f\n", "feasibility rate", report.feasibility_rate);
    os << buf;
    std::snprintf(buf, sizeof(buf), "%-24s %14.6e\n", "max violation", report.max_violation);
    os << buf;
    os << "mean relative violation by stage and row\n";
    for (size_t t = 0; t < report.mean_violation.size(); ++t) {
        std::snprintf(buf, sizeof(buf), "  t=%-3zu", t + 1);
        os << buf;
        for (double v : report.mean_violation[t]) {
            std::snprintf(buf, sizeof(buf), " %10.3e", v);
            os << buf;
        }
        os << '\n';
    }
    return os.str();
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), "cannot open '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        fail("cannot parse '" + path + "': " + e.what());
    }
    return j;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), "cannot write '" + path + "'");
    out << content;
    require(static_cast<bool>(out), "write failed for '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), "cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace cddr
