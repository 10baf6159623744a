// Command-line front end: generate, reformulate, solve, simulate, export and
// verify multistage problems with constant-depth decision rules.
//
// Every subcommand is file-driven and deterministic: identical inputs and
// seeds produce byte-identical outputs. Errors leave a one-line JSON object
// on stderr and a nonzero exit status.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cddr/io.hpp"
#include "cddr/mps.hpp"
#include "cddr/oracle.hpp"
#include "cddr/plugin.hpp"
#include "cddr/rng.hpp"

namespace {

using namespace cddr;

ProblemSpec load_problem_file(const std::string& path, int mu_override) {
    const Json j = read_json_file(path);
    ProblemSpec spec;
    if (is_polytopic_problem(j))
        spec = discretize(poly_problem_from_json(j));
    else
        spec = problem_from_json(j);
    if (mu_override > 0) {
        require(mu_override >= spec.mu,
                "--mu " + std::to_string(mu_override) + " is below the problem's depth " +
                    std::to_string(spec.mu));
        spec.rhs = spec.rhs.widened(mu_override);
        spec.mu = mu_override;
    }
    return spec;
}

std::string json_line(const Json& j) { return j.dump() + "\n"; }

SolveResult dispatch_solve(const AssembledLp& assembled, const std::string& solver) {
    if (solver == "reference") return solve_reference(assembled.lp);
    if (solver.rfind("plugin:", 0) == 0)
        return solve_via_plugin(assembled.lp, lp_names(assembled), solver.substr(7));
    fail("unknown solver '" + solver + "' (use reference or plugin:NAME)");
}

RuleCoefficients random_rule(const ProblemSpec& spec, std::uint64_t seed, double scale) {
    SplitMix64 rng(seed);
    RuleCoefficients rule(spec.N, spec.mu, spec.n, spec.d);
    for (int t = 1; t <= spec.N; ++t)
        for (int s = 1; s <= t; ++s) {
            const FragmentSpace space = spec.fragment_space(s);
            for (std::int64_t xi = 0; xi < space.size(); ++xi)
                for (double& v : rule.coeff(t, s, xi)) v = rng.uniform(-scale, scale);
        }
    return rule;
}

int cmd_build(const std::string& problem_path, int mu, const std::string& out_path,
              const std::string& format) {
    const ProblemSpec spec = load_problem_file(problem_path, mu);
    const SizeReport counts = count_sizes(spec);
    if (out_path.empty()) {
        std::cout << json_line(size_report_to_json(counts));
        return 0;
    }
    const AssembledLp assembled = build_discrete_lp(spec);
    if (format == "mps") {
        write_text_file(out_path, write_mps_string(assembled.lp, lp_names(assembled)));
    } else if (format == "json") {
        Json j;
        j["columns"] = assembled.lp.n_cols;
        Json rows = Json::array();
        for (const auto& row : assembled.lp.rows) {
            Json r;
            r["rel"] = row.rel == Relation::Equal ? "eq" : "le";
            r["rhs"] = row.rhs;
            Json terms = Json::array();
            for (const auto& [c, v] : row.terms) terms.push_back(Json::array({c, v}));
            r["terms"] = std::move(terms);
            rows.push_back(std::move(r));
        }
        j["rows"] = std::move(rows);
        Json obj = Json::array();
        for (const auto& [c, v] : assembled.lp.objective) obj.push_back(Json::array({c, v}));
        j["objective"] = std::move(obj);
        write_text_file(out_path, j.dump(2) + "\n");
    } else {
        fail("unknown LP format '" + format + "' (use mps or json)");
    }
    std::cout << json_line(size_report_to_json(counts));
    return 0;
}

int cmd_solve(const std::string& problem_path, int mu, const std::string& solver,
              const std::string& out_path) {
    const Json j = read_json_file(problem_path);
    Json result;
    if (is_polytopic_problem(j) && mu <= 0 && solver == "reference") {
        // native polytopic solve keeps the v-coefficients; a depth override
        // or an external solver routes through the discrete reduction below
        const PolyProblem poly = poly_problem_from_json(j);
        const PolySolveResult res = solve_polytopic(poly);
        result["status"] = to_string(res.status);
        result["iterations"] = res.iterations;
        if (res.status == SolveStatus::Optimal) {
            result["value"] = res.value;
            if (!out_path.empty())
                write_text_file(out_path, poly_rule_to_json(res.v, res.u).dump(2) + "\n");
        } else {
            if (!res.message.empty()) result["message"] = res.message;
            std::cerr << json_line(Json{{"error", "solve did not reach optimality"},
                                        {"status", to_string(res.status)}});
            std::cout << json_line(result);
            return 1;
        }
        std::cout << json_line(result);
        return 0;
    }

    const ProblemSpec spec = load_problem_file(problem_path, mu);
    const AssembledLp assembled = build_discrete_lp(spec);
    const SolveResult res = dispatch_solve(assembled, solver);
    result["status"] = to_string(res.status);
    result["iterations"] = res.iterations;
    if (res.status != SolveStatus::Optimal) {
        if (!res.message.empty()) result["message"] = res.message;
        Json error{{"error", "solve did not reach optimality"}, {"status", to_string(res.status)}};
        if (res.status == SolveStatus::Infeasible) {
            const InfeasibilityDiagnosis diag = diagnose_infeasibility(assembled);
            if (diag.diagnosed)
                error["first_violated"] = Json{{"stage", diag.stage},
                                               {"row", diag.row + 1},
                                               {"name", diag.row_name},
                                               {"excess", diag.excess}};
        }
        std::cerr << json_line(error);
        std::cout << json_line(result);
        return 1;
    }
    result["value"] = res.value;
    if (!out_path.empty())
        write_text_file(out_path, rule_to_json(extract_rule(assembled, res.x)).dump(2) + "\n");
    std::cout << json_line(result);
    return 0;
}

int cmd_simulate(const std::string& problem_path, const std::string& rule_path, int mu,
                 int scenario_count, std::uint64_t seed, bool exhaustive,
                 const std::string& format) {
    const ProblemSpec spec = load_problem_file(problem_path, mu);
    RuleCoefficients rule = rule_from_json(read_json_file(rule_path));
    if (rule.memory() < spec.mu) rule = rule.widened(spec.mu);
    const ScenarioSet scenarios =
        exhaustive ? exhaustive_scenarios(spec) : sample_scenarios(spec, scenario_count, seed);
    const SimulationReport report = simulate(spec, rule, scenarios);
    if (format == "table")
        std::cout << simulation_report_table(report);
    else
        std::cout << json_line(simulation_report_to_json(report));
    return 0;
}

int cmd_hydro_gen(const std::string& params_path, const std::string& out_path, int default_K,
                  int default_N, int default_d, bool default_rcr, std::uint64_t seed) {
    HydroParams params;
    ParModel model;
    if (!params_path.empty()) {
        const Json j = read_json_file(params_path);
        params = hydro_params_from_json(j);
        require(j.contains("inflow"), "hydro parameter file is missing the 'inflow' model");
        model = par_model_from_json(j.at("inflow"));
    } else {
        params = default_test_params(default_K, default_N, default_rcr);
        model = default_test_par_model(default_K, default_N, default_d, seed);
    }
    const ProblemSpec spec = generate(params, model);
    write_text_file(out_path, problem_to_json(spec).dump(2) + "\n");
    std::cout << json_line(Json{{"written", out_path},
                                {"N", spec.N},
                                {"n_t", spec.n[0]},
                                {"m_t", spec.m[0]},
                                {"d", spec.d}});
    return 0;
}

int cmd_oracle(const std::string& problem_path, int mu, const std::string& mode, int rules,
               std::uint64_t seed) {
    const ProblemSpec spec = load_problem_file(problem_path, mu);
    if (mode == "tree") {
        const ScenarioTreeLp tree = scenario_tree_lp(spec);
        const SolveResult tree_res = solve_reference(tree.lp);
        require(tree_res.status == SolveStatus::Optimal,
                "tree LP not optimal: " + to_string(tree_res.status));
        const AssembledLp assembled = build_discrete_lp(spec);
        const SolveResult cddr_res = solve_reference(assembled.lp);
        require(cddr_res.status == SolveStatus::Optimal,
                "reformulated LP not optimal: " + to_string(cddr_res.status));
        const double gap = cddr_res.value - tree_res.value;
        const double rel = std::abs(gap) / std::max(1.0, std::abs(tree_res.value));
        std::cout << json_line(Json{{"mode", "tree"},
                                    {"tree_value", tree_res.value},
                                    {"cddr_value", cddr_res.value},
                                    {"gap", gap},
                                    {"relative_gap", rel},
                                    {"lower_bound_respected", gap >= -1e-7}});
        return 0;
    }
    if (mode == "feasibility") {
        const AssembledLp assembled = build_discrete_lp(spec);
        int agreements = 0;
        Json draws = Json::array();
        for (int k = 0; k < rules; ++k) {
            const RuleCoefficients rule = random_rule(spec, seed + static_cast<std::uint64_t>(k), 1.0);
            bool brute_feasible = true;
            for (int t = 1; t <= spec.N && brute_feasible; ++t) {
                const Vec worst = brute_force_max(spec, rule, t);
                for (double v : worst) brute_feasible &= v <= 1e-9;
            }
            const SolveResult lp_res = solve_with_rule_fixed(assembled, rule);
            require(lp_res.status != SolveStatus::Failed, "feasibility probe failed: " + lp_res.message);
            const bool lp_feasible = lp_res.status == SolveStatus::Optimal;
            if (lp_feasible == brute_feasible) ++agreements;
            draws.push_back(Json{{"draw", k},
                                 {"lp_feasible", lp_feasible},
                                 {"brute_force_feasible", brute_feasible}});
        }
        std::cout << json_line(Json{{"mode", "feasibility"},
                                    {"rules", rules},
                                    {"agreements", agreements},
                                    {"all_agree", agreements == rules},
                                    {"draws", draws}});
        return agreements == rules ? 0 : 1;
    }
    fail("unknown oracle mode '" + mode + "' (use feasibility or tree)");
}

int cmd_export_mps(const std::string& problem_path, int mu, const std::string& out_path) {
    const ProblemSpec spec = load_problem_file(problem_path, mu);
    const AssembledLp assembled = build_discrete_lp(spec);
    write_text_file(out_path, write_mps_string(assembled.lp, lp_names(assembled)));
    std::cout << json_line(Json{{"written", out_path},
                                {"columns", assembled.lp.n_cols},
                                {"rows", assembled.lp.rows.size()}});
    return 0;
}

int cmd_solve_mps(const std::string& mps_path, const std::string& sol_path) {
    std::ifstream in(mps_path);
    require(static_cast<bool>(in), "cannot open '" + mps_path + "'");
    const ParsedMps parsed = parse_mps(in);
    const SolveResult res = solve_reference(parsed.lp);
    std::ostringstream os;
    write_solution_file(res, parsed.names, os);
    write_text_file(sol_path, os.str());
    std::cout << json_line(Json{{"status", to_string(res.status)},
                                {"value", res.value},
                                {"iterations", res.iterations}});
    return res.status == SolveStatus::Optimal || res.status == SolveStatus::Infeasible ||
                   res.status == SolveStatus::Unbounded
               ? 0
               : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"constant-depth decision rule toolkit"};
    app.require_subcommand(1);

    std::string problem_path, rule_path, out_path, params_path, mps_path, sol_path;
    std::string format = "mps";
    std::string report_format = "json";
    std::string solver = "reference";
    std::string mode = "feasibility";
    int mu = 0;
    int scenario_count = 1000;
    int rules = 5;
    int K = 2, N = 6, d = 3;
    bool exhaustive = false, rcr = false;
    std::uint64_t seed = 1;

    auto* build = app.add_subcommand("build", "reformulate and report LP sizes");
    build->add_option("problem", problem_path)->required();
    build->add_option("--mu", mu, "override the memory depth (widens the rhs)");
    build->add_option("-o,--out", out_path, "write the assembled LP");
    build->add_option("--format", format, "LP dump format: mps or json");

    auto* solve = app.add_subcommand("solve", "solve for optimal rule coefficients");
    solve->add_option("problem", problem_path)->required();
    solve->add_option("--mu", mu);
    solve->add_option("--solver", solver, "reference or plugin:NAME");
    solve->add_option("-o,--out", out_path, "write the rule coefficient file");

    auto* simulate_cmd = app.add_subcommand("simulate", "evaluate a rule file on scenarios");
    simulate_cmd->add_option("problem", problem_path)->required();
    simulate_cmd->add_option("rule", rule_path)->required();
    simulate_cmd->add_option("--mu", mu);
    simulate_cmd->add_option("--scenarios", scenario_count);
    simulate_cmd->add_option("--seed", seed);
    simulate_cmd->add_flag("--exhaustive", exhaustive, "enumerate every trajectory");
    simulate_cmd->add_option("--format", report_format, "json or table");

    auto* hydro = app.add_subcommand("hydro-gen", "emit a hydro-thermal problem file");
    hydro->add_option("params", params_path, "hydro parameter file (default instance if omitted)");
    hydro->add_option("-o,--out", out_path)->required();
    hydro->add_option("--regions", K);
    hydro->add_option("--horizon", N);
    hydro->add_option("--realizations", d);
    hydro->add_flag("--rcr", rcr, "enable the penalized lower-bound relaxation");
    hydro->add_option("--seed", seed);

    auto* oracle = app.add_subcommand("oracle", "compare the reformulation against brute force");
    oracle->add_option("problem", problem_path)->required();
    oracle->add_option("--mu", mu);
    oracle->add_option("--mode", mode, "feasibility or tree");
    oracle->add_option("--rules", rules, "random rule draws for feasibility mode");
    oracle->add_option("--seed", seed);

    auto* export_cmd = app.add_subcommand("export-mps", "write the assembled LP as MPS");
    export_cmd->add_option("problem", problem_path)->required();
    export_cmd->add_option("out", out_path)->required();
    export_cmd->add_option("--mu", mu);

    auto* solve_mps = app.add_subcommand("solve-mps",
                                         "solve an MPS file and write a plugin solution file");
    solve_mps->add_option("mps", mps_path)->required();
    solve_mps->add_option("out", sol_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help and friends
        std::cerr << cddr::Json{{"error", e.what()}}.dump() << "\n";
        return 1;
    }

    try {
        if (build->parsed()) return cmd_build(problem_path, mu, out_path, format);
        if (solve->parsed()) return cmd_solve(problem_path, mu, solver, out_path);
        if (simulate_cmd->parsed())
            return cmd_simulate(problem_path, rule_path, mu, scenario_count, seed, exhaustive,
                                report_format);
        if (hydro->parsed())
            return cmd_hydro_gen(params_path, out_path, K, N, d, rcr, seed);
        if (oracle->parsed()) return cmd_oracle(problem_path, mu, mode, rules, seed);
        if (export_cmd->parsed()) return cmd_export_mps(problem_path, mu, out_path);
        if (solve_mps->parsed()) return cmd_solve_mps(mps_path, sol_path);
    } catch (const std::exception& e) {
        std::cerr << cddr::Json{{"error", e.what()}}.dump() << "\n";
        return 1;
    }
    return 0;
}
