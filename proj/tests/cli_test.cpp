#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "cddr/io.hpp"
#include "cddr/plugin.hpp"
#include "cddr/reformulate.hpp"
#include "test_helpers.hpp"

using namespace cddr;
using namespace cddr::testing;
namespace fs = std::filesystem;

namespace {

#ifndef CDDR_CLI_PATH
#define CDDR_CLI_PATH ""
#endif

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

RunResult run_cli(const std::string& args, const fs::path& dir) {
    const fs::path out = dir / "stdout.txt";
    const fs::path err = dir / "stderr.txt";
    const std::string cmd = std::string("'") + CDDR_CLI_PATH + "' " + args + " >'" +
                            out.string() + "' 2>'" + err.string() + "'";
    const int rc = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = rc == -1 ? -1 : WEXITSTATUS(rc);
    r.out = read_text_file(out.string());
    r.err = read_text_file(err.string());
    return r;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("cddr_cli_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

} // namespace

TEST_CASE("full pipeline: generate, build, solve, simulate, oracle, export") {
    TempDir tmp;
    const std::string problem = (tmp.path / "problem.json").string();
    const std::string rule = (tmp.path / "rule.json").string();
    const std::string mps = (tmp.path / "problem.mps").string();

    // generate a small default hydro instance
    RunResult gen = run_cli("hydro-gen -o '" + problem + "' --regions 1 --horizon 3 --realizations 2",
                            tmp.path);
    REQUIRE(gen.exit_code == 0);
    CHECK(Json::parse(gen.out).at("n_t").get<int>() == 4);

    // build prints the size report
    RunResult build = run_cli("build '" + problem + "'", tmp.path);
    REQUIRE(build.exit_code == 0);
    const Json sizes = Json::parse(build.out);
    CHECK(sizes.at("n_u").get<long long>() > 0);

    // solve writes a rule file
    RunResult solve = run_cli("solve '" + problem + "' -o '" + rule + "'", tmp.path);
    REQUIRE(solve.exit_code == 0);
    const Json solved = Json::parse(solve.out);
    CHECK(solved.at("status").get<std::string>() == "optimal");

    // exhaustive simulation of the solved rule shows no violations
    RunResult sim = run_cli("simulate '" + problem + "' '" + rule + "' --exhaustive", tmp.path);
    REQUIRE(sim.exit_code == 0);
    const Json rep = Json::parse(sim.out);
    CHECK(rep.at("max_violation").get<double>() == 0.0);
    CHECK(rep.at("mean_cost").get<double>() ==
          doctest::Approx(solved.at("value").get<double>()).epsilon(1e-9));

    // oracle agreement in both modes
    RunResult feas = run_cli("oracle '" + problem + "' --mode feasibility --rules 3", tmp.path);
    REQUIRE(feas.exit_code == 0);
    CHECK(Json::parse(feas.out).at("all_agree").get<bool>());

    RunResult tree = run_cli("oracle '" + problem + "' --mode tree --mu 3", tmp.path);
    REQUIRE(tree.exit_code == 0);
    const Json tree_rep = Json::parse(tree.out);
    CHECK(tree_rep.at("relative_gap").get<double>() <= 1e-7);
    CHECK(tree_rep.at("lower_bound_respected").get<bool>());

    // MPS export parses back
    RunResult exp = run_cli("export-mps '" + problem + "' '" + mps + "'", tmp.path);
    REQUIRE(exp.exit_code == 0);
    std::ifstream in(mps);
    REQUIRE(static_cast<bool>(in));
    const ParsedMps parsed = parse_mps(in);
    CHECK(parsed.lp.n_cols == Json::parse(exp.out).at("columns").get<int>());
}

TEST_CASE("reruns with identical inputs are byte-identical") {
    TempDir tmp;
    const std::string problem = (tmp.path / "problem.json").string();
    REQUIRE(run_cli("hydro-gen -o '" + problem + "' --regions 1 --horizon 3 --realizations 2 --seed 9",
                    tmp.path)
                .exit_code == 0);
    const std::string first = read_text_file(problem);

    const std::string problem2 = (tmp.path / "problem2.json").string();
    REQUIRE(run_cli("hydro-gen -o '" + problem2 + "' --regions 1 --horizon 3 --realizations 2 --seed 9",
                    tmp.path)
                .exit_code == 0);
    CHECK(first == read_text_file(problem2));

    const std::string rule = (tmp.path / "rule.json").string();
    const std::string rule2 = (tmp.path / "rule2.json").string();
    REQUIRE(run_cli("solve '" + problem + "' -o '" + rule + "'", tmp.path).exit_code == 0);
    REQUIRE(run_cli("solve '" + problem + "' -o '" + rule2 + "'", tmp.path).exit_code == 0);
    CHECK(read_text_file(rule) == read_text_file(rule2));

    RunResult sim1 = run_cli("simulate '" + problem + "' '" + rule + "' --scenarios 200 --seed 4",
                             tmp.path);
    RunResult sim2 = run_cli("simulate '" + problem + "' '" + rule + "' --scenarios 200 --seed 4",
                             tmp.path);
    CHECK(sim1.out == sim2.out);
}

TEST_CASE("errors land on stderr as one-line JSON with nonzero exit") {
    TempDir tmp;
    RunResult missing = run_cli("build '/nonexistent/problem.json'", tmp.path);
    CHECK(missing.exit_code != 0);
    const Json err = Json::parse(missing.err);
    CHECK(err.contains("error"));

    // malformed problem file
    const std::string bad = (tmp.path / "bad.json").string();
    write_text_file(bad, "{\"N\": 1}");
    RunResult malformed = run_cli("build '" + bad + "'", tmp.path);
    CHECK(malformed.exit_code != 0);
    CHECK(Json::parse(malformed.err).contains("error"));
}

TEST_CASE("--mu widens the problem before building") {
    TempDir tmp;
    const std::string problem = (tmp.path / "problem.json").string();
    write_text_file(problem, problem_to_json(forced_single_stage()).dump());
    RunResult base = run_cli("build '" + problem + "'", tmp.path);
    RunResult wide = run_cli("build '" + problem + "' --mu 2", tmp.path);
    REQUIRE(base.exit_code == 0);
    REQUIRE(wide.exit_code == 0);
    // N = 1 with d = 2: widening cannot grow stage-1 fragments beyond d_1
    CHECK(Json::parse(base.out) == Json::parse(wide.out));

    RunResult shrink = run_cli("build '" + problem + "' --mu 0", tmp.path);
    CHECK(shrink.exit_code == 0); // 0 means "keep the file's depth"
}

TEST_CASE("the CLI itself serves as an MPS plugin") {
    TempDir tmp;
    // export the forced instance and solve it via the plugin contract
    const ProblemSpec spec = forced_single_stage();
    const AssembledLp assembled = build_discrete_lp(spec);
    ::setenv("CDDR_SOLVER_SELF", CDDR_CLI_PATH, 1);

    // the plugin protocol passes (mps, out) paths; the CLI consumes them via
    // solve-mps, so wrap it in a tiny shim script
    const fs::path shim = tmp.path / "self_solver.sh";
    {
        std::ofstream sh(shim);
        sh << "#!/bin/sh\nexec '" << CDDR_CLI_PATH << "' solve-mps \"$1\" \"$2\" >/dev/null\n";
    }
    fs::permissions(shim, fs::perms::owner_all);
    const SolveResult res = solve_via_plugin(assembled.lp, lp_names(assembled), shim.string());
    REQUIRE(res.status == SolveStatus::Optimal);
    CHECK(res.value == doctest::Approx(1.5).epsilon(1e-8));

    // a crashing plugin yields Failed with diagnostics, never a throw
    const fs::path broken = tmp.path / "broken.sh";
    {
        std::ofstream sh(broken);
        sh << "#!/bin/sh\necho boom >&2\nexit 3\n";
    }
    fs::permissions(broken, fs::perms::owner_all);
    const SolveResult bad = solve_via_plugin(assembled.lp, lp_names(assembled), broken.string());
    CHECK(bad.status == SolveStatus::Failed);
    CHECK(bad.message.find("boom") != std::string::npos);
}

TEST_CASE("infeasible solves report the first violated stage and row") {
    TempDir tmp;
    ProblemSpec spec;
    spec.N = 1;
    spec.mu = 1;
    spec.n = {1};
    spec.m = {2};
    spec.d = {1};
    Mat a(2, 1);
    a(0, 0) = 1.0;
    a(1, 0) = -1.0;
    spec.A[{1, 1}] = a;
    spec.rhs = AdditiveRhs(1, 1, spec.m, spec.d);
    spec.rhs.coeff(1, 1, 0)[0] = 0.0;
    spec.rhs.coeff(1, 1, 0)[1] = -1.0;
    spec.objective = ExpectedObjective{{{1.0}}, {{1.0}}};
    const std::string problem = (tmp.path / "infeasible.json").string();
    write_text_file(problem, problem_to_json(spec).dump());

    RunResult res = run_cli("solve '" + problem + "'", tmp.path);
    CHECK(res.exit_code != 0);
    const Json err = Json::parse(res.err);
    CHECK(err.at("status").get<std::string>() == "infeasible");
    REQUIRE(err.contains("first_violated"));
    CHECK(err.at("first_violated").at("stage").get<int>() == 1);
}

TEST_CASE("usage errors are machine-parsable JSON too") {
    TempDir tmp;
    RunResult res = run_cli("solve", tmp.path); // missing required argument
    CHECK(res.exit_code != 0);
    CHECK(Json::parse(res.err).contains("error"));

    RunResult unknown = run_cli("frobnicate", tmp.path);
    CHECK(unknown.exit_code != 0);
    CHECK(Json::parse(unknown.err).contains("error"));
}

TEST_CASE("forced single-stage instance through the CLI end to end") {
    TempDir tmp;
    const std::string problem = (tmp.path / "forced.json").string();
    const std::string rule = (tmp.path / "rule.json").string();
    write_text_file(problem, problem_to_json(forced_single_stage()).dump());

    RunResult build = run_cli("build '" + problem + "'", tmp.path);
    REQUIRE(build.exit_code == 0);
    const Json sizes = Json::parse(build.out);
    CHECK(sizes.at("n_u").get<int>() == 2);
    CHECK(sizes.at("n_y").get<int>() == 2);
    CHECK(sizes.at("n_z").get<int>() == 1);

    RunResult solve = run_cli("solve '" + problem + "' -o '" + rule + "'", tmp.path);
    REQUIRE(solve.exit_code == 0);
    CHECK(Json::parse(solve.out).at("value").get<double>() == doctest::Approx(1.5).epsilon(1e-9));

    RunResult sim = run_cli("simulate '" + problem + "' '" + rule + "' --exhaustive", tmp.path);
    REQUIRE(sim.exit_code == 0);
    const Json rep = Json::parse(sim.out);
    CHECK(rep.at("mean_cost").get<double>() == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(rep.at("max_violation").get<double>() == 0.0);
}
