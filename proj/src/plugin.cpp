#include "cddr/plugin.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>
#include <unordered_map>

namespace cddr {

void write_solution_file(const SolveResult& result, const LpNames& names, std::ostream& out) {
    out << to_string(result.status) << '\n';
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", result.value);
    out << buf << '\n';
    if (result.status == SolveStatus::Optimal) {
        for (size_t c = 0; c < result.x.size(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", result.x[c]);
            out << names.col[c] << ' ' << buf << '\n';
        }
    }
}

SolveResult parse_solution_file(std::istream& in, const LpNames& names) {
    SolveResult res;
    std::string status_token;
    if (!(in >> status_token)) fail("solution file: missing status line");
    std::string lowered = status_token;
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lowered == "optimal") res.status = SolveStatus::Optimal;
    else if (lowered == "infeasible") res.status = SolveStatus::Infeasible;
    else if (lowered == "unbounded") res.status = SolveStatus::Unbounded;
    else if (lowered == "failed") res.status = SolveStatus::Failed;
    else fail("solution file: unknown status token '" + status_token + "'");

    if (!(in >> res.value)) fail("solution file: missing objective value");
    if (res.status != SolveStatus::Optimal) return res;

    std::unordered_map<std::string, size_t> index;
    for (size_t c = 0; c < names.col.size(); ++c) index.emplace(names.col[c], c);
    res.x.assign(names.col.size(), 0.0);
    std::string name;
    double value = 0.0;
    while (in >> name >> value) {
        auto it = index.find(name);
        if (it == index.end()) fail("solution file: unknown column '" + name + "'");
        res.x[it->second] = value;
    }
    return res;
}

namespace {

std::string resolve_plugin(const std::string& plugin) {
    if (plugin.find('/') != std::string::npos || plugin.find('\\') != std::string::npos)
        return plugin;
    std::string var = "CDDR_SOLVER_";
    for (char c : plugin) var += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    const char* path = std::getenv(var.c_str());
    if (path == nullptr || *path == '\0')
        fail("plugin '" + plugin + "' not registered (set " + var + ")");
    return path;
}

std::string read_file_tail(const std::filesystem::path& p, size_t max_bytes = 2000) {
    std::ifstream in(p);
    if (!in) return "";
    std::ostringstream os;
    os << in.rdbuf();
    std::string s = os.str();
    if (s.size() > max_bytes) s = "..." + s.substr(s.size() - max_bytes);
    return s;
}

} // namespace

SolveResult solve_via_plugin(const SparseLp& lp, const LpNames& names, const std::string& plugin,
                             const SolverConfig& config) {
    const std::string exe = resolve_plugin(plugin);

    namespace fs = std::filesystem;
    static std::atomic<int> run_counter{0};
    const fs::path dir = fs::temp_directory_path() /
                         ("cddr_plugin_" + std::to_string(::getpid()) + "_" +
                          std::to_string(run_counter.fetch_add(1)));
    fs::create_directories(dir);
    const fs::path mps_path = dir / "problem.mps";
    const fs::path sol_path = dir / "solution.sol";
    const fs::path err_path = dir / "stderr.log";

    {
        std::ofstream mps(mps_path);
        require(static_cast<bool>(mps), "plugin: cannot write " + mps_path.string());
        write_mps(lp, names, mps);
    }

    std::string cmd;
    if (const char* t = std::getenv("CDDR_PLUGIN_TIMEOUT"); t != nullptr && *t != '\0')
        cmd += "timeout " + std::string(t) + " ";
    cmd += "'" + exe + "' '" + mps_path.string() + "' '" + sol_path.string() + "' 2>'" +
           err_path.string() + "'";

    const int rc = std::system(cmd.c_str());

    SolveResult res;
    if (rc != 0) {
        res.status = SolveStatus::Failed;
        res.message = "plugin exited with status " + std::to_string(rc) + "; stderr: " +
                      read_file_tail(err_path);
        fs::remove_all(dir);
        return res;
    }
    std::ifstream sol(sol_path);
    if (!sol) {
        res.status = SolveStatus::Failed;
        res.message = "plugin produced no solution file; stderr: " + read_file_tail(err_path);
        fs::remove_all(dir);
        return res;
    }
    try {
        res = parse_solution_file(sol, names);
    } catch (const Error& e) {
        res = SolveResult{};
        res.status = SolveStatus::Failed;
        res.message = e.what();
        fs::remove_all(dir);
        return res;
    }
    fs::remove_all(dir);

    if (res.status == SolveStatus::Optimal) {
        const ResidualReport rep = check_residuals(lp, res.x, config.feasibility_tol);
        if (!rep.feasible) {
            res.status = SolveStatus::Failed;
            res.message = "plugin solution failed residual verification (violation " +
                          std::to_string(rep.max_violation) + ")";
        }
    }
    return res;
}

} // namespace cddr
