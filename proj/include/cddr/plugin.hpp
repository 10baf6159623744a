#pragma once

#include <iosfwd>
#include <string>

#include "cddr/lp.hpp"
#include "cddr/mps.hpp"

namespace cddr {

/// Plugin solution file format:
///   line 1: status token  optimal | infeasible | unbounded | failed
///   line 2: objective value (ignored unless optimal)
///   then one "column-name value" pair per line (order free, missing = 0)
void write_solution_file(const SolveResult& result, const LpNames& names, std::ostream& out);
SolveResult parse_solution_file(std::istream& in, const LpNames& names);

/// Runs an external solver on the LP: writes MPS to a scratch file, invokes
/// `<program> <in.mps> <out.sol>` and reads the solution file back.
///
/// `plugin` is either a path to the executable (anything containing a path
/// separator) or a name NAME resolved through the environment variable
/// CDDR_SOLVER_NAME (upper-cased). A nonzero exit, a crash or an unreadable
/// solution file yields SolveStatus::Failed with captured diagnostics; it
/// never raises. Optimal results are re-checked against the LP residuals.
SolveResult solve_via_plugin(const SparseLp& lp, const LpNames& names, const std::string& plugin,
                             const SolverConfig& config = {});

} // namespace cddr
