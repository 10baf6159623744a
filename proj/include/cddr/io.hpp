#pragma once

#include <string>

#include <json.hpp>

#include "cddr/hydro.hpp"
#include "cddr/policy.hpp"
#include "cddr/polytopic.hpp"
#include "cddr/problem.hpp"
#include "cddr/reformulate.hpp"

namespace cddr {

using Json = nlohmann::json;

// All indices in files are 1-based (stages, fragment entries, triplet rows
// and columns); they are converted at the boundary. Absent beta/A entries
// are zero.

ProblemSpec problem_from_json(const Json& j);
Json problem_to_json(const ProblemSpec& spec);

bool is_polytopic_problem(const Json& j); // "stages" present
PolyProblem poly_problem_from_json(const Json& j);
Json poly_problem_to_json(const PolyProblem& poly);

RuleCoefficients rule_from_json(const Json& j);
Json rule_to_json(const RuleCoefficients& rule);
/// Rule file carrying both the poly-affine coefficients and the induced
/// discrete rule, so simulation never needs the polytopes again.
Json poly_rule_to_json(const PolyAffineCoefficients& v, const RuleCoefficients& u);

HydroParams hydro_params_from_json(const Json& j);
ParModel par_model_from_json(const Json& j);
Json hydro_to_json(const HydroParams& params, const ParModel& model);

Json size_report_to_json(const SizeReport& report);
Json simulation_report_to_json(const SimulationReport& report);
std::string simulation_report_table(const SimulationReport& report);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

} // namespace cddr
