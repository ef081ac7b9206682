#pragma once

#include <string>

#include "spshift/config.hpp"
#include "spshift/problem.hpp"

namespace spshift {

/// CSV text of one command plus the verdict of any verification rows.
struct CommandOutput {
  std::string csv;
  bool passed = true;
};

/// 6 significant digits, scientific notation; empty for NaN.
std::string format_number(double v);

/// Named example with the config's epsilon, m override and d override applied.
ProblemSpec problem_from_config(const RunConfig& config, double epsilon);

CommandOutput cmd_solve(const RunConfig& config);
CommandOutput cmd_convergence(const RunConfig& config);
CommandOutput cmd_compare_meshes(const RunConfig& config);
CommandOutput cmd_greens(const RunConfig& config);
CommandOutput cmd_decompose(const RunConfig& config);
CommandOutput cmd_postprocess(const RunConfig& config);

/// Dispatch by command name ("solve", "convergence", "compare-meshes", ...).
CommandOutput run_command(const std::string& name, const RunConfig& config);

}  // namespace spshift
