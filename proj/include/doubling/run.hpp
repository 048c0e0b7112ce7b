#pragma once

#include <iosfwd>

#include "doubling/config.hpp"
#include "doubling/table.hpp"

namespace doubling {

struct RunResult {
  Table table;
  /// 0 on success; 2 when `verify` finds a failing identity.
  int exit_code = 0;
};

/// Computes the result table for config.command.  Throws ValidationError or
/// NumericalError.
RunResult execute(const ExperimentConfig& config);

/// Validates, executes and writes the table (CSV or JSON, with provenance)
/// to config.out, or to `fallback` when out is "-".  Returns the exit code.
int run(const ExperimentConfig& config, std::ostream& fallback);

}  // namespace doubling
