#pragma once

#include <ostream>
#include <string>

#include "hypac/config.hpp"
#include "hypac/io.hpp"

namespace hypac {

/// One verify entry. Hard checks decide the exit status; soft ones are findings.
struct Check {
  std::string name;
  bool hard = true;
  bool passed = true;
  std::string detail;
};

/// Runs generate | geometry | isoperimetry | solve | verify, writing the
/// bundle under `out_dir`. Returns 0, or 1 when a hard check fails.
/// Configuration problems throw ConfigError.
int run_command(const std::string& command, const RunConfig& cfg, const std::string& out_dir, std::ostream& log);

}  // namespace hypac
