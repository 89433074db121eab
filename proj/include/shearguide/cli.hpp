#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "shearguide/report_io.hpp"

namespace shearguide {

enum ExitCode : int { exit_ok = 0, exit_invalid = 2, exit_solver = 3, exit_inconclusive = 4 };

/// Merges a JSON config file (unknown keys rejected) with command-line flags; flags win.
/// The merged document is what the manifest hashes.
Json merge_config(const Json& file_config, const Json& flag_config);
void validate_config_keys(const Json& config);

/// args excludes the program name. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace shearguide
