#pragma once

#include "dnf/run_config.hpp"

namespace dnf {

// Builds potentials and the initial datum from a config and runs the scheme.
Trajectory solve_from_config(const RunConfig& cfg);

// Full command-line surface; returns the process exit code.
// 0 success, 2 configuration error, 3 solver failure, 4 corrupt file,
// 5 inadmissible geometry.
int run_cli(int argc, const char* const* argv);

}  // namespace dnf
