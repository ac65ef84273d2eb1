#pragma once

#include <string>
#include <vector>

#include "groove/fixed_point.hpp"

namespace groove::cli {

std::string version();

// Plain `key = value` configuration files, '#' starts a comment. Keys mirror
// the long command-line flags; explicit flags override file values.
void apply_config_file(const std::string& path, fixed_point::SolveConfig& cfg);

// Lossless CSV: y,W,W1,W2,W3,F with 17 significant digits.
void write_profile_csv(const std::string& path, const fixed_point::Profile& p);
fixed_point::Profile read_profile_csv(const std::string& path);

void write_manifest(const std::string& path, const fixed_point::SolveConfig& cfg,
                    const fixed_point::ProfileResult& res, double wall_seconds);
fixed_point::SolveConfig config_from_manifest(const std::string& path);

// Runs the configured solve and persists profile.csv and manifest.json under
// out_dir. Returns 0 on convergence, 2 otherwise.
int run_solve(const fixed_point::SolveConfig& cfg, const std::string& out_dir,
              fixed_point::ProfileResult* out_result = nullptr);

// Subcommand entry points; args exclude the subcommand name itself.
// Exit codes: 0 success, 1 usage error, 2 runtime/convergence failure.
int cmd_solve(const std::vector<std::string>& args);
int cmd_sweep(const std::vector<std::string>& args);
int cmd_compare(const std::vector<std::string>& args);
int cmd_selftest(const std::vector<std::string>& args);

}  // namespace groove::cli
