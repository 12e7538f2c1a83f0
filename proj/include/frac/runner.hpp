#pragma once

#include <string>

#include "frac/config.hpp"

namespace frac {

/// Executes one experiment; writes artifacts under config.out_dir.
/// Returns the process exit code: 0 success (blow-up verdicts included),
/// 1 failed verification checks, 3 numeric failure. Schema violations throw
/// config_error before this runs (exit 2 in the CLI).
int run_experiment(const ExperimentConfig& config);

/// Convenience wrapper used by the CLI and tests: parse + run, mapping
/// config_error to 2 and numeric failures to 3.
int run_cli(const std::string& mode, const std::string& config_path, const std::string& out_dir,
            std::uint64_t seed_override, bool seed_given, unsigned jobs_override, bool jobs_given,
            std::string* error_message = nullptr);

}  // namespace frac
