#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "frac/kernel.hpp"
#include "frac/solver.hpp"

namespace frac {

/// Schema violation with the JSON-pointer-style path of the offending field.
class config_error : public std::runtime_error {
 public:
  config_error(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), field_path(std::move(path)) {}
  std::string field_path;
};

struct InitialDataSpec {
  std::string shape = "indicator";  // indicator | kernel | delta | scaled_phi1 | zero
  double amplitude = 0.01;
  double radius = 1.0;  // support half-width for indicator
  double gamma = 1.0;   // kernel shape: amplitude * G(gamma, .)
};

struct ExperimentConfig {
  std::string mode = "solve";  // kernel | solve | dirichlet | sweep | verify
  ModelParams params{1.5, 0.5, 1, 1.0};

  double grid_half_width = 60.0;
  int grid_points = 1201;
  double mesh_horizon = 100.0;
  int mesh_steps = 128;
  double mesh_grading = 2.0;

  InitialDataSpec v0;

  double blowup_threshold = 1e6;
  double picard_tol = 1e-8;
  int picard_max_iters = 50;
  std::optional<DecayTest> decay_test;

  KernelBuildOptions kernel_options;
  std::string profile_cache;  // directory for cached profiles; empty = off

  double dirichlet_radius = 1.0;
  int dirichlet_n_grid = 401;
  int dirichlet_n_modes = 64;
  bool nonlinearity_enabled = true;

  std::vector<double> sweep_etas;

  std::uint64_t mc_samples = 1000000;
  std::vector<std::string> verify_checks;  // empty = all

  std::string out_dir = "out";
  std::uint64_t seed = 1;
  unsigned jobs = 0;

  std::string resolved_json() const;  // full resolved config, for provenance
};

/// Parses and validates; throws config_error with a field path on violations.
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

/// Builds the initial field on a grid from its spec (whole-space modes).
Field make_initial_field(const InitialDataSpec& spec, const SpaceGrid& grid,
                         const KernelProfile& profile);

}  // namespace frac
