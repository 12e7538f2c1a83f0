#pragma once

#include <span>
#include <string>
#include <vector>

#include "frac/kernel.hpp"

namespace frac {

/// Uniform symmetric grid on [-L, L]; an odd point count keeps x = 0 a node.
struct SpaceGrid {
  double half_width = 0.0;
  int points = 0;

  double dx() const { return 2.0 * half_width / (points - 1); }
  double x(int i) const { return -half_width + dx() * i; }
  int center_index() const { return points / 2; }
  std::vector<double> nodes() const;
  void validate() const;  // throws std::domain_error
};

/// Strictly increasing nodes starting at 0; graded law t_k = T (k/N)^r.
struct TimeMesh {
  std::vector<double> nodes;
  double horizon = 0.0;
  int steps = 0;
  double grading = 1.0;

  static TimeMesh graded(double horizon, int steps, double grading = 2.0);
  TimeMesh refined() const;  // twice the steps, same law
  void validate() const;
};

/// Nonnegative discrete solution state at one time.
struct Field {
  SpaceGrid grid;
  std::vector<double> values;
  double time_stamp = 0.0;
  double tail_mass_estimate = 0.0;  // kernel mass lost to truncation (apply_G)
  bool truncation_warning = false;  // tail estimate above 1%
  bool blown_up = false;

  static Field zero(const SpaceGrid& g, double t = 0.0);
  double sup() const;
  bool all_finite() const;
};

/// Weighted norm spec: sup_t t^theta ||V(t)||_{L^p}; p = infinity supported.
struct NormSpec {
  double p = 2.0;
  double theta = 0.0;
};

/// theta = (beta d / alpha)(alpha / (beta d eta) - 1/p); requires
/// (1 + eta) theta < 1 in the fixed-point regime.
NormSpec fixed_point_norm_spec(const ModelParams& params, double p);

/// Discrete L^p (trapezoid) or sup norm, scaled by time_stamp^theta when
/// theta != 0.
double norm(const Field& field, const NormSpec& spec);

/// 𝒢 v0 (t, .) = G(t, .) * v0 by cell-exact convolution: each kernel lag
/// carries the exact mass of its dx-cell, so constants are reproduced up to
/// truncation loss. Flags the result when the truncation estimate passes 1%.
Field apply_G(const KernelProfile& profile, const Field& v0, double t, unsigned jobs = 0);

/// Memory operator at mesh node k:
///   (𝒜 f)(t_k, .) = sum_{j<k} [ \int_{t_j}^{t_{j+1}} G(t_k - s, .) ds ] * f(t_j, .)^{1+eta}
/// (left-endpoint product integration; the adjacent panel integrates the
/// kernel mass through a graded substitution so the (t_k - s)^{-beta d/alpha}
/// concentration is captured exactly in mass).
Field apply_A(const KernelProfile& profile, std::span<const Field> history, const TimeMesh& mesh,
              int k, double eta, unsigned jobs = 0);

/// Time-integrated, cell-averaged kernel row for one panel:
/// row[m] = \int_{s0}^{s1} [cell-m mass of G(t - s, .)] ds, m = 0 .. points-1.
std::vector<double> panel_kernel_row(const KernelProfile& profile, double t, double s0, double s1,
                                     const SpaceGrid& grid);

/// Field snapshot: CSV (x, value) plus a JSON sidecar (t, params, grid).
void save_field(const Field& field, const ModelParams& params, const std::string& csv_path,
                const std::string& json_path);

}  // namespace frac
