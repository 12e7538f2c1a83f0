#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "frac/interp.hpp"
#include "frac/specfun.hpp"

namespace frac {

/// Behaviour of the self-similar profile Phi(z) = G(1, z) near z = 0:
/// finite value (d < alpha), log(2/z) factor (d = alpha), or a
/// z^{-(d-alpha)} power factor (d > alpha).
enum class NearOriginModel { kFinite, kLogSingular, kPowerSingular };

struct KernelBuildOptions {
  int grid_points = 2048;
  double z_min = 1e-4;
  double z_max = 1e4;
  double rel_tol = 1e-9;
  int quadrature_budget = 48;  // max adaptive bisection depth per panel
};

/// Space-time fractional heat kernel reduced to its self-similar profile:
///   G(t, x) = t^{-beta d / alpha} Phi(|x| t^{-beta/alpha}).
/// Built once by subordination, immutable and thread-safe afterwards.
struct KernelProfile {
  ModelParams params;
  std::vector<double> grid;    // z abscissae, ascending
  std::vector<double> values;  // Phi(z)
  NearOriginModel near_origin = NearOriginModel::kFinite;
  double origin_value = 0.0;   // Phi(0) when finite; singular-factor amplitude otherwise
  double tail_constant = 0.0;  // c of c z^{-(d+alpha)}; 0 => negligible tail (alpha = 2)
  double total_mass = 0.0;     // \int_{R^d} Phi, should be 1

  /// Phi(z); singular models are evaluated through their stored factor.
  double evaluate(double z) const;
  /// G(t, x) for radius r = |x|.
  double evaluate_kernel(double t, double r) const;
  /// \int_{|x| <= r} G(t, x) dx; t-independent in the scaling variable.
  double mass_within(double t, double r) const;
  /// Fraction of kernel mass beyond radius r at time t (truncation estimates).
  double tail_fraction(double t, double r) const;

  bool degenerate_beta_one() const { return params.beta == 1.0; }

  // interpolation state (filled by the builder / loader)
  PchipInterpolant loglog;          // log Phi vs log z (regular range)
  PchipInterpolant near_remainder;  // regular remainder near 0 (singular models)
  PchipInterpolant cumulative;      // log cum-mass vs log z
  double z_split = 0.0;             // singular-factor branch applies below this z
};

/// Evaluates Phi(z) = \int_0^inf u^{beta d/alpha} p(1, u^{beta/alpha} z) g_beta(u) du
/// on a log grid; throws convergence_error (carrying the worst z) if the
/// quadrature budget is exhausted.
KernelProfile build_kernel_profile(const ModelParams& params, const KernelBuildOptions& options = {});

/// Kernel evaluation at a point x (|x| taken internally).
double heat_kernel(const KernelProfile& profile, double t, std::span<const double> x);
double heat_kernel_radial(const KernelProfile& profile, double t, double r);

/// Measured comparability constants of G against the two-sided envelope
/// min(t^{-beta d/alpha}, t^beta / |x|^{d+alpha}).
struct BoundEnvelope {
  double lower_constant = 0.0;
  double upper_constant = 0.0;
  enum class Regime { kWholeRange, kExteriorOnly } regime = Regime::kWholeRange;
};

/// test_grid holds (t, |x|) pairs; pairs outside the valid regime for the
/// profile's dimension/alpha are skipped. Throws on a non-finite in-regime ratio.
BoundEnvelope bound_envelope(const KernelProfile& profile,
                             std::span<const std::pair<double, double>> test_grid);

/// Profile cache: CSV of (z, phi) plus a JSON header with the parameters and
/// tail/near-origin models.
void save_kernel_profile(const KernelProfile& profile, const std::string& csv_path,
                         const std::string& json_path);
KernelProfile load_kernel_profile(const std::string& csv_path, const std::string& json_path);

}  // namespace frac
