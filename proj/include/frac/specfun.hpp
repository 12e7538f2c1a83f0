#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "frac/interp.hpp"

namespace frac {

/// Model tuple (alpha, beta, dim, eta). beta = 1 and alpha = 2 are admitted
/// as degenerate limits so classical-heat anchors can run through the same
/// code paths.
struct ModelParams {
  double alpha = 1.5;
  double beta = 0.5;
  int dim = 1;
  double eta = 1.0;

  double eta_c() const { return alpha / (beta * static_cast<double>(dim)); }
  /// Throws std::domain_error on violation of 0 < alpha <= 2, 0 < beta <= 1,
  /// eta > 0, dim >= 1.
  void validate() const;
};

// ---------------------------------------------------------------------------
// Symmetric alpha-stable density p(t, x), Fourier convention
//   \int e^{i xi . x} p(t, x) dx = e^{-t |xi|^alpha}.
// Closed forms for alpha in {1, 2} (any dim); generic alpha is evaluated in
// d = 1 by cosine inversion at t = 1 plus the exact scaling
//   p(s t, x) = s^{-d/alpha} p(t, s^{-1/alpha} x).
// ---------------------------------------------------------------------------

/// p(t, x) for radius r = |x|. Throws unsupported_configuration for generic
/// alpha with dim >= 2, std::domain_error for t <= 0.
double stable_density_radial(double alpha, int dim, double t, double r);

/// p(t, x) for a point x with dim = x.size().
double stable_density(const ModelParams& params, double t, std::span<const double> x);

/// Coefficient of the |x|^{-(d+alpha)} far-field law of p(1, x), d = 1:
/// Gamma(1+alpha) sin(pi alpha / 2) / pi. Zero at alpha = 2.
double stable_tail_coefficient(double alpha);

/// Tabulated p(1, |x|) profile for fast repeated evaluation.
struct StableProfile {
  double alpha = 0.0;
  int dim = 1;
  std::vector<double> grid;    // |x| abscissae, ascending
  std::vector<double> values;  // p(1, |x|)
  double value_at_origin = 0.0;
  double tail_constant = 0.0;  // fitted c of c * |x|^{-(d+alpha)}; 0 = negligible tail

  double evaluate(double r) const;  // p(1, r)
  double mass() const;              // integral over R^d, tail model included

  PchipInterpolant loglog;  // log p vs log r
};

StableProfile build_stable_profile(double alpha, int dim = 1, int n_points = 4096);

// ---------------------------------------------------------------------------
// One-sided beta-stable density g_beta, Laplace transform e^{-s^beta}.
// Zolotarev's (0, pi) integral below the series cutover, convergent power
// series above it. g_beta(u) = 0 for u <= 0.
// ---------------------------------------------------------------------------

/// g_beta(u). Throws std::domain_error for beta outside (0, 1).
double subordinator_density(double beta, double u);

/// Density of the inverse subordinator E_t:
/// f_{E_t}(s) = (t / beta) s^{-1 - 1/beta} g_beta(t s^{-1/beta}).
double inverse_subordinator_density(double beta, double t, double s);

/// Fractional moment E[D_1^rho] = Gamma(1 - rho/beta) / Gamma(1 - rho),
/// finite for rho < beta; negative moments E[D_1^{-rho}] use
/// Gamma(rho/beta) / (beta Gamma(rho)).
double one_sided_stable_moment(double beta, double rho);

/// Tabulated g_beta for inner loops (quadrature-grade direct evaluation is
/// reserved for oracles). Exact series above the table range.
class SubordinatorTable {
 public:
  explicit SubordinatorTable(double beta, int n_points = 2048);
  double beta() const { return beta_; }
  double operator()(double u) const;

 private:
  double beta_ = 0.0;
  double u_lo_ = 0.0, u_hi_ = 0.0;
  PchipInterpolant loglog_;
};

// ---------------------------------------------------------------------------
// Mittag-Leffler E_beta(-t) on the completely monotone branch.
// Power series for t <= 1; spectral integral representation beyond.
// ---------------------------------------------------------------------------

/// E_beta(-t), t >= 0, beta in (0, 1]. Monotone from 1 to 0.
double mittag_leffler_neg(double beta, double t);

/// Tabulated E_beta(-t) over [0, t_max] for spectral time stepping.
class MittagLefflerTable {
 public:
  MittagLefflerTable(double beta, double t_max, int n_points = 4096);
  double beta() const { return beta_; }
  double operator()(double t) const;

 private:
  double beta_ = 0.0;
  double t_lo_ = 0.0, t_max_ = 0.0;
  PchipInterpolant loglog_;
};

}  // namespace frac
