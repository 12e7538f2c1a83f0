#include "frac/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "frac/error.hpp"
#include "frac/quadrature.hpp"

namespace frac {

namespace {

constexpr double kPi = std::numbers::pi;

double radius(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

// ---- symmetric stable, closed forms ----------------------------------------

double gaussian_density(int dim, double t, double r) {
  // e^{-t|xi|^2} convention: Gaussian with variance 2t per coordinate.
  return std::pow(4.0 * kPi * t, -0.5 * dim) * std::exp(-r * r / (4.0 * t));
}

double cauchy_density(int dim, double t, double r) {
  // c_d t / (t^2 + r^2)^{(d+1)/2}, c_d = Gamma((d+1)/2) / pi^{(d+1)/2}
  const double cd = std::tgamma(0.5 * (dim + 1)) / std::pow(kPi, 0.5 * (dim + 1));
  return cd * t / std::pow(t * t + r * r, 0.5 * (dim + 1));
}

// ---- generic alpha, d = 1: cosine inversion at t = 1 -----------------------

// p(1, x) = (1/pi) \int_0^inf cos(x xi) e^{-xi^alpha} d xi.
// Quadrature below |x| = 40, convergent tail series beyond.
double stable_p1_quadrature(double alpha, double x) {
  const double xi_star = std::pow(10.0, 1.0 / alpha);
  // Cut where the remainder bound e^{-Xi^alpha} Xi^{1-alpha} is ~ 1e-19.
  const double xi_max = std::pow(43.0, 1.0 / alpha);
  auto f = [alpha, x](double xi) { return std::cos(x * xi) * std::exp(-std::pow(xi, alpha)); };
  // Pre-split per oscillation period so the adaptive pass starts resolved.
  const double period = (x > 1e-12) ? 2.0 * kPi / x : xi_max;
  double value = 0.0;
  double a = 0.0;
  const double step0 = std::min(xi_star, std::max(period, xi_star / 64.0));
  while (a < xi_max) {
    const double b = std::min(a + step0, xi_max);
    value += integrate_adaptive(f, a, b, 1e-14, 1e-13).value;
    a = b;
  }
  return value / kPi;
}

// Bergstrom series for the far field, d = 1; convergent for alpha < 1 and
// asymptotic (truncated at the smallest term) otherwise.
double stable_p1_tail_series(double alpha, double x) {
  double sum = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 60; ++k) {
    const double lg = std::lgamma(alpha * k + 1.0) - std::lgamma(k + 1.0);
    const double mag = std::exp(lg - (alpha * k + 1.0) * std::log(x));
    if (mag >= prev) break;  // asymptotic regime: stop at the smallest term
    const double term = ((k % 2) ? 1.0 : -1.0) * mag * std::sin(0.5 * kPi * alpha * k);
    sum += term;
    if (mag < 1e-17 * std::abs(sum)) break;
    prev = mag;
  }
  return sum / kPi;
}

double stable_p1_generic(double alpha, double x) {
  x = std::abs(x);
  return (x > 40.0) ? stable_p1_tail_series(alpha, x) : stable_p1_quadrature(alpha, x);
}

// ---- one-sided stable density ----------------------------------------------

// Zolotarev kernel A(phi) = sin(b phi)^{b/(1-b)} sin((1-b) phi) / sin(phi)^{1/(1-b)}.
double zolotarev_a(double beta, double phi) {
  const double s1 = std::sin(beta * phi);
  const double s2 = std::sin((1.0 - beta) * phi);
  const double s = std::sin(phi);
  return std::pow(s1, beta / (1.0 - beta)) * s2 * std::pow(s, -1.0 / (1.0 - beta));
}

double g_beta_zolotarev(double beta, double u) {
  const double c = std::pow(u, -beta / (1.0 - beta));
  auto integrand = [beta, c](double phi) {
    const double a = zolotarev_a(beta, phi);
    const double e = a * c;
    if (e > 745.0) return 0.0;  // exp underflow; avoids inf * 0
    return a * std::exp(-e);
  };
  const double pref = beta / ((1.0 - beta) * kPi) * std::pow(u, -1.0 / (1.0 - beta));
  const double integral = integrate_adaptive(integrand, 0.0, kPi, 1e-300, 1e-12, 52).value;
  return pref * integral;
}

// Convergent power series: g(u) = (1/pi) sum_k (-1)^{k+1} Gamma(beta k + 1)/k!
//                                  sin(pi beta k) u^{-beta k - 1}.
double g_beta_series(double beta, double u) {
  const double lu = std::log(u);
  double sum = 0.0;
  for (int k = 1; k <= 160; ++k) {
    const double lg = std::lgamma(beta * k + 1.0) - std::lgamma(k + 1.0) - (beta * k + 1.0) * lu;
    const double mag = std::exp(lg);
    const double term = ((k % 2) ? 1.0 : -1.0) * mag * std::sin(kPi * beta * k);
    sum += term;
    if (mag < 1e-18 * std::abs(sum) && k > 4) return sum / kPi;
  }
  return sum / kPi;  // beta near 1 converges slowly; remainder below table accuracy
}

constexpr double kSeriesCutover = 2.0;

// ---- Mittag-Leffler ---------------------------------------------------------

double ml_series(double beta, double t) {
  // sum (-t)^k / Gamma(1 + beta k); safe for t <= ~1.5 (no term growth).
  double sum = 0.0, term;
  const double lt = (t > 0) ? std::log(t) : -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 120; ++k) {
    term = ((k % 2) ? -1.0 : 1.0) * std::exp(k * lt - std::lgamma(1.0 + beta * k));
    sum += term;
    if (std::abs(term) < 1e-18 * std::max(1.0, std::abs(sum)) && k > 2) break;
  }
  return sum;
}

// Spectral form: E_beta(-t) = sin(beta pi)/pi * t^{-1} *
//   \int_0^inf e^{-w} w^{beta-1} / D(w) dw,
// D(w) = (w^beta / t + cos(beta pi))^2 + sin^2(beta pi).
double ml_integral(double beta, double t) {
  const double cb = std::cos(beta * kPi);
  const double sb = std::sin(beta * kPi);
  auto denom = [&](double w) {
    const double q = std::pow(w, beta) / t + cb;
    return q * q + sb * sb;
  };
  // [0,1] with m = w^beta to absorb the w^{beta-1} endpoint.
  auto head = [&](double m) {
    const double w = std::pow(m, 1.0 / beta);
    return std::exp(-w) / (beta * denom(w));
  };
  double value = integrate_adaptive(head, 0.0, 1.0, 1e-300, 1e-13).value;
  // [1, 42]: plain integrand, exponential cutoff.
  auto body = [&](double w) { return std::exp(-w) * std::pow(w, beta - 1.0) / denom(w); };
  value += integrate_adaptive(body, 1.0, 42.0, 1e-300, 1e-13).value;
  return sb / (kPi * t) * value;
}

}  // namespace

void ModelParams::validate() const {
  if (!(alpha > 0.0) || alpha > 2.0) throw std::domain_error("alpha must lie in (0, 2]");
  if (!(beta > 0.0) || beta > 1.0) throw std::domain_error("beta must lie in (0, 1]");
  if (!(eta > 0.0)) throw std::domain_error("eta must be positive");
  if (dim < 1) throw std::domain_error("dim must be >= 1");
}

double stable_density_radial(double alpha, int dim, double t, double r) {
  if (!(t > 0.0)) throw std::domain_error("stable_density: t must be positive");
  if (!(alpha > 0.0) || alpha > 2.0) throw std::domain_error("stable_density: alpha outside (0, 2]");
  r = std::abs(r);
  if (alpha == 2.0) return gaussian_density(dim, t, r);
  if (alpha == 1.0) return cauchy_density(dim, t, r);
  if (dim != 1)
    throw unsupported_configuration("stable density for generic alpha requires dim = 1");
  const double s = std::pow(t, -1.0 / alpha);
  return s * stable_p1_generic(alpha, s * r);
}

double stable_density(const ModelParams& params, double t, std::span<const double> x) {
  if (static_cast<int>(x.size()) != params.dim)
    throw std::domain_error("stable_density: point dimension mismatch");
  return stable_density_radial(params.alpha, params.dim, t, radius(x));
}

double stable_tail_coefficient(double alpha) {
  if (alpha >= 2.0) return 0.0;
  return std::tgamma(1.0 + alpha) * std::sin(0.5 * kPi * alpha) / kPi;
}

double StableProfile::evaluate(double r) const {
  r = std::abs(r);
  if (alpha == 2.0) return gaussian_density(dim, 1.0, r);
  if (alpha == 1.0) return cauchy_density(dim, 1.0, r);
  if (r <= grid.front()) {
    // p(1, .) is smooth at the origin; quadratic blend to the exact value.
    const double drop = value_at_origin - values.front();
    const double q = r / grid.front();
    return value_at_origin - drop * q * q;
  }
  if (r >= grid.back()) {
    if (tail_constant == 0.0) return 0.0;
    return tail_constant * std::pow(r, -(dim + alpha));
  }
  return std::exp(loglog(std::log(r)));
}

double StableProfile::mass() const {
  const double omega = (dim == 1) ? 2.0 : 2.0 * kPi;  // |S^{d-1}|
  auto f = [this](double lr) {
    const double r = std::exp(lr);
    return evaluate(r) * std::pow(r, dim) * ((dim == 1) ? 2.0 : 2.0 * kPi);
  };
  double m = integrate_adaptive(f, std::log(grid.front()), std::log(grid.back()), 1e-12, 1e-10).value;
  // head: p approximately constant
  m += value_at_origin * omega * std::pow(grid.front(), dim) / dim;
  // tail: power law
  if (tail_constant > 0.0) m += omega * tail_constant * std::pow(grid.back(), -alpha) / alpha;
  return m;
}

StableProfile build_stable_profile(double alpha, int dim, int n_points) {
  if (!(alpha > 0.0) || alpha > 2.0) throw std::domain_error("stable profile: alpha outside (0, 2]");
  if (dim != 1 && alpha != 1.0 && alpha != 2.0)
    throw unsupported_configuration("stable profile for generic alpha requires dim = 1");
  StableProfile p;
  p.alpha = alpha;
  p.dim = dim;
  if (alpha == 2.0 || alpha == 1.0) return p;  // closed forms; no table needed

  const double r_lo = 1e-4, r_hi = 1e4;
  p.grid.resize(n_points);
  p.values.resize(n_points);
  const double l0 = std::log(r_lo), l1 = std::log(r_hi);
  for (int i = 0; i < n_points; ++i) {
    const double r = std::exp(l0 + (l1 - l0) * i / (n_points - 1));
    p.grid[i] = r;
    p.values[i] = stable_p1_generic(alpha, r);
  }
  p.value_at_origin = std::tgamma(1.0 + 1.0 / alpha) / kPi;  // (1/pi) Gamma(1 + 1/alpha)
  // Fit the far-field coefficient over the last decade.
  double acc = 0.0;
  int cnt = 0;
  for (int i = n_points - 1; i >= 0 && p.grid[i] > r_hi / 10.0; --i, ++cnt)
    acc += p.values[i] * std::pow(p.grid[i], dim + alpha);
  p.tail_constant = acc / cnt;

  std::vector<double> lx(n_points), ly(n_points);
  for (int i = 0; i < n_points; ++i) {
    lx[i] = std::log(p.grid[i]);
    ly[i] = std::log(p.values[i]);
  }
  p.loglog = PchipInterpolant(std::move(lx), std::move(ly));
  return p;
}

double subordinator_density(double beta, double u) {
  if (!(beta > 0.0) || beta >= 1.0) throw std::domain_error("subordinator density: beta outside (0, 1)");
  if (u <= 0.0) return 0.0;
  if (u >= kSeriesCutover) return std::max(0.0, g_beta_series(beta, u));
  return std::max(0.0, g_beta_zolotarev(beta, u));
}

double inverse_subordinator_density(double beta, double t, double s) {
  if (!(t > 0.0) || !(s > 0.0)) throw std::domain_error("inverse subordinator density: t, s must be positive");
  return t / beta * std::pow(s, -1.0 - 1.0 / beta) * subordinator_density(beta, t * std::pow(s, -1.0 / beta));
}

double one_sided_stable_moment(double beta, double rho) {
  if (!(beta > 0.0) || beta >= 1.0) throw std::domain_error("stable moment: beta outside (0, 1)");
  if (rho >= beta) throw std::domain_error("stable moment: E[D^rho] diverges for rho >= beta");
  if (rho >= 0.0) return std::tgamma(1.0 - rho / beta) / std::tgamma(1.0 - rho);
  const double r = -rho;
  return std::tgamma(r / beta) / (beta * std::tgamma(r));
}

SubordinatorTable::SubordinatorTable(double beta, int n_points) : beta_(beta) {
  if (!(beta > 0.0) || beta >= 1.0) throw std::domain_error("subordinator table: beta outside (0, 1)");
  // Below u_lo the density underflows; (gbeta0) exponent solved for 1e-300.
  u_lo_ = beta * std::pow(690.0 / (1.0 - beta), (beta - 1.0) / beta);
  u_hi_ = kSeriesCutover;
  std::vector<double> lx(n_points), ly(n_points);
  const double l0 = std::log(u_lo_), l1 = std::log(u_hi_);
  for (int i = 0; i < n_points; ++i) {
    const double u = std::exp(l0 + (l1 - l0) * i / (n_points - 1));
    double g = (u >= kSeriesCutover) ? g_beta_series(beta, u) : g_beta_zolotarev(beta, u);
    lx[i] = std::log(u);
    ly[i] = std::log(std::max(g, 1e-320));
  }
  loglog_ = PchipInterpolant(std::move(lx), std::move(ly));
}

double SubordinatorTable::operator()(double u) const {
  if (u <= u_lo_) return 0.0;
  if (u >= u_hi_) return g_beta_series(beta_, u);
  return std::exp(loglog_(std::log(u)));
}

double mittag_leffler_neg(double beta, double t) {
  if (!(beta > 0.0) || beta > 1.0) throw std::domain_error("mittag_leffler_neg: beta outside (0, 1]");
  if (t < 0.0) throw std::domain_error("mittag_leffler_neg: t must be >= 0");
  if (t == 0.0) return 1.0;
  if (beta == 1.0) return std::exp(-t);
  return (t <= 1.0) ? ml_series(beta, t) : ml_integral(beta, t);
}

MittagLefflerTable::MittagLefflerTable(double beta, double t_max, int n_points)
    : beta_(beta), t_lo_(1e-8), t_max_(t_max) {
  if (!(beta > 0.0) || beta > 1.0) throw std::domain_error("ml table: beta outside (0, 1]");
  if (!(t_max > t_lo_)) throw std::domain_error("ml table: t_max too small");
  if (beta == 1.0) return;  // exp path, no table
  std::vector<double> lx(n_points), ly(n_points);
  const double l0 = std::log(t_lo_), l1 = std::log(t_max_);
  for (int i = 0; i < n_points; ++i) {
    const double t = std::exp(l0 + (l1 - l0) * i / (n_points - 1));
    lx[i] = std::log(t);
    ly[i] = std::log(mittag_leffler_neg(beta, t));
  }
  loglog_ = PchipInterpolant(std::move(lx), std::move(ly));
}

double MittagLefflerTable::operator()(double t) const {
  if (t < 0.0) throw std::domain_error("ml table: negative argument");
  if (beta_ == 1.0) return std::exp(-t);
  if (t <= t_lo_) return 1.0 - t / std::tgamma(1.0 + beta_) + t * t / std::tgamma(1.0 + 2.0 * beta_);
  if (t >= t_max_) {
    // Two-term asymptotic continuation.
    return 1.0 / (std::tgamma(1.0 - beta_) * t) - 1.0 / (std::tgamma(1.0 - 2.0 * beta_) * t * t);
  }
  return std::exp(loglog_(std::log(t)));
}

}  // namespace frac
