#include "frac/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "frac/error.hpp"
#include "frac/quadrature.hpp"

#include "json.hpp"

namespace frac {

namespace {

constexpr double kPi = std::numbers::pi;

double sphere_measure(int dim) { return dim == 1 ? 2.0 : 2.0 * kPi; }

// Closed-form masses \int_{|x|<=r} p(t, x) dx for the hard-wired alphas.
double stable_mass_within(double alpha, int dim, double t, double r) {
  if (alpha == 2.0) {
    if (dim == 1) return std::erf(r / (2.0 * std::sqrt(t)));
    const double q = r * r / (4.0 * t);
    return 1.0 - std::exp(-q);
  }
  // alpha == 1 (Cauchy)
  if (dim == 1) return 2.0 / kPi * std::atan(r / t);
  return 1.0 - t / std::sqrt(t * t + r * r);
}

struct ProfileQuadrature {
  const StableProfile* p1 = nullptr;  // generic-alpha table
  double alpha = 0, beta = 0;
  int dim = 1;
  double q = 0;           // beta d / alpha
  double p1_origin = 0;   // p(1, 0)
  double p1_tail_c = 0;   // far-field coefficient of p(1, .)
  const SubordinatorTable* g = nullptr;
  double rel_tol = 1e-9;
  int budget = 48;

  double p1_eval(double w) const {
    if (alpha == 2.0) return std::pow(4.0 * kPi, -0.5 * dim) * std::exp(-0.25 * w * w);
    if (alpha == 1.0) {
      const double cd = std::tgamma(0.5 * (dim + 1)) / std::pow(kPi, 0.5 * (dim + 1));
      return cd / std::pow(1.0 + w * w, 0.5 * (dim + 1));
    }
    return p1->evaluate(w);
  }

  // Analytic bound on \int_U^inf of the integrand, used to stop the log-space
  // sweep. Envelopes: g <= 1.4 (beta/Gamma(1-beta)) u^{-beta-1} for u >= 2,
  // p1 <= min(p1(0), 1.4 c_p w^{-(d+alpha)}).
  double right_tail_bound(double z, double U) const {
    const double genv = 1.4 * beta / std::tgamma(1.0 - beta);
    const double w_pow = 40.0;  // p1 power law is trusted beyond this
    double bound = 0.0;
    double u_star = (z > 0 && alpha < 2.0) ? std::pow(w_pow / z, alpha / beta)
                                           : std::numeric_limits<double>::infinity();
    u_star = std::max(u_star, U);
    // flat-p1 stretch [U, u_star): integrand <= p1(0) genv u^{q - beta - 1}
    if (u_star > U) {
      double flat;
      if (std::abs(q - beta) < 1e-12)
        flat = std::log(u_star / U);
      else
        flat = (std::pow(u_star, q - beta) - std::pow(U, q - beta)) / (q - beta);
      bound += p1_origin * genv * flat;
    }
    // power-tail stretch [u_star, inf): exponent q - beta(d+alpha)/alpha - beta - 1
    if (alpha < 2.0 && std::isfinite(u_star)) {
      const double e = q - beta * (dim + alpha) / alpha - beta;  // < 0 always
      bound += 1.4 * p1_tail_c * std::pow(z, -(dim + alpha)) * genv * std::pow(u_star, e) / (-e);
    }
    return bound;
  }

  // Phi(z) by splitting at u = 1 with log substitutions on both sides.
  double phi(double z) const {
    auto integrand_logu = [this, z](double v) {
      const double u = std::exp(v);
      const double gv = (*g)(u);
      if (gv <= 0.0) return 0.0;
      return std::pow(u, q + 1.0) * p1_eval(std::pow(u, beta / alpha) * z) * gv;
    };
    // left of u = 1: g vanishes superexponentially below the table floor
    const double v_lo = std::log(std::max(1e-6, g_floor()));
    double acc = integrate_adaptive(integrand_logu, v_lo, 0.0, 1e-300, rel_tol, budget).value;
    // right of u = 1: sweep in blocks until the analytic remainder is negligible
    double v = 0.0;
    for (int block = 0; block < 96; ++block) {
      const double v2 = v + 3.0;
      acc += integrate_adaptive(integrand_logu, v, v2, 1e-300, rel_tol, budget).value;
      v = v2;
      const double rem = right_tail_bound(z, std::exp(v));
      if (rem < 0.3 * rel_tol * acc || rem < 1e-18) return acc;
    }
    throw convergence_error("kernel profile quadrature did not stabilise", z);
  }

  double g_floor() const {
    return beta * std::pow(690.0 / (1.0 - beta), (beta - 1.0) / beta);
  }
};

const char* model_name(NearOriginModel m) {
  switch (m) {
    case NearOriginModel::kFinite: return "finite-value";
    case NearOriginModel::kLogSingular: return "log-singular";
    case NearOriginModel::kPowerSingular: return "power-singular";
  }
  return "?";
}

NearOriginModel model_from_name(const std::string& s) {
  if (s == "finite-value") return NearOriginModel::kFinite;
  if (s == "log-singular") return NearOriginModel::kLogSingular;
  if (s == "power-singular") return NearOriginModel::kPowerSingular;
  throw std::runtime_error("unknown near-origin model tag: " + s);
}

// Builds interpolants + cumulative mass for an already-filled grid/values.
void finalise_profile(KernelProfile& p) {
  const int n = static_cast<int>(p.grid.size());
  const int dim = p.params.dim;
  const double alpha = p.params.alpha;
  const double omega = sphere_measure(dim);

  std::vector<double> lx(n), ly(n);
  for (int i = 0; i < n; ++i) {
    lx[i] = std::log(p.grid[i]);
    ly[i] = std::log(std::max(p.values[i], 1e-320));
  }
  p.loglog = PchipInterpolant(lx, ly);

  // Singular-factor remainder below z_split.
  if (p.near_origin != NearOriginModel::kFinite) {
    p.z_split = 1.0;
    std::vector<double> rx, ry;
    for (int i = 0; i < n && p.grid[i] <= 2.0 * p.z_split; ++i) {
      rx.push_back(lx[i]);
      if (p.near_origin == NearOriginModel::kLogSingular)
        ry.push_back(p.values[i] - p.origin_value * std::log(2.0 / p.grid[i]));
      else
        ry.push_back(p.values[i] * std::pow(p.grid[i], dim - alpha));
    }
    p.near_remainder = PchipInterpolant(std::move(rx), std::move(ry));
  }

  // Cumulative mass: analytic head + per-panel integration of the log-log
  // interpolant (4-point Gauss on each grid panel).
  std::vector<double> cum(n);
  const double z0 = p.grid.front();
  switch (p.near_origin) {
    case NearOriginModel::kFinite:
      cum[0] = omega * p.origin_value * std::pow(z0, dim) / dim;
      break;
    case NearOriginModel::kLogSingular: {
      const double A = p.origin_value;
      const double B = p.near_remainder(std::log(z0));
      cum[0] = omega * std::pow(z0, dim) / dim * (A * std::log(2.0 / z0) + A / dim + B);
      break;
    }
    case NearOriginModel::kPowerSingular: {
      const double C = p.near_remainder(std::log(z0));
      cum[0] = omega * C * std::pow(z0, alpha) / alpha;
      break;
    }
  }
  for (int i = 0; i + 1 < n; ++i) {
    auto f = [&](double lz) {
      const double z = std::exp(lz);
      return std::exp(p.loglog(lz)) * std::pow(z, dim) * omega;
    };
    cum[i + 1] = cum[i] + gauss_legendre<4>(f, lx[i], lx[i + 1]);
  }
  double tail = 0.0;
  if (p.tail_constant > 0.0)
    tail = omega * p.tail_constant * std::pow(p.grid.back(), -alpha) / alpha;
  p.total_mass = cum.back() + tail;

  std::vector<double> lc(n);
  for (int i = 0; i < n; ++i) lc[i] = std::log(std::max(cum[i], 1e-320));
  p.cumulative = PchipInterpolant(lx, lc);
}

}  // namespace

double KernelProfile::evaluate(double z) const {
  z = std::abs(z);
  if (degenerate_beta_one())
    return stable_density_radial(params.alpha, params.dim, 1.0, z);
  const int d = params.dim;
  const double a = params.alpha;
  if (z >= grid.back()) {
    if (tail_constant == 0.0) return 0.0;
    return tail_constant * std::pow(z, -(d + a));
  }
  if (near_origin != NearOriginModel::kFinite && z <= z_split) {
    const double lz = std::log(std::max(z, 1e-300));
    const double r = near_remainder(std::max(lz, near_remainder.x_front()));
    if (near_origin == NearOriginModel::kLogSingular) return origin_value * std::log(2.0 / z) + r;
    return r * std::pow(z, -(d - a));
  }
  if (z <= grid.front()) {
    // finite model: Phi(0) - c z^{alpha - d} leading correction
    const double drop = origin_value - values.front();
    return origin_value - drop * std::pow(z / grid.front(), a - d);
  }
  return std::exp(loglog(std::log(z)));
}

double KernelProfile::evaluate_kernel(double t, double r) const {
  if (!(t > 0.0)) throw std::domain_error("heat_kernel: t must be positive");
  const double q = params.beta * params.dim / params.alpha;
  const double s = std::pow(t, -params.beta / params.alpha);
  return std::pow(t, -q) * evaluate(s * std::abs(r));
}

double KernelProfile::mass_within(double t, double r) const {
  if (!(t > 0.0)) throw std::domain_error("mass_within: t must be positive");
  const double z = std::abs(r) * std::pow(t, -params.beta / params.alpha);
  if (z == 0.0) return 0.0;
  const double alpha = params.alpha;
  if (degenerate_beta_one() && (alpha == 1.0 || alpha == 2.0))
    return stable_mass_within(alpha, params.dim, 1.0, z);
  if (z <= grid.front()) {
    // head scales like z^dim (finite), with the singular factor folded in
    const double base = std::exp(cumulative(cumulative.x_front()));
    double scale = std::pow(z / grid.front(), params.dim);
    if (near_origin == NearOriginModel::kLogSingular && z > 0) {
      const double d = params.dim;
      const double A = origin_value, B = near_remainder(near_remainder.x_front());
      const double num = A * std::log(2.0 / z) + A / d + B;
      const double den = A * std::log(2.0 / grid.front()) + A / d + B;
      scale *= num / den;
    } else if (near_origin == NearOriginModel::kPowerSingular) {
      scale = std::pow(z / grid.front(), alpha);
    }
    return base * scale;
  }
  if (z >= grid.back()) {
    if (tail_constant == 0.0) return total_mass;
    const double omega = sphere_measure(params.dim);
    return total_mass - omega * tail_constant * std::pow(z, -alpha) / alpha;
  }
  return std::exp(cumulative(std::log(z)));
}

double KernelProfile::tail_fraction(double t, double r) const {
  const double m = mass_within(t, r);
  return std::max(0.0, 1.0 - m / total_mass);
}

double heat_kernel(const KernelProfile& profile, double t, std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return profile.evaluate_kernel(t, std::sqrt(s));
}

double heat_kernel_radial(const KernelProfile& profile, double t, double r) {
  return profile.evaluate_kernel(t, r);
}

KernelProfile build_kernel_profile(const ModelParams& params, const KernelBuildOptions& options) {
  params.validate();
  const double alpha = params.alpha, beta = params.beta;
  const int dim = params.dim;
  if (alpha != 1.0 && alpha != 2.0 && dim != 1)
    throw unsupported_configuration("kernel profile for generic alpha requires dim = 1");
  if (alpha == 2.0 && beta < 1.0 && dim != 1)
    throw unsupported_configuration("subordinated Gaussian profile supported for dim = 1 only");

  KernelProfile p;
  p.params = params;
  p.near_origin = (beta == 1.0 || dim < alpha) ? NearOriginModel::kFinite
                  : dim == alpha               ? NearOriginModel::kLogSingular
                                               : NearOriginModel::kPowerSingular;

  // One extra decade of nodes on each side keeps every query in the stated
  // [z_min, z_max] range on interior interpolation panels.
  const bool gaussian = (alpha == 2.0);
  const double z_hi_user = gaussian ? std::min(options.z_max, 50.0) : options.z_max;
  const double z_lo = options.z_min / 10.0;
  const double z_hi = gaussian ? z_hi_user : z_hi_user * 10.0;
  const double user_decades = std::log(z_hi_user / options.z_min);
  const int n = static_cast<int>(std::lround(options.grid_points *
                                             std::log(z_hi / z_lo) / user_decades));
  p.grid.resize(n);
  p.values.resize(n);
  const double l0 = std::log(z_lo), l1 = std::log(z_hi);
  for (int i = 0; i < n; ++i) p.grid[i] = std::exp(l0 + (l1 - l0) * i / (n - 1));

  if (beta == 1.0) {
    // Degenerate limit: G(t, .) = p(t, .).
    StableProfile stable;
    const bool closed = (alpha == 1.0 || alpha == 2.0);
    if (!closed) {
      stable = build_stable_profile(alpha, dim, n);
      p.grid = stable.grid;  // node-exact quadrature values
      p.values = stable.values;
    } else {
      for (int i = 0; i < n; ++i) p.values[i] = stable_density_radial(alpha, dim, 1.0, p.grid[i]);
    }
    p.origin_value = stable_density_radial(alpha, dim, 1.0, 0.0);
    if (gaussian)
      p.tail_constant = 0.0;
    else if (alpha == 1.0 && dim == 2)
      p.tail_constant = 1.0 / (2.0 * kPi);
    else if (closed)
      p.tail_constant = stable_tail_coefficient(alpha);
    else
      p.tail_constant = stable.tail_constant;
    finalise_profile(p);
    return p;
  }

  SubordinatorTable g(beta);
  ProfileQuadrature quad;
  quad.alpha = alpha;
  quad.beta = beta;
  quad.dim = dim;
  quad.q = beta * dim / alpha;
  quad.g = &g;
  quad.rel_tol = options.rel_tol;
  quad.budget = options.quadrature_budget;
  StableProfile stable;
  if (alpha != 1.0 && alpha != 2.0) {
    stable = build_stable_profile(alpha, dim);
    quad.p1 = &stable;
    quad.p1_tail_c = stable_tail_coefficient(alpha);
    quad.p1_origin = stable.value_at_origin;
  } else {
    quad.p1_tail_c = (alpha == 1.0) ? (dim == 1 ? stable_tail_coefficient(1.0) : 1.0 / (2.0 * kPi)) : 0.0;
    quad.p1_origin = quad.p1_eval(0.0);
  }

  for (int i = 0; i < n; ++i) p.values[i] = quad.phi(p.grid[i]);

  // Near-origin amplitude: closed moment formulas anchored at p(1, 0).
  if (p.near_origin == NearOriginModel::kFinite) {
    p.origin_value =
        quad.p1_origin * std::tgamma(1.0 - dim / alpha) / std::tgamma(1.0 - beta * dim / alpha);
  } else if (p.near_origin == NearOriginModel::kLogSingular) {
    p.origin_value = alpha * quad.p1_origin / std::tgamma(1.0 - beta);
  } else {
    p.origin_value = alpha * quad.p1_origin / (std::tgamma(1.0 - beta) * (dim - alpha));
  }

  // Far field: c z^{-(d+alpha)} fitted over the last decade (exterior form of
  // the two-sided bound); no power tail exists in the alpha = 2 limit.
  if (!gaussian) {
    double acc = 0.0;
    int cnt = 0;
    for (int i = n - 1; i >= 0 && p.grid[i] > z_hi / 10.0; --i, ++cnt)
      acc += p.values[i] * std::pow(p.grid[i], dim + alpha);
    p.tail_constant = acc / cnt;
  }
  finalise_profile(p);
  return p;
}

BoundEnvelope bound_envelope(const KernelProfile& profile,
                             std::span<const std::pair<double, double>> test_grid) {
  if (test_grid.empty()) throw std::domain_error("bound_envelope: empty test grid");
  const ModelParams& mp = profile.params;
  const double q = mp.beta * mp.dim / mp.alpha;
  BoundEnvelope env;
  env.regime = (mp.dim < mp.alpha && mp.alpha < 2.0) ? BoundEnvelope::Regime::kWholeRange
                                                     : BoundEnvelope::Regime::kExteriorOnly;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& [t, r] : test_grid) {
    if (!(t > 0.0)) throw std::domain_error("bound_envelope: t must be positive");
    if (env.regime == BoundEnvelope::Regime::kExteriorOnly &&
        std::abs(r) < std::pow(t, mp.beta / mp.alpha))
      continue;
    const double envelope = std::min(std::pow(t, -q),
                                     std::pow(t, mp.beta) / std::pow(std::abs(r), mp.dim + mp.alpha));
    const double ratio = profile.evaluate_kernel(t, r) / envelope;
    if (!std::isfinite(ratio)) {
      std::ostringstream os;
      os << "bound_envelope: non-finite ratio at t=" << t << " r=" << r;
      throw convergence_error(os.str(), r);
    }
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  env.lower_constant = lo;
  env.upper_constant = hi;
  return env;
}

void save_kernel_profile(const KernelProfile& p, const std::string& csv_path,
                         const std::string& json_path) {
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot write " + csv_path);
  csv << "z,phi\n";
  char buf[96];
  for (std::size_t i = 0; i < p.grid.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.grid[i], p.values[i]);
    csv << buf;
  }
  nlohmann::json j;
  j["params"] = {{"alpha", p.params.alpha},
                 {"beta", p.params.beta},
                 {"dim", p.params.dim},
                 {"eta", p.params.eta}};
  j["tail_constant"] = p.tail_constant;
  j["near_origin_model"] = model_name(p.near_origin);
  j["origin_value"] = p.origin_value;
  j["total_mass"] = p.total_mass;
  std::ofstream js(json_path);
  if (!js) throw std::runtime_error("cannot write " + json_path);
  js << j.dump(2) << "\n";
}

KernelProfile load_kernel_profile(const std::string& csv_path, const std::string& json_path) {
  std::ifstream js(json_path);
  if (!js) throw std::runtime_error("cannot read " + json_path);
  nlohmann::json j;
  js >> j;
  KernelProfile p;
  p.params.alpha = j["params"]["alpha"];
  p.params.beta = j["params"]["beta"];
  p.params.dim = j["params"]["dim"];
  p.params.eta = j["params"]["eta"];
  p.tail_constant = j["tail_constant"];
  p.near_origin = model_from_name(j["near_origin_model"]);
  p.origin_value = j["origin_value"];

  std::ifstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot read " + csv_path);
  std::string line;
  std::getline(csv, line);  // header
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    p.grid.push_back(std::stod(line.substr(0, comma)));
    p.values.push_back(std::stod(line.substr(comma + 1)));
  }
  finalise_profile(p);
  if (j.contains("total_mass")) p.total_mass = j["total_mass"];
  return p;
}

}  // namespace frac
