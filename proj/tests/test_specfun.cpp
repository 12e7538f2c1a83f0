#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "frac/error.hpp"
#include "frac/quadrature.hpp"
#include "frac/specfun.hpp"

using namespace frac;

namespace {

constexpr double kPi = std::numbers::pi;

// Independent oracle for p(1, x): adaptive Simpson of the cosine integral,
// deliberately sharing no code with the library quadrature.
double simpson(double (*f)(double, double), double arg, double a, double b, int n) {
  double h = (b - a) / n;
  double s = f(arg, a) + f(arg, b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(arg, a + i * h);
  return s * h / 3.0;
}

double cosine_integrand(double x, double xi) { return std::cos(x * xi) * std::exp(-std::pow(xi, 1.5)); }

double stable_p1_oracle(double x) {
  // refine until two Simpson levels agree
  double prev = 0.0;
  for (int n = 512; n <= 1 << 22; n *= 2) {
    const double cur = simpson(cosine_integrand, x, 0.0, 40.0, n) / kPi;
    if (n > 512 && std::abs(cur - prev) < 1e-12) return cur;
    prev = cur;
  }
  return prev;
}

// Kahan-summed Mittag-Leffler series, independent of the library path.
double ml_series_oracle(double beta, double t) {
  double sum = 0.0, c = 0.0;
  for (int k = 0; k <= 200; ++k) {
    const double term = ((k % 2) ? -1.0 : 1.0) * std::exp(k * std::log(t) - std::lgamma(1.0 + beta * k));
    const double y = term - c;
    const double u = sum + y;
    c = (u - sum) - y;
    sum = u;
    if (std::abs(term) < 1e-19) break;
  }
  return sum;
}

}  // namespace

TEST_CASE("model params validation and derived exponent") {
  ModelParams p{1.5, 0.5, 1, 5.0};
  p.validate();
  CHECK(p.eta_c() == 1.5 / (0.5 * 1.0));
  CHECK(ModelParams{2.0, 1.0, 1, 1.0}.eta_c() == 2.0);

  CHECK_THROWS_AS((ModelParams{2.5, 0.5, 1, 1.0}.validate()), std::domain_error);
  CHECK_THROWS_AS((ModelParams{1.5, 0.0, 1, 1.0}.validate()), std::domain_error);
  CHECK_THROWS_AS((ModelParams{1.5, 0.5, 0, 1.0}.validate()), std::domain_error);
  CHECK_THROWS_AS((ModelParams{1.5, 0.5, 1, -1.0}.validate()), std::domain_error);
}

TEST_CASE("stable density closed-form anchors") {
  CHECK(stable_density_radial(2.0, 1, 1.0, 0.0) == doctest::Approx(1.0 / std::sqrt(4.0 * kPi)).epsilon(1e-12));
  CHECK(stable_density_radial(1.0, 1, 1.0, 0.0) == doctest::Approx(1.0 / kPi).epsilon(1e-12));
  // multivariate Cauchy, d = 2
  CHECK(stable_density_radial(1.0, 2, 1.0, 0.0) == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-12));
  // Gaussian with variance 2t
  CHECK(stable_density_radial(2.0, 1, 2.0, 1.5) ==
        doctest::Approx(std::exp(-1.5 * 1.5 / 8.0) / std::sqrt(8.0 * kPi)).epsilon(1e-12));
}

TEST_CASE("generic alpha vs independent quadrature oracle") {
  for (double x : {0.0, 0.3, 1.0, 2.5}) {
    const double oracle = stable_p1_oracle(x);
    CHECK(stable_density_radial(1.5, 1, 1.0, x) == doctest::Approx(oracle).epsilon(1e-8));
  }
}

TEST_CASE("stable density errors") {
  CHECK_THROWS_AS(stable_density_radial(1.5, 2, 1.0, 0.0), unsupported_configuration);
  CHECK_THROWS_AS(stable_density_radial(1.5, 1, 0.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(stable_density_radial(1.5, 1, -1.0, 0.0), std::domain_error);
}

TEST_CASE("stable scaling identity") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (double alpha : {0.8, 1.0, 1.5, 2.0}) {
    for (int i = 0; i < 24; ++i) {
      const double s = u(rng), t = u(rng), x = u(rng) - 5.0;
      const double lhs = stable_density_radial(alpha, 1, s * t, x);
      const double rhs = std::pow(s, -1.0 / alpha) *
                         stable_density_radial(alpha, 1, t, std::pow(s, -1.0 / alpha) * x);
      CHECK(std::abs(lhs - rhs) < 1e-10);
    }
  }
}

TEST_CASE("stable profile invariants") {
  const StableProfile p = build_stable_profile(1.5);
  CHECK(p.mass() == doctest::Approx(1.0).epsilon(1e-6));
  for (std::size_t i = 1; i < p.values.size(); ++i) {
    CHECK(p.values[i] > 0.0);
    CHECK(p.values[i] <= p.values[i - 1] * (1.0 + 1e-12));
  }
  // fitted far-field coefficient against the closed form
  CHECK(p.tail_constant == doctest::Approx(stable_tail_coefficient(1.5)).epsilon(1e-3));

  const StableProfile p08 = build_stable_profile(0.8);
  CHECK(p08.mass() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(p08.tail_constant == doctest::Approx(stable_tail_coefficient(0.8)).epsilon(5e-3));
}

TEST_CASE("one-sided stable density: closed form at beta = 1/2") {
  for (double u : {0.05, 0.3, 1.0, 1.9, 2.5, 20.0}) {
    const double exact = 0.5 / std::sqrt(kPi) * std::pow(u, -1.5) * std::exp(-0.25 / u);
    CHECK(subordinator_density(0.5, u) == doctest::Approx(exact).epsilon(1e-9));
  }
}

TEST_CASE("one-sided stable density: Laplace transform identity") {
  // \int e^{-su} g_beta(u) du = e^{-s^beta}, the validation the representation
  // choice must pass
  for (double beta : {0.3, 0.5, 0.7, 0.9}) {
    for (double s : {0.5, 1.0, 2.0}) {
      auto f = [&](double lu) {
        const double u = std::exp(lu);
        return std::exp(-s * u) * subordinator_density(beta, u) * u;
      };
      const double lt = integrate_adaptive(f, std::log(1e-5), std::log(400.0), 1e-12, 1e-11).value;
      CHECK(lt == doctest::Approx(std::exp(-std::pow(s, beta))).epsilon(1e-8));
    }
  }
}

TEST_CASE("one-sided stable density: support and domain errors") {
  CHECK(subordinator_density(0.7, -1.0) == 0.0);
  CHECK(subordinator_density(0.7, 0.0) == 0.0);
  CHECK_THROWS_AS(subordinator_density(1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(subordinator_density(0.0, 1.0), std::domain_error);
}

TEST_CASE("one-sided stable density: far-field law") {
  // g(u) u^{beta+1} -> beta / Gamma(1-beta)
  const double beta = 0.7;
  const double limit = beta / std::tgamma(1.0 - beta);
  CHECK(subordinator_density(beta, 1e6) * std::pow(1e6, beta + 1.0) ==
        doctest::Approx(limit).epsilon(1e-3));
}

TEST_CASE("one-sided stable density: small-u log-asymptotic slope") {
  // log g ~ log K + (1-beta/2)/(1-beta) log(beta/u) - |1-beta| (u/beta)^{beta/(beta-1)}
  // as u -> 0+; with the power prefactor removed the slope against
  // X = (u/beta)^{beta/(beta-1)} is -|1-beta|
  const double beta = 0.5;
  std::vector<double> xs, ys;
  for (double u = 0.02; u <= 0.08; u *= 1.3) {
    xs.push_back(std::pow(u / beta, beta / (beta - 1.0)));
    ys.push_back(std::log(subordinator_density(beta, u)) -
                 (1.0 - 0.5 * beta) / (1.0 - beta) * std::log(beta / u));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= xs.size();
  my /= ys.size();
  double num = 0, den = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) * (xs[i] - mx);
  }
  CHECK(num / den == doctest::Approx(-std::abs(1.0 - beta)).epsilon(0.05));
}

TEST_CASE("subordinator table matches direct evaluation") {
  const SubordinatorTable table(0.5);
  double worst = 0.0;
  for (double u = 0.01; u < 40.0; u *= 1.17) {
    const double direct = subordinator_density(0.5, u);
    if (direct > 1e-200) worst = std::max(worst, std::abs(table(u) / direct - 1.0));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("inverse subordinator density") {
  const double beta = 0.5, t = 2.0, s = 1.3;
  const double expect =
      t / beta * std::pow(s, -1.0 - 1.0 / beta) * subordinator_density(beta, t * std::pow(s, -1.0 / beta));
  CHECK(inverse_subordinator_density(beta, t, s) == doctest::Approx(expect).epsilon(1e-14));
  CHECK_THROWS_AS(inverse_subordinator_density(0.5, 0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(inverse_subordinator_density(0.5, 1.0, -1.0), std::domain_error);

  // density normalisation over s for several t
  for (double tt : {0.1, 1.0, 10.0}) {
    auto f = [&](double ls) {
      const double ss = std::exp(ls);
      return inverse_subordinator_density(0.5, tt, ss) * ss;
    };
    const double lo = std::log(1e-7 * tt * tt), hi = std::log(400.0 * std::sqrt(tt) + 40.0);
    const double mass = integrate_adaptive(f, lo, hi, 1e-11, 1e-9).value;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("fractional moments of the subordinator") {
  // E[D^rho] against direct quadrature
  const double beta = 0.6, rho = 0.25;
  auto f = [&](double lu) {
    const double u = std::exp(lu);
    return std::pow(u, rho) * subordinator_density(beta, u) * u;
  };
  double direct = integrate_adaptive(f, std::log(1e-5), std::log(1e7), 1e-11, 1e-9).value;
  // analytic tail beyond the truncation: g ~ (beta/Gamma(1-beta)) u^{-beta-1}
  direct += beta / std::tgamma(1.0 - beta) * std::pow(1e7, rho - beta) / (beta - rho);
  CHECK(one_sided_stable_moment(beta, rho) == doctest::Approx(direct).epsilon(1e-6));
  CHECK_THROWS_AS(one_sided_stable_moment(0.5, 0.5), std::domain_error);
}

TEST_CASE("mittag-leffler anchors") {
  for (double beta : {0.3, 0.5, 0.7, 1.0}) CHECK(mittag_leffler_neg(beta, 0.0) == 1.0);
  CHECK(mittag_leffler_neg(1.0, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  // E_{1/2}(-t) = e^{t^2} erfc(t)
  CHECK(mittag_leffler_neg(0.5, 1.0) == doctest::Approx(std::exp(1.0) * std::erfc(1.0)).epsilon(1e-9));
  CHECK(mittag_leffler_neg(0.5, 4.0) == doctest::Approx(std::exp(16.0) * std::erfc(4.0)).epsilon(1e-9));
  // series summation oracle
  for (double t : {0.2, 0.7, 1.0}) {
    CHECK(mittag_leffler_neg(0.4, t) == doctest::Approx(ml_series_oracle(0.4, t)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(mittag_leffler_neg(1.2, 1.0), std::domain_error);
  CHECK_THROWS_AS(mittag_leffler_neg(0.5, -1.0), std::domain_error);
}

TEST_CASE("mittag-leffler two-sided decay bound") {
  // 1/(1 + Gamma(1-b) t) <= E_b(-t) <= 1/(1 + t/Gamma(1+b)), 1e-12 slack
  for (double beta : {0.3, 0.5, 0.7, 0.9}) {
    for (int i = 0; i < 2500; ++i) {
      const double t = std::pow(10.0, -6.0 + 12.0 * i / 2499.0);
      const double e = mittag_leffler_neg(beta, t);
      const double lo = 1.0 / (1.0 + std::tgamma(1.0 - beta) * t);
      const double hi = 1.0 / (1.0 + t / std::tgamma(1.0 + beta));
      CHECK(e >= lo - 1e-12);
      CHECK(e <= hi + 1e-12);
    }
  }
}

TEST_CASE("mittag-leffler complete monotonicity smoke check") {
  for (double beta : {0.4, 0.8}) {
    double prev = 1.0;
    for (int i = 1; i <= 400; ++i) {
      const double t = 0.05 * i;
      const double e = mittag_leffler_neg(beta, t);
      CHECK(e <= prev + 1e-15);
      CHECK(e > 0.0);
      prev = e;
    }
  }
}

TEST_CASE("mittag-leffler table") {
  const MittagLefflerTable table(0.5, 1e5);
  double worst = 0.0;
  for (double t = 1e-7; t < 9e4; t *= 1.61) {
    const double exact = mittag_leffler_neg(0.5, t);
    worst = std::max(worst, std::abs(table(t) / exact - 1.0));
  }
  CHECK(worst < 1e-7);
  const MittagLefflerTable exp_table(1.0, 10.0);
  CHECK(exp_table(2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
}
