#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "frac/error.hpp"
#include "frac/quadrature.hpp"
#include "frac/verify.hpp"

using namespace frac;

namespace {

const KernelProfile& profile_15() {
  static const KernelProfile p = build_kernel_profile({1.5, 0.5, 1, 1.0});
  return p;
}

const KernelProfile& profile_1() {
  static const KernelProfile p = build_kernel_profile({1.0, 0.5, 1, 1.0});
  return p;
}

}  // namespace

TEST_CASE("mc oracle: degenerate beta collapses to a point evaluation") {
  const McEstimate est = mc_subordination_oracle({1.0, 1.0, 1, 1.0}, 2.0, 0.7, 2000, 42);
  CHECK(est.estimate == stable_density_radial(1.0, 1, 2.0, 0.7));
  CHECK(est.std_error == 0.0);
}

TEST_CASE("mc oracle input contract") {
  CHECK_THROWS_AS(mc_subordination_oracle({1.0, 0.5, 1, 1.0}, 1.0, 0.5, 100, 1), std::domain_error);
  CHECK_THROWS_AS(mc_subordination_oracle({1.0, 0.5, 1, 1.0}, -1.0, 0.5, 2000, 1), std::domain_error);
}

TEST_CASE("mc oracle agrees with the subordination kernel at 3 sigma") {
  const ModelParams mp{1.0, 0.5, 1, 1.0};
  for (double x : {0.5, 1.0}) {
    const McEstimate est = mc_subordination_oracle(mp, 1.0, x, 1000000, 20260810);
    const double exact = profile_1().evaluate_kernel(1.0, x);
    CHECK(std::abs(est.estimate - exact) < 3.0 * est.std_error);
    CHECK(est.std_error < 0.01 * exact);
  }
}

TEST_CASE("mc oracle error scales like the square root of the sample count") {
  const ModelParams mp{1.0, 0.5, 1, 1.0};
  const McEstimate a = mc_subordination_oracle(mp, 1.0, 1.0, 200000, 7);
  const McEstimate b = mc_subordination_oracle(mp, 1.0, 1.0, 400000, 7);
  CHECK(a.std_error / b.std_error == doctest::Approx(std::sqrt(2.0)).epsilon(0.10));
}

TEST_CASE("mc oracle is seed reproducible bit for bit") {
  const ModelParams mp{1.0, 0.5, 1, 1.0};
  const McEstimate a = mc_subordination_oracle(mp, 1.0, 0.5, 50000, 99);
  const McEstimate b = mc_subordination_oracle(mp, 1.0, 0.5, 50000, 99);
  CHECK(a.estimate == b.estimate);
  CHECK(a.std_error == b.std_error);
  const McEstimate c = mc_subordination_oracle(mp, 1.0, 0.5, 50000, 100);
  CHECK(a.estimate != c.estimate);
}

TEST_CASE("sampled inverse-subordinator law matches its density (KS)") {
  const double beta = 0.5, t = 1.0;
  const std::size_t n = 400000;
  std::mt19937_64 rng(31337);
  std::vector<double> samples(n);
  for (auto& s : samples) s = std::pow(t / sample_one_sided_stable(beta, rng), beta);
  std::sort(samples.begin(), samples.end());

  // numeric CDF of f_{E_t} on a fine grid
  const int grid_n = 4000;
  const double s_max = 60.0;
  std::vector<double> cdf(grid_n + 1, 0.0);
  double acc = 0.0, prev = 0.0;
  for (int i = 1; i <= grid_n; ++i) {
    const double s = s_max * i / grid_n;
    const double f = inverse_subordinator_density(beta, t, s);
    acc += 0.5 * (prev + f) * (s_max / grid_n);
    prev = f;
    cdf[i] = acc;
  }
  double ks = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = samples[i];
    if (s >= s_max) break;
    const double pos = s / s_max * grid_n;
    const int lo = static_cast<int>(pos);
    const double F = cdf[lo] + (pos - lo) * (cdf[lo + 1] - cdf[lo]);
    const double emp_hi = static_cast<double>(i + 1) / n;
    const double emp_lo = static_cast<double>(i) / n;
    ks = std::max({ks, std::abs(F - emp_hi), std::abs(F - emp_lo)});
  }
  CHECK(ks < 0.01);
}

TEST_CASE("subordination identity: s-integral of p f_{E_t} equals the kernel") {
  // \int p(s, x) f_{E_t}(s) ds = G(t, x)
  const double beta = 0.5, t = 1.0;
  for (double x : {0.5, 2.0}) {
    auto f = [&](double ls) {
      const double s = std::exp(ls);
      return stable_density_radial(1.0, 1, s, x) * inverse_subordinator_density(beta, t, s) * s;
    };
    const double direct = integrate_adaptive(f, std::log(1e-8), std::log(5e3), 1e-12, 1e-10).value;
    CHECK(direct == doctest::Approx(profile_1().evaluate_kernel(t, x)).epsilon(1e-6));
  }
}

TEST_CASE("bounds suite passes for the default triple") {
  const OracleReport rep = check_bounds_suite(profile_15());
  CHECK(rep.pass);
  CHECK(rep.measured.at("envelope_c1") > 0.0);
  CHECK(rep.measured.at("envelope_c2") / rep.measured.at("envelope_c1") < 100.0);
  CHECK(rep.measured.count("heat_comp_max") == 1);
}

TEST_CASE("bounds suite covers the d = alpha interior log regime") {
  const OracleReport rep = check_bounds_suite(profile_1());
  CHECK(rep.pass);
  CHECK(rep.measured.at("interior_log_ratio_min") > 0.0);
  CHECK(std::isfinite(rep.measured.at("interior_log_ratio_max")));
}

TEST_CASE("derivative checks: finite ratios and exact gaussian anchor") {
  const OracleReport rep = check_derivatives(profile_15());
  CHECK(rep.pass);
  CHECK(std::isfinite(rep.measured.at("time_ratio_max")));
  CHECK(std::isfinite(rep.measured.at("space_ratio_max")));
  CHECK(std::abs(rep.measured.at("holder_slope") - 0.5) < 0.05);

  static const KernelProfile gauss = build_kernel_profile({2.0, 1.0, 1, 1.0});
  const OracleReport grep = check_derivatives(gauss);
  CHECK(grep.pass);
  CHECK(grep.measured.at("time_ratio_max") ==
        doctest::Approx(grep.measured.at("gaussian_expected_ratio")).epsilon(0.01));
}

TEST_CASE("holder check above rho = 1 is existence-only") {
  HolderCheckParams hp;
  hp.rho = 0.9 * 1.5;  // 1.35 > 1
  const OracleReport rep = check_derivatives(profile_15(), hp);
  CHECK(rep.pass);
  CHECK(std::isfinite(rep.measured.at("holder_slope")));
  HolderCheckParams bad;
  bad.rho = 2.0;
  CHECK_THROWS_AS(check_derivatives(profile_15(), bad), std::domain_error);
}

TEST_CASE("lp decay exponents") {
  // a single-cell mass keeps the cusp-driven transient of the sup norm out
  // of the fitting window
  SpaceGrid g{20.0, 1601};
  Field v0 = Field::zero(g);
  v0.values[g.center_index()] = 1.0 / g.dx();
  std::vector<double> times;
  for (int i = 0; i < 12; ++i) times.push_back(std::pow(10.0, 1.0 + 2.0 * i / 11.0));

  const double inf = std::numeric_limits<double>::infinity();
  const OracleReport a = check_lp_decay(profile_15(), v0, 1.0, inf, times);
  CHECK(a.pass);
  CHECK(std::abs(a.measured.at("fitted_exponent") - 1.0 / 3.0) <= 0.05 / 3.0);

  const OracleReport b = check_lp_decay(profile_15(), v0, 1.0, 2.0, times);
  CHECK(b.pass);
  CHECK(std::abs(b.measured.at("fitted_exponent") - 1.0 / 6.0) <= 0.05 / 6.0);

  // p = r: the convolution inequality guarantees nothing, the fit is a floor
  const OracleReport c = check_lp_decay(profile_15(), v0, 2.0, 2.0, times);
  CHECK(c.pass);
  CHECK(c.measured.at("formula_exponent") == 0.0);
  CHECK(c.measured.at("fitted_exponent") > 0.0);

  std::vector<double> narrow = {10.0, 20.0, 40.0, 50.0};
  CHECK_THROWS_AS(check_lp_decay(profile_15(), v0, 1.0, 2.0, narrow), std::domain_error);
  CHECK_THROWS_AS(check_lp_decay(profile_15(), v0, 2.0, 1.0, times), std::domain_error);
}

TEST_CASE("report serialisation is reproducible") {
  const OracleReport a = check_bounds_suite(profile_15());
  const OracleReport b = check_bounds_suite(profile_15());
  CHECK(a.to_json_string() == b.to_json_string());
  CHECK(a.to_json_string().find("envelope_c1") != std::string::npos);
}
