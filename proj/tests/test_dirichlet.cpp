#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <numbers>

#include "frac/dirichlet.hpp"
#include "frac/error.hpp"

using namespace frac;

namespace {

constexpr double kPi = std::numbers::pi;

const SpectralBasis& sine_basis() {
  static const SpectralBasis b = build_basis(2.0, 1.0, 401, 24);
  return b;
}

// RK4 oracle for the comparison ODE u' = u^{1+eta} s^{-beta(1+eta)} with
// u(0+) = K, run until u explodes; the tail closes analytically from there.
// Independent of the closed-form path under test.
double ode_blowup_rk4(double beta, double eta, double K) {
  const double m = beta * (1.0 + eta);
  auto rhs = [&](double s, double u) { return std::pow(u, 1.0 + eta) * std::pow(s, -m); };
  // the (1-m)-power budget near s = 0 decays slowly, so the start must sit
  // deep enough that the discarded [0, s0] stretch is negligible
  double s = 1e-30, u = K;
  while (u < 1e9) {
    const double h = std::min(2e-4 * s, 0.02 * u / rhs(s, u));
    const double k1 = rhs(s, u);
    const double k2 = rhs(s + 0.5 * h, u + 0.5 * h * k1);
    const double k3 = rhs(s + 0.5 * h, u + 0.5 * h * k2);
    const double k4 = rhs(s + h, u + h * k3);
    u += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    s += h;
  }
  // remaining time to blow-up from u: integral budget u^{-eta}/eta
  const double rem = std::pow(u, -eta) / eta;
  return std::pow(std::pow(s, 1.0 - m) + (1.0 - m) * rem, 1.0 / (1.0 - m));
}

}  // namespace

TEST_CASE("sine basis anchors") {
  const SpectralBasis& b = sine_basis();
  CHECK(b.eigenvalues[0] == doctest::Approx(kPi * kPi / 4.0).epsilon(1e-12));
  CHECK_FALSE(b.approximate);
  // discrete orthonormality across the first 20 modes
  double worst = 0.0;
  for (int m = 0; m < 20; ++m)
    for (int n = m; n < 20; ++n) {
      const double ip = b.inner(b.modes[m], b.modes[n]);
      worst = std::max(worst, std::abs(ip - (m == n ? 1.0 : 0.0)));
    }
  CHECK(worst < 1e-6);
  // phi_1 strictly positive in the interior
  for (double v : b.modes[0]) CHECK(v > 0.0);
}

TEST_CASE("fractional basis: self-convergence of the principal eigenvalue") {
  const SpectralBasis coarse = build_basis(1.5, 1.0, 200, 8);
  const SpectralBasis fine = build_basis(1.5, 1.0, 400, 8);
  CHECK(coarse.approximate);
  CHECK(std::abs(coarse.eigenvalues[0] / fine.eigenvalues[0] - 1.0) < 0.02);
  for (std::size_t n = 1; n < fine.eigenvalues.size(); ++n)
    CHECK(fine.eigenvalues[n] > fine.eigenvalues[n - 1]);
  // known reference: nu_1 of (-Delta)^{1/2} on (-1, 1) is about 1.1578
  const SpectralBasis half = build_basis(1.0, 1.0, 400, 4);
  CHECK(half.eigenvalues[0] == doctest::Approx(1.157774).epsilon(0.02));
  // orthonormality of the discrete eigenvectors
  double worst = 0.0;
  for (int m = 0; m < 8; ++m)
    for (int n = m; n < 8; ++n)
      worst = std::max(worst,
                       std::abs(fine.inner(fine.modes[m], fine.modes[n]) - (m == n ? 1.0 : 0.0)));
  CHECK(worst < 1e-6);
}

TEST_CASE("riesz operator degenerates to the laplacian stencil at alpha = 2") {
  const SpectralBasis cls = build_basis(2.0, 1.0, 200, 6);
  const SpectralBasis frac_b = build_basis(2.0 - 1e-12, 1.0, 200, 6);
  for (int n = 0; n < 6; ++n)
    CHECK(frac_b.eigenvalues[n] ==
          doctest::Approx(cls.eigenvalues[n] * (1.0 - cls.eigenvalues[n] * cls.h * cls.h / 12.0))
              .epsilon(2e-3));
}

TEST_CASE("dirichlet kernel: classical limit matches the sine series") {
  const SpectralBasis& b = sine_basis();
  const double t = 0.3, x = b.nodes[240], y = b.nodes[120];
  double exact = 0.0;
  for (int n = 1; n <= 24; ++n) {
    const double nu = std::pow(n * kPi / 2.0, 2.0);
    exact += std::exp(-nu * t) * std::sin(n * kPi * (x + 1.0) / 2.0) *
             std::sin(n * kPi * (y + 1.0) / 2.0);
  }
  CHECK(dirichlet_kernel(b, 1.0, t, x, y) == doctest::Approx(exact).epsilon(1e-8));
}

TEST_CASE("dirichlet kernel: partial sums concentrate on the diagonal") {
  const double t = 1e-4, x = 0.1;
  double prev = 0.0;
  for (int modes : {4, 8, 16, 32}) {
    const SpectralBasis b = build_basis(2.0, 1.0, 401, modes);
    const double v = dirichlet_kernel(b, 0.5, t, x, x);
    CHECK(v >= prev - 1e-12);
    prev = v;
  }
}

TEST_CASE("dirichlet kernel: first-mode projection reproduces the ML factor") {
  const SpectralBasis& b = sine_basis();
  const double beta = 0.5, t = 0.7;
  // int G_D(t, x, y) phi_1(x) dx = E_beta(-nu_1 t^beta) phi_1(y)
  const double expect = mittag_leffler_neg(beta, b.eigenvalues[0] * std::pow(t, beta));
  for (int iy : {40, 200, 330}) {
    double acc = 0.0;
    for (int ix = 0; ix < b.n_grid; ++ix)
      acc += dirichlet_kernel(b, beta, t, b.nodes[ix], b.nodes[iy]) * b.modes[0][ix];
    acc *= b.h;
    CHECK(acc == doctest::Approx(expect * b.modes[0][iy]).epsilon(1e-6));
  }
}

TEST_CASE("kernel truncation bound decreases in time") {
  const SpectralBasis& b = sine_basis();
  double prev = 1e300;
  for (double t : {0.01, 0.1, 1.0, 10.0}) {
    const double bound = dirichlet_kernel_tail_bound(b, 0.5, t);
    CHECK(bound > 0.0);
    CHECK(bound <= prev);
    prev = bound;
  }
}

TEST_CASE("kaplan functional") {
  const SpectralBasis& b = sine_basis();
  CHECK(kaplan_functional(b.modes[0], b) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(kaplan_functional(b.modes[1], b)) < 1e-10);
  // duplicate trapezoid implementation (boundary values vanish)
  std::vector<double> v(b.n_grid);
  for (int i = 0; i < b.n_grid; ++i) v[i] = std::exp(-b.nodes[i] * b.nodes[i]);
  double trap = 0.0;
  for (int i = 0; i < b.n_grid; ++i) trap += v[i] * b.modes[0][i];
  trap *= b.h;
  CHECK(kaplan_functional(v, b) == doctest::Approx(trap).epsilon(1e-12));
}

TEST_CASE("ode blow-up time closed forms") {
  auto t = ode_blowup_time(0.5, 0.5, 1.0);
  REQUIRE(t.has_value());
  CHECK(*t == doctest::Approx(0.0625).epsilon(1e-12));
  CHECK(*t == doctest::Approx(ode_blowup_rk4(0.5, 0.5, 1.0)).epsilon(1e-6));

  // K -> 0: finite for every K when beta(1+eta) < 1, but growing without bound
  const double t_small = *ode_blowup_time(0.5, 0.5, 1e-3);
  const double t_tiny = *ode_blowup_time(0.5, 0.5, 1e-5);
  CHECK(t_small > 1e3);
  CHECK(t_tiny > t_small);

  // m = beta(1+eta) >= 1: finite only for large K
  CHECK_FALSE(ode_blowup_time(0.6, 1.0, 0.01).has_value());
  CHECK(ode_blowup_time(0.6, 1.0, 50.0).has_value());

  CHECK_THROWS_AS(ode_blowup_time(0.5, 0.5, 0.0), std::domain_error);
  CHECK_THROWS_AS(ode_blowup_time(0.5, 0.5, -1.0), std::domain_error);
}

TEST_CASE("linear mode evolves by the mittag-leffler factor") {
  DirichletConfig c;
  c.basis = build_basis(2.0, 1.0, 401, 16);
  c.params = {2.0, 0.5, 1, 1.0};
  c.mesh = TimeMesh::graded(2.0, 64, 2.0);
  c.nonlinearity_enabled = false;
  const double K = 0.37;
  c.v0.assign(c.basis.n_grid, 0.0);
  for (int i = 0; i < c.basis.n_grid; ++i) c.v0[i] = K * c.basis.modes[0][i];

  const SolveTrace tr = dirichlet_march(c);
  REQUIRE(tr.kaplan.size() == tr.times.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    const double expect =
        K * mittag_leffler_neg(0.5, c.basis.eigenvalues[0] * std::sqrt(tr.times[k]));
    worst = std::max(worst, std::abs(tr.kaplan[k] - expect));
  }
  CHECK(worst < 1e-4);

  // every modal coefficient follows its own factor
  const auto& snap = tr.snapshots.back();
  const double t_end = tr.times.back();
  for (int n = 0; n < 8; ++n) {
    const double a_n = c.basis.inner(snap, c.basis.modes[n]);
    const double expect =
        (n == 0 ? K : 0.0) * mittag_leffler_neg(0.5, c.basis.eigenvalues[n] * std::sqrt(t_end));
    CHECK(std::abs(a_n - expect) < 1e-6);
  }
}

TEST_CASE("polynomial vs exponential linear decay") {
  DirichletConfig c;
  c.basis = build_basis(2.0, 1.0, 301, 12);
  c.params = {2.0, 0.5, 1, 1.0};
  c.mesh = TimeMesh::graded(400.0, 96, 2.0);
  c.nonlinearity_enabled = false;
  c.v0.assign(c.basis.n_grid, 0.0);
  for (int i = 0; i < c.basis.n_grid; ++i) c.v0[i] = c.basis.modes[0][i];

  const SolveTrace frac_tr = dirichlet_march(c);
  // F(t) t^beta approaches a positive constant: 1/(nu_1 Gamma(1-beta))
  const double t_end = frac_tr.times.back();
  const double limit = 1.0 / (c.basis.eigenvalues[0] * std::tgamma(0.5));
  CHECK(frac_tr.kaplan.back() * std::sqrt(t_end) == doctest::Approx(limit).epsilon(0.02));

  c.params.beta = 1.0;
  c.mesh = TimeMesh::graded(10.0, 64, 2.0);
  const SolveTrace cls_tr = dirichlet_march(c);
  const double expect = std::exp(-c.basis.eigenvalues[0] * cls_tr.times.back());
  CHECK(cls_tr.kaplan.back() == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("small eta below 1/beta - 1 blows up even for small data") {
  DirichletConfig c;
  c.basis = build_basis(2.0, 1.0, 201, 24);
  c.params = {2.0, 0.5, 1, 0.5};  // eta < 1/beta - 1 = 1
  c.mesh = TimeMesh::graded(2e7, 384, 3.0);
  c.blowup_threshold = 1e6;
  const double K = 1e-2;
  c.v0.assign(c.basis.n_grid, 0.0);
  for (int i = 0; i < c.basis.n_grid; ++i) c.v0[i] = K * c.basis.modes[0][i];

  const SolveTrace tr = dirichlet_march(c);
  CHECK(tr.verdict == Verdict::kBlowup);
  CHECK(tr.refinement_confirmed);
  // the supersolution comparison: numeric blow-up happens within a moderate
  // multiple of the ODE bound for the measured lower constant
  const auto ode = ode_blowup_time(0.5, 0.5, K);
  REQUIRE(ode.has_value());
  CHECK(tr.blowup_time > *ode * 0.01);
  CHECK(tr.blowup_time < *ode * 1e4);

  // beta = 1 contrast: identical data, classical decay, no blow-up
  DirichletConfig cls = c;
  cls.params.beta = 1.0;
  cls.mesh = TimeMesh::graded(100.0, 128, 2.0);
  const SolveTrace cls_tr = dirichlet_march(cls);
  CHECK(cls_tr.verdict == Verdict::kGlobalUpToHorizon);
  CHECK(cls_tr.sup_norms.back() < 1e-3);
}

namespace fs = std::filesystem;

TEST_CASE("basis cache round trip") {
  const fs::path dir = fs::temp_directory_path() / "frac_basis_cache";
  fs::create_directories(dir);
  const SpectralBasis b = build_basis(1.5, 1.0, 120, 6);
  save_basis(b, (dir / "b.csv").string(), (dir / "b.json").string());
  const SpectralBasis c = load_basis((dir / "b.csv").string(), (dir / "b.json").string());
  CHECK(c.alpha == b.alpha);
  CHECK(c.n_grid == b.n_grid);
  REQUIRE(c.eigenvalues.size() == b.eigenvalues.size());
  for (std::size_t n = 0; n < b.eigenvalues.size(); ++n) {
    CHECK(c.eigenvalues[n] == b.eigenvalues[n]);
    for (int i = 0; i < b.n_grid; ++i) CHECK(c.modes[n][i] == b.modes[n][i]);
  }
  fs::remove_all(dir);
}

TEST_CASE("config validation") {
  DirichletConfig c;
  c.basis = build_basis(2.0, 1.0, 101, 4);
  c.params = {2.0, 0.5, 1, 0.5};
  c.mesh = TimeMesh::graded(1.0, 8, 2.0);
  c.v0.assign(50, 0.0);  // wrong size
  CHECK_THROWS_AS(dirichlet_march(c), std::domain_error);
  c.v0.assign(c.basis.n_grid, -1.0);  // negative data
  CHECK_THROWS_AS(dirichlet_march(c), std::domain_error);
  CHECK_THROWS_AS(build_basis(2.5, 1.0, 101, 4), std::domain_error);
  CHECK_THROWS_AS(build_basis(2.0, 1.0, 4, 4), std::domain_error);
}
