#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "frac/error.hpp"

namespace frac {

namespace detail {

// Gauss-Kronrod 7-15 nodes/weights on [-1, 1] (QUADPACK values).
inline constexpr std::array<double, 8> kGk15Nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kGk15Weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGauss7Weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

}  // namespace detail

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::int64_t evaluations = 0;
};

/// One Gauss-Kronrod 7-15 panel on [a, b]; error from |K15 - G7|.
template <class F>
QuadratureResult gk15_panel(F&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double kronrod = 0.0, gauss = 0.0;
  for (int i = 0; i < 7; ++i) {
    const double fa = f(c - h * detail::kGk15Nodes[i]);
    const double fb = f(c + h * detail::kGk15Nodes[i]);
    kronrod += detail::kGk15Weights[i] * (fa + fb);
    if (i % 2 == 1) gauss += detail::kGauss7Weights[i / 2] * (fa + fb);
  }
  const double fc = f(c);
  kronrod += detail::kGk15Weights[7] * fc;
  gauss += detail::kGauss7Weights[3] * fc;
  return {kronrod * h, std::abs(kronrod - gauss) * std::abs(h), 15};
}

/// Adaptive Gauss-Kronrod on [a, b] by interval bisection.
/// Throws convergence_error when max_depth splitting cannot meet tolerance.
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, double abs_tol = 1e-12,
                                    double rel_tol = 1e-10, int max_depth = 48) {
  struct Frame {
    double a, b;
    int depth;
  };
  // Explicit stack; worst intervals get subdivided first by LIFO order.
  QuadratureResult total;
  Frame stack[2048];
  int top = 0;
  stack[top++] = {a, b, 0};
  // First pass estimate of the scale for the relative test.
  double scale = std::abs(gk15_panel(f, a, b).value);
  while (top > 0) {
    const Frame fr = stack[--top];
    const QuadratureResult r = gk15_panel(f, fr.a, fr.b);
    total.evaluations += r.evaluations;
    const double tol = std::max(abs_tol, rel_tol * std::max(scale, std::abs(total.value)));
    // Per-interval budget proportional to its length share.
    const double share = std::max(1e-3, (fr.b - fr.a) / (b - a));
    if (r.error_estimate <= tol * share || fr.depth >= max_depth) {
      if (fr.depth >= max_depth && r.error_estimate > 1e3 * tol) {
        throw convergence_error("adaptive quadrature: panel refused to converge", 0.5 * (fr.a + fr.b));
      }
      total.value += r.value;
      total.error_estimate += r.error_estimate;
      continue;
    }
    if (top + 2 >= 2048) throw convergence_error("adaptive quadrature: interval stack overflow", fr.a);
    const double m = 0.5 * (fr.a + fr.b);
    stack[top++] = {fr.a, m, fr.depth + 1};
    stack[top++] = {m, fr.b, fr.depth + 1};
  }
  return total;
}

namespace detail {

template <int N>
struct GaussLegendre;

// clang-format off
template <> struct GaussLegendre<4> {
  static constexpr std::array<double, 2> nodes = {0.3399810435848562648026658, 0.8611363115940525752239465};
  static constexpr std::array<double, 2> weights = {0.6521451548625461426269361, 0.3478548451374538573730639};
};
template <> struct GaussLegendre<8> {
  static constexpr std::array<double, 4> nodes = {0.1834346424956498049394761, 0.5255324099163289858177390,
                                                  0.7966664774136267395915539, 0.9602898564975362316835609};
  static constexpr std::array<double, 4> weights = {0.3626837833783619829651504, 0.3137066458778872873379622,
                                                    0.2223810344533744705443560, 0.1012285362903762591525314};
};
template <> struct GaussLegendre<16> {
  static constexpr std::array<double, 8> nodes = {0.0950125098376374401853193, 0.2816035507792589132304605,
                                                  0.4580167776572273863424194, 0.6178762444026437484466718,
                                                  0.7554044083550030338951012, 0.8656312023878317438804679,
                                                  0.9445750230732325760779884, 0.9894009349916499325961542};
  static constexpr std::array<double, 8> weights = {0.1894506104550684962853967, 0.1826034150449235888667637,
                                                    0.1691565193950025381893121, 0.1495959888165767320815017,
                                                    0.1246289712555338720524763, 0.0951585116824927848099251,
                                                    0.0622535239386478928628438, 0.0271524594117540948517806};
};
// clang-format on

}  // namespace detail

/// Calls visit(x_i, w_i) for each Gauss-Legendre node on [a, b]; the weights
/// carry the interval half-length, so summing f(x_i) * w_i integrates f.
template <int N, class V>
void gauss_legendre_visit(V&& visit, double a, double b) {
  static_assert(N == 4 || N == 8 || N == 16);
  using T = detail::GaussLegendre<N>;
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  for (std::size_t i = 0; i < T::nodes.size(); ++i) {
    visit(c - h * T::nodes[i], h * T::weights[i]);
    visit(c + h * T::nodes[i], h * T::weights[i]);
  }
}

/// Fixed-order Gauss-Legendre on [a, b]. N in {4, 8, 16}.
template <int N, class F>
double gauss_legendre(F&& f, double a, double b) {
  double sum = 0.0;
  gauss_legendre_visit<N>([&](double x, double w) { sum += w * f(x); }, a, b);
  return sum;
}

}  // namespace frac
