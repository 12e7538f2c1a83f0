#pragma once

#include <cstddef>
#include <vector>

namespace frac {

/// Monotone cubic Hermite interpolant (Fritsch-Carlson slopes).
/// Shape-preserving: monotone data yield a monotone interpolant.
class PchipInterpolant {
 public:
  PchipInterpolant() = default;
  /// x strictly increasing, sizes equal and >= 2.
  PchipInterpolant(std::vector<double> x, std::vector<double> y);

  /// Evaluate at q; linear continuation of the end cubics outside [x0, xn].
  double operator()(double q) const;
  /// Derivative of the interpolant at q.
  double derivative(double q) const;
  /// Exact integral of the piecewise cubic over [x0, q] (q clamped to range).
  double integral_from_start(double q) const;

  bool empty() const { return x_.empty(); }
  double x_front() const { return x_.front(); }
  double x_back() const { return x_.back(); }

 private:
  std::size_t find_panel(double q) const;
  std::vector<double> x_, y_, d_;
  std::vector<double> cum_;  // integral up to each node
};

}  // namespace frac
