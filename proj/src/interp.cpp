#include "frac/interp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace frac {

namespace {

double sign(double v) { return (v > 0) - (v < 0); }

}  // namespace

PchipInterpolant::PchipInterpolant(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) throw std::invalid_argument("pchip: need >= 2 matching nodes");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("pchip: abscissae not increasing");

  std::vector<double> h(n - 1), delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    delta[i] = (y_[i + 1] - y_[i]) / h[i];
  }
  d_.assign(n, 0.0);
  if (n == 2) {
    d_[0] = d_[1] = delta[0];
  } else {
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (delta[i - 1] * delta[i] <= 0.0) {
        d_[i] = 0.0;
      } else {
        const double w1 = 2.0 * h[i] + h[i - 1];
        const double w2 = h[i] + 2.0 * h[i - 1];
        d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
      }
    }
    // Shape-preserving one-sided end slopes.
    auto end_slope = [](double h0, double h1, double d0, double d1) {
      double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
      if (sign(s) != sign(d0)) s = 0.0;
      else if (sign(d0) != sign(d1) && std::abs(s) > 3.0 * std::abs(d0)) s = 3.0 * d0;
      return s;
    };
    d_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  }

  cum_.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    // Exact integral of the cubic Hermite panel.
    cum_[i + 1] = cum_[i] + h[i] * 0.5 * (y_[i] + y_[i + 1]) + h[i] * h[i] * (d_[i] - d_[i + 1]) / 12.0;
  }
}

std::size_t PchipInterpolant::find_panel(double q) const {
  const auto it = std::upper_bound(x_.begin(), x_.end(), q);
  std::size_t i = static_cast<std::size_t>(it - x_.begin());
  if (i == 0) return 0;
  if (i >= x_.size()) return x_.size() - 2;
  return i - 1;
}

double PchipInterpolant::operator()(double q) const {
  const std::size_t i = find_panel(q);
  const double h = x_[i + 1] - x_[i];
  const double t = (q - x_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  return h00 * y_[i] + h * h10 * d_[i] + h01 * y_[i + 1] + h * h11 * d_[i + 1];
}

double PchipInterpolant::derivative(double q) const {
  const std::size_t i = find_panel(q);
  const double h = x_[i + 1] - x_[i];
  const double t = (q - x_[i]) / h;
  const double t2 = t * t;
  const double h00 = (6 * t2 - 6 * t) / h;
  const double h10 = 3 * t2 - 4 * t + 1;
  const double h01 = (-6 * t2 + 6 * t) / h;
  const double h11 = 3 * t2 - 2 * t;
  return h00 * y_[i] + h10 * d_[i] + h01 * y_[i + 1] + h11 * d_[i + 1];
}

double PchipInterpolant::integral_from_start(double q) const {
  q = std::clamp(q, x_.front(), x_.back());
  const std::size_t i = find_panel(q);
  const double h = x_[i + 1] - x_[i];
  const double t = (q - x_[i]) / h;
  const double t2 = t * t, t3 = t2 * t, t4 = t2 * t2;
  // Antiderivatives of the Hermite basis on [0, t], scaled by h.
  const double H00 = 0.5 * t4 - t3 + t;
  const double H10 = 0.25 * t4 - (2.0 / 3.0) * t3 + 0.5 * t2;
  const double H01 = -0.5 * t4 + t3;
  const double H11 = 0.25 * t4 - t3 / 3.0;
  return cum_[i] + h * (H00 * y_[i] + h * H10 * d_[i] + H01 * y_[i + 1] + h * H11 * d_[i + 1]);
}

}  // namespace frac
