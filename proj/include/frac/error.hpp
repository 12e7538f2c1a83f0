#pragma once

#include <stdexcept>
#include <string>

namespace frac {

/// Parameter combination the library declines to evaluate (e.g. generic
/// alpha in dimension >= 2). Never returns a silently wrong value.
class unsupported_configuration : public std::runtime_error {
 public:
  explicit unsupported_configuration(const std::string& what)
      : std::runtime_error("unsupported-configuration: " + what) {}
};

/// A quadrature or iteration failed to reach its requested tolerance.
class convergence_error : public std::runtime_error {
 public:
  convergence_error(const std::string& what, double worst_point)
      : std::runtime_error(what), worst_point(worst_point) {}
  double worst_point;
};

/// Picard iteration diverged: the data are outside the small-data regime.
class no_contraction : public std::runtime_error {
 public:
  explicit no_contraction(const std::string& what) : std::runtime_error("no-contraction: " + what) {}
};

/// Spatial truncation lost too much kernel mass for the result to be trusted.
class truncation_error : public std::runtime_error {
 public:
  truncation_error(const std::string& what, double tail_mass)
      : std::runtime_error(what), tail_mass(tail_mass) {}
  double tail_mass;
};

}  // namespace frac
