#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "frac/kernel.hpp"
#include "frac/operators.hpp"

namespace frac {

/// rho must satisfy 0 < rho < alpha (and the integrated increment bound is
/// sharp only up to rho = 1).
struct HolderCheckParams {
  double rho = 0.5;
  std::vector<double> offsets = {0.01, 0.0215, 0.0464, 0.1, 0.215, 0.464, 1.0};
};

/// One verification result; everything needed to reproduce it bit-for-bit.
struct OracleReport {
  std::string name;
  bool pass = false;
  std::map<std::string, double> measured;
  std::uint64_t seed = 0;
  std::string detail;

  std::string to_json_string() const;
};

/// One-sided beta-stable draw (Kanter): D = (A(U)/W)^{(1-beta)/beta},
/// U ~ Unif(0, pi), W ~ Exp(1).
double sample_one_sided_stable(double beta, std::mt19937_64& rng);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

/// Monte-Carlo subordination average of p(E_t, x) with E_t = (t/D_1)^beta.
/// Requires a pointwise-evaluable stable density (alpha in {1,2} or d = 1)
/// and at least 10^3 samples.
McEstimate mc_subordination_oracle(const ModelParams& params, double t, double x,
                                   std::size_t n_samples, std::uint64_t seed);

/// Two-sided envelope, d = alpha interior log ratio, and d < alpha
/// comparability, each with a grid-refinement stability gate (+-10%).
OracleReport check_bounds_suite(const KernelProfile& profile);

/// Finite-difference |d_t G| t / G and |grad G| t^{beta/alpha} / G maxima and
/// the integrated-increment slope fit against rho.
OracleReport check_derivatives(const KernelProfile& profile, const HolderCheckParams& holder = {});

/// Fits the decay exponent of ||G V0(t, .)||_r over `times` and compares to
/// (beta d / alpha)(1/p - 1/r); times must span at least one decade.
OracleReport check_lp_decay(const KernelProfile& profile, const Field& v0, double p, double r,
                            std::span<const double> times);

}  // namespace frac
