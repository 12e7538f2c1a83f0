#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "frac/operators.hpp"

namespace frac {

/// Decay-mode hypothesis: v0 <= delta * G(gamma, .), checked at validation.
struct DecayTest {
  double gamma = 1.0;
  double delta = 0.01;
};

struct SolveConfig {
  ModelParams params;
  SpaceGrid grid;
  TimeMesh mesh;
  Field v0;
  double blowup_threshold = 1e6;
  double picard_tol = 1e-8;
  int picard_max_iters = 50;
  std::optional<DecayTest> decay_test;
  bool nonlinearity_enabled = true;
  unsigned jobs = 0;

  void validate(const KernelProfile& profile) const;
};

enum class Verdict { kGlobalUpToHorizon, kBlowup };

std::string verdict_name(Verdict v);

/// Per-node diagnostics of one marched (or iterated) solve.
struct SolveTrace {
  std::vector<double> times;
  std::vector<double> sup_norms;
  std::vector<double> l1_norms;
  std::vector<double> l2_norms;
  std::vector<double> weighted_ratio;      // sup_x V / G(t + gamma, .); decay mode only
  std::vector<double> parabolic_infimum;   // F(t) = t^{beta d/alpha} inf_{|x|<=t^{beta/alpha}} V
  std::vector<double> kaplan;              // Dirichlet runs: F(t) = <V, phi_1>
  std::vector<std::vector<double>> snapshots;

  Verdict verdict = Verdict::kGlobalUpToHorizon;
  double blowup_time = 0.0;
  double blowup_uncertainty = 0.0;
  bool refinement_confirmed = false;
  double max_tail_mass = 0.0;
  std::string note;
};

/// Explicit product-integration marching of the mild equation
///   V(t_k) = G V0 (t_k) + (A V)(t_k).
/// On a threshold crossing the solve repeats once on a refined mesh and the
/// verdict carries the refined blow-up time with the inter-mesh shift as its
/// uncertainty. Escalates to truncation_error when the kernel tail estimate
/// exceeds 5%.
SolveTrace march(const KernelProfile& profile, const SolveConfig& config);

/// Picard iteration V_{n+1} = G V0 + A V_n started from the G V0 term alone,
/// over mesh nodes up to `horizon`. Returns the iterates' fixed point and the
/// iteration count. Throws no_contraction when the successive-difference
/// norm grows three times in a row.
std::pair<std::vector<Field>, int> picard(const KernelProfile& profile, const SolveConfig& config,
                                          double horizon);

/// sup_x V(t_k, x) / G(t_k + gamma, x) per field.
std::vector<double> weighted_ratio_monitor(const KernelProfile& profile,
                                           std::span<const Field> fields, double gamma);

/// Least-squares slope a of -log sup_x (G V0)(t, .) against log t over
/// t in [10, 10^3]. The slope estimates eta* = beta d / alpha, whose
/// reciprocal is the critical exponent eta_c.
double estimate_eta_star(const KernelProfile& profile, const Field& v0, int sample_count = 24);

}  // namespace frac
