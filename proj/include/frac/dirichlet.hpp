#pragma once

#include <optional>
#include <string>
#include <vector>

#include "frac/solver.hpp"
#include "frac/specfun.hpp"

namespace frac {

/// Dirichlet eigenpairs of the fractional Laplacian on (-R, R), discretely
/// L2-orthonormal on the interior grid. alpha = 2 uses the exact sine basis;
/// alpha < 2 comes from the dense fractional centred-difference operator and
/// is flagged approximate.
struct SpectralBasis {
  double alpha = 2.0;
  double radius = 1.0;
  int n_grid = 0;  // interior nodes
  double h = 0.0;  // spacing 2R / (n_grid + 1)
  bool approximate = false;
  std::vector<double> nodes;
  std::vector<double> eigenvalues;          // nu_n, ascending
  std::vector<std::vector<double>> modes;   // phi_n nodal values

  double inner(std::span<const double> a, std::span<const double> b) const;
  void validate() const;
};

SpectralBasis build_basis(double alpha, double radius, int n_grid, int n_modes);

/// G_D(t, x, y) = sum_n E_beta(-nu_n t^beta) phi_n(x) phi_n(y) truncated at
/// the basis size; x, y must be grid nodes (nearest node is used).
double dirichlet_kernel(const SpectralBasis& basis, double beta, double t, double x, double y);

/// Series truncation bound at time t from the Mittag-Leffler upper bound.
double dirichlet_kernel_tail_bound(const SpectralBasis& basis, double beta, double t);

/// <v, phi_1> with the basis inner product; K_{V0, phi_1} at t = 0.
double kaplan_functional(std::span<const double> v, const SpectralBasis& basis);

struct DirichletConfig {
  SpectralBasis basis;
  ModelParams params;
  std::vector<double> v0;  // interior nodal values, >= 0
  TimeMesh mesh;
  double blowup_threshold = 1e6;
  bool nonlinearity_enabled = true;

  void validate() const;
};

/// Product-integration marching of the bounded-domain mild equation through
/// the spectral kernel; records the Kaplan functional F(t) = <V, phi_1> in
/// trace.kaplan. Blow-up detection and refinement follow solver::march.
SolveTrace dirichlet_march(const DirichletConfig& config);

/// Closed-form blow-up time of the comparison ODE
///   Gtilde' / Gtilde^{1+eta} = s^{-beta(1+eta)}.
/// m = beta(1+eta) < 1 starts from Gtilde(0) = K; m >= 1 starts from
/// Gtilde(1) = K and may have no finite blow-up (nullopt) when the remaining
/// integral budget 1/(eta K^eta) exceeds the available one.
std::optional<double> ode_blowup_time(double beta, double eta, double K);

/// Basis cache: CSV of eigenvalues + nodal eigenvectors with a JSON header.
void save_basis(const SpectralBasis& basis, const std::string& csv_path,
                const std::string& json_path);
SpectralBasis load_basis(const std::string& csv_path, const std::string& json_path);

}  // namespace frac
