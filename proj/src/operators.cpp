#include "frac/operators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "frac/error.hpp"
#include "frac/parallel.hpp"
#include "frac/quadrature.hpp"

#include "json.hpp"

namespace frac {

std::vector<double> SpaceGrid::nodes() const {
  std::vector<double> xs(points);
  for (int i = 0; i < points; ++i) xs[i] = x(i);
  return xs;
}

void SpaceGrid::validate() const {
  if (!(half_width > 0.0)) throw std::domain_error("grid: half_width must be positive");
  if (points < 3 || points % 2 == 0) throw std::domain_error("grid: points must be odd and >= 3");
}

TimeMesh TimeMesh::graded(double horizon, int steps, double grading) {
  if (!(horizon > 0.0) || steps < 1) throw std::domain_error("mesh: horizon and steps must be positive");
  if (grading < 1.0) throw std::domain_error("mesh: grading exponent must be >= 1");
  TimeMesh m;
  m.horizon = horizon;
  m.steps = steps;
  m.grading = grading;
  m.nodes.resize(steps + 1);
  for (int k = 0; k <= steps; ++k)
    m.nodes[k] = horizon * std::pow(static_cast<double>(k) / steps, grading);
  m.nodes[0] = 0.0;
  m.nodes[steps] = horizon;
  return m;
}

TimeMesh TimeMesh::refined() const { return graded(horizon, 2 * steps, grading); }

void TimeMesh::validate() const {
  if (nodes.size() < 2 || nodes.front() != 0.0) throw std::domain_error("mesh: nodes must start at 0");
  for (std::size_t k = 1; k < nodes.size(); ++k)
    if (!(nodes[k] > nodes[k - 1])) throw std::domain_error("mesh: nodes must be strictly increasing");
}

Field Field::zero(const SpaceGrid& g, double t) {
  Field f;
  f.grid = g;
  f.values.assign(g.points, 0.0);
  f.time_stamp = t;
  return f;
}

double Field::sup() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

bool Field::all_finite() const {
  for (double v : values)
    if (!std::isfinite(v)) return false;
  return true;
}

NormSpec fixed_point_norm_spec(const ModelParams& params, double p) {
  const double q_c = params.beta * params.dim * params.eta / params.alpha;
  if (!(p > q_c)) throw std::domain_error("norm spec: need p > beta d eta / alpha");
  const double theta =
      params.beta * params.dim / params.alpha * (params.alpha / (params.beta * params.dim * params.eta) - 1.0 / p);
  if (!((1.0 + params.eta) * theta < 1.0))
    throw std::domain_error("norm spec: (1 + eta) theta must be < 1");
  return {p, theta};
}

double norm(const Field& field, const NormSpec& spec) {
  if (!(spec.p >= 1.0)) throw std::domain_error("norm: p must be >= 1");
  double value;
  if (std::isinf(spec.p)) {
    value = field.sup();
  } else {
    const double dx = field.grid.dx();
    double acc = 0.0;
    const auto& v = field.values;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double w = (i == 0 || i + 1 == v.size()) ? 0.5 : 1.0;
      acc += w * std::pow(std::abs(v[i]), spec.p);
    }
    value = std::pow(acc * dx, 1.0 / spec.p);
  }
  if (spec.theta != 0.0) value *= std::pow(field.time_stamp, spec.theta);
  return value;
}

namespace {

// Cell-mass kernel row at fixed time: row[m] = mass of G(t, .) over the
// dx-cell centred at lag m. Queries the cumulative profile at half-grid
// radii, which are increasing, so a panel hint makes this a linear sweep.
std::vector<double> cell_row(const KernelProfile& profile, double t, const SpaceGrid& grid) {
  const int n = grid.points;
  const double dx = grid.dx();
  std::vector<double> half(n + 1);
  for (int m = 0; m <= n; ++m) half[m] = profile.mass_within(t, (m + 0.5) * dx);
  std::vector<double> row(n);
  row[0] = half[0];
  for (int m = 1; m < n; ++m) row[m] = 0.5 * (half[m] - half[m - 1]);
  return row;
}

void convolve_add(const std::vector<double>& row, const std::vector<double>& f,
                  std::vector<double>& out, std::size_t begin, std::size_t end) {
  const int n = static_cast<int>(f.size());
  for (std::size_t i = begin; i < end; ++i) {
    const int ii = static_cast<int>(i);
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += row[std::abs(ii - j)] * f[j];
    out[i] += acc;
  }
}

}  // namespace

Field apply_G(const KernelProfile& profile, const Field& v0, double t, unsigned jobs) {
  if (!(t > 0.0)) throw std::domain_error("apply_G: t must be positive");
  v0.grid.validate();
  Field out = Field::zero(v0.grid, t);
  if (!v0.all_finite()) {
    out.blown_up = true;
    return out;
  }
  const std::vector<double> row = cell_row(profile, t, v0.grid);
  parallel_for(v0.values.size(), jobs, [&](std::size_t b, std::size_t e) {
    convolve_add(row, v0.values, out.values, b, e);
  });

  // Truncation estimate: mass-weighted kernel fraction escaping the padded
  // domain [-L - dx/2, L + dx/2] from each source cell.
  const double dx = v0.grid.dx();
  const double edge = v0.grid.half_width + 0.5 * dx;
  double mass = 0.0, lost = 0.0;
  for (int j = 0; j < v0.grid.points; ++j) {
    const double w = v0.values[j];
    if (w <= 0.0) continue;
    const double xj = v0.grid.x(j);
    const double covered =
        0.5 * (profile.mass_within(t, edge - xj) + profile.mass_within(t, edge + xj));
    mass += w;
    lost += w * std::max(0.0, 1.0 - covered);
  }
  out.tail_mass_estimate = (mass > 0.0) ? lost / mass : 0.0;
  out.truncation_warning = out.tail_mass_estimate > 0.01;
  return out;
}

std::vector<double> panel_kernel_row(const KernelProfile& profile, double t, double s0, double s1,
                                     const SpaceGrid& grid) {
  if (!(s0 < s1) || s1 > t) throw std::domain_error("panel_kernel_row: need s0 < s1 <= t");
  const int n = grid.points;
  const double dx = grid.dx();
  const double tau0 = t - s1;  // may be 0 (adjacent panel)
  const double tau1 = t - s0;

  std::vector<double> half(n + 1, 0.0);
  auto accumulate_tau = [&](double tau, double weight) {
    for (int m = 0; m <= n; ++m) half[m] += weight * profile.mass_within(tau, (m + 0.5) * dx);
  };

  if (tau0 > 0.05 * tau1) {
    gauss_legendre_visit<4>([&](double tau, double w) { accumulate_tau(tau, w); }, tau0, tau1);
  } else {
    // Left edge reaches the kernel concentration: cluster nodes with a cubic
    // substitution tau = tau0 + (tau1 - tau0) sigma^3.
    gauss_legendre_visit<16>(
        [&](double sigma, double w) {
          const double tau = tau0 + (tau1 - tau0) * sigma * sigma * sigma;
          accumulate_tau(tau, w * 3.0 * sigma * sigma * (tau1 - tau0));
        },
        0.0, 1.0);
  }

  std::vector<double> row(n);
  row[0] = half[0];
  for (int m = 1; m < n; ++m) row[m] = 0.5 * (half[m] - half[m - 1]);
  return row;
}

Field apply_A(const KernelProfile& profile, std::span<const Field> history, const TimeMesh& mesh,
              int k, double eta, unsigned jobs) {
  mesh.validate();
  if (k < 1 || static_cast<std::size_t>(k) >= mesh.nodes.size())
    throw std::domain_error("apply_A: target index outside mesh");
  if (history.size() < static_cast<std::size_t>(k))
    throw std::domain_error("apply_A: history shorter than target index");
  const SpaceGrid& grid = history[0].grid;
  const double t = mesh.nodes[k];
  Field out = Field::zero(grid, t);

  for (int j = 0; j < k; ++j) {
    if (history[j].blown_up || !history[j].all_finite()) {
      out.blown_up = true;
      return out;
    }
  }

  const double expo = 1.0 + eta;
  std::vector<std::vector<double>> rows(k);
  std::vector<std::vector<double>> powed(k);
  for (int j = 0; j < k; ++j) {
    const Field& fj = history[j];
    double mx = 0.0;
    for (double v : fj.values) mx = std::max(mx, v);
    if (mx <= 0.0) continue;  // zero panel contributes nothing
    rows[j] = panel_kernel_row(profile, t, mesh.nodes[j], mesh.nodes[j + 1], grid);
    auto& p = powed[j];
    p.resize(fj.values.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::pow(std::max(fj.values[i], 0.0), expo);
  }

  parallel_for(out.values.size(), jobs, [&](std::size_t b, std::size_t e) {
    for (int j = 0; j < k; ++j) {
      if (rows[j].empty()) continue;
      convolve_add(rows[j], powed[j], out.values, b, e);
    }
  });
  if (!out.all_finite()) out.blown_up = true;
  return out;
}

void save_field(const Field& field, const ModelParams& params, const std::string& csv_path,
                const std::string& json_path) {
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot write " + csv_path);
  csv << "x,value\n";
  char buf[96];
  for (int i = 0; i < field.grid.points; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", field.grid.x(i), field.values[i]);
    csv << buf;
  }
  nlohmann::json j;
  j["t"] = field.time_stamp;
  j["params"] = {{"alpha", params.alpha}, {"beta", params.beta}, {"dim", params.dim}, {"eta", params.eta}};
  j["grid"] = {{"half_width", field.grid.half_width}, {"points", field.grid.points}};
  j["tail_mass_estimate"] = field.tail_mass_estimate;
  std::ofstream js(json_path);
  if (!js) throw std::runtime_error("cannot write " + json_path);
  js << j.dump(2) << "\n";
}

}  // namespace frac
