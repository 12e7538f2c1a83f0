#include "frac/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "frac/error.hpp"

namespace frac {

namespace {

constexpr double kHardTailLimit = 0.05;

double weighted_sup(const KernelProfile& profile, const Field& f, double gamma) {
  double m = 0.0;
  for (int i = 0; i < f.grid.points; ++i) {
    const double g = profile.evaluate_kernel(f.time_stamp + gamma, f.grid.x(i));
    m = std::max(m, f.values[i] / g);
  }
  return m;
}

double parabolic_infimum(const ModelParams& params, const Field& f) {
  const double t = f.time_stamp;
  if (!(t > 0.0)) return 0.0;
  const double radius = std::pow(t, params.beta / params.alpha);
  const double q = params.beta * params.dim / params.alpha;
  double inf = std::numeric_limits<double>::infinity();
  for (int i = 0; i < f.grid.points; ++i)
    if (std::abs(f.grid.x(i)) <= radius) inf = std::min(inf, f.values[i]);
  if (!std::isfinite(inf)) inf = 0.0;  // ball smaller than one cell
  return std::pow(t, q) * inf;
}

struct MarchResult {
  SolveTrace trace;
  bool crossed = false;
  double crossing_time = 0.0;
  std::vector<Field> fields;
};

MarchResult march_once(const KernelProfile& profile, const SolveConfig& config,
                       const TimeMesh& mesh, bool keep_fields) {
  const int n_steps = mesh.steps;
  MarchResult r;
  SolveTrace& tr = r.trace;

  std::vector<Field> fields;
  fields.reserve(n_steps + 1);
  Field v0 = config.v0;
  v0.time_stamp = 0.0;
  fields.push_back(std::move(v0));

  auto record = [&](const Field& f) {
    tr.times.push_back(f.time_stamp);
    tr.sup_norms.push_back(f.sup());
    tr.l1_norms.push_back(norm(f, {1.0, 0.0}));
    tr.l2_norms.push_back(norm(f, {2.0, 0.0}));
    tr.parabolic_infimum.push_back(parabolic_infimum(config.params, f));
    if (config.decay_test)
      tr.weighted_ratio.push_back(weighted_sup(profile, f, config.decay_test->gamma));
  };
  record(fields.front());

  for (int k = 1; k <= n_steps; ++k) {
    const double t = mesh.nodes[k];
    Field gk = apply_G(profile, fields.front(), t, config.jobs);
    tr.max_tail_mass = std::max(tr.max_tail_mass, gk.tail_mass_estimate);
    if (gk.tail_mass_estimate > kHardTailLimit)
      throw truncation_error("march: spatial domain too small for the requested horizon",
                             gk.tail_mass_estimate);
    Field vk = std::move(gk);
    if (config.nonlinearity_enabled) {
      Field ak = apply_A(profile, fields, mesh, k, config.params.eta, config.jobs);
      for (int i = 0; i < vk.grid.points; ++i) vk.values[i] += ak.values[i];
      vk.blown_up = ak.blown_up;
    }
    vk.blown_up = vk.blown_up || !vk.all_finite();
    record(vk);
    const double sup = tr.sup_norms.back();
    fields.push_back(std::move(vk));
    if (fields.back().blown_up || sup > config.blowup_threshold) {
      r.crossed = true;
      r.crossing_time = t;
      break;
    }
  }
  if (keep_fields) {
    for (const Field& f : fields) tr.snapshots.push_back(f.values);
    r.fields = std::move(fields);
  }
  return r;
}

}  // namespace

std::string verdict_name(Verdict v) {
  return v == Verdict::kBlowup ? "blowup" : "global-up-to-horizon";
}

void SolveConfig::validate(const KernelProfile& profile) const {
  params.validate();
  grid.validate();
  mesh.validate();
  if (v0.grid.points != grid.points || v0.grid.half_width != grid.half_width)
    throw std::domain_error("config: v0 grid differs from solve grid");
  if (static_cast<int>(v0.values.size()) != grid.points)
    throw std::domain_error("config: v0 size mismatch");
  for (double v : v0.values)
    if (!(v >= 0.0)) throw std::domain_error("config: v0 must be nonnegative and finite");
  if (!(blowup_threshold > 0.0) || !(picard_tol > 0.0) || picard_max_iters < 1)
    throw std::domain_error("config: thresholds must be positive");
  if (decay_test) {
    if (!(decay_test->gamma > 0.0) || !(decay_test->delta > 0.0))
      throw std::domain_error("config: decay test parameters must be positive");
    for (int i = 0; i < grid.points; ++i) {
      const double bound = decay_test->delta * profile.evaluate_kernel(decay_test->gamma, grid.x(i));
      if (v0.values[i] > bound * (1.0 + 1e-12))
        throw std::domain_error("config: v0 violates the decay-test bound delta G(gamma, x)");
    }
  }
}

SolveTrace march(const KernelProfile& profile, const SolveConfig& config) {
  config.validate(profile);
  MarchResult base = march_once(profile, config, config.mesh, true);
  SolveTrace trace = std::move(base.trace);

  if (!base.crossed) {
    trace.verdict = Verdict::kGlobalUpToHorizon;
    return trace;
  }
  // Confirm the crossing on a refined mesh; report the refined time with the
  // inter-mesh discrepancy as the uncertainty.
  MarchResult fine = march_once(profile, config, config.mesh.refined(), false);
  trace.verdict = Verdict::kBlowup;
  if (fine.crossed) {
    trace.blowup_time = fine.crossing_time;
    trace.blowup_uncertainty = std::abs(fine.crossing_time - base.crossing_time);
    trace.refinement_confirmed =
        trace.blowup_uncertainty <= 0.15 * std::max(fine.crossing_time, 1e-300);
    if (!trace.refinement_confirmed)
      trace.note = "threshold crossing shifted by more than 15% under mesh refinement";
  } else {
    trace.blowup_time = base.crossing_time;
    trace.blowup_uncertainty = std::numeric_limits<double>::infinity();
    trace.refinement_confirmed = false;
    trace.note = "refined mesh did not cross the threshold before the horizon";
  }
  return trace;
}

std::pair<std::vector<Field>, int> picard(const KernelProfile& profile, const SolveConfig& config,
                                          double horizon) {
  config.validate(profile);
  TimeMesh mesh = config.mesh;
  while (mesh.nodes.size() > 2 && mesh.nodes.back() > horizon * (1.0 + 1e-12)) {
    mesh.nodes.pop_back();
    mesh.steps = static_cast<int>(mesh.nodes.size()) - 1;
  }
  mesh.horizon = mesh.nodes.back();
  const int m = mesh.steps;

  std::vector<Field> g_term(m + 1);
  g_term[0] = config.v0;
  g_term[0].time_stamp = 0.0;
  for (int k = 1; k <= m; ++k) g_term[k] = apply_G(profile, config.v0, mesh.nodes[k], config.jobs);

  std::vector<Field> current = g_term;
  const double gamma = config.decay_test ? config.decay_test->gamma : 0.0;

  double prev_diff = std::numeric_limits<double>::infinity();
  int growth_streak = 0;
  for (int iter = 1; iter <= config.picard_max_iters; ++iter) {
    std::vector<Field> next(m + 1);
    next[0] = g_term[0];
    for (int k = 1; k <= m; ++k) {
      Field vk = g_term[k];
      if (config.nonlinearity_enabled) {
        Field ak = apply_A(profile, current, mesh, k, config.params.eta, config.jobs);
        if (ak.blown_up) throw no_contraction("picard iterate left the finite range");
        for (int i = 0; i < vk.grid.points; ++i) vk.values[i] += ak.values[i];
      }
      next[k] = std::move(vk);
    }
    double diff = 0.0;
    for (int k = 0; k <= m; ++k) {
      Field d = next[k];
      for (int i = 0; i < d.grid.points; ++i) d.values[i] = std::abs(d.values[i] - current[k].values[i]);
      diff = std::max(diff, config.decay_test ? weighted_sup(profile, d, gamma) : d.sup());
    }
    current = std::move(next);
    if (diff < config.picard_tol) return {std::move(current), iter};
    if (diff > prev_diff) {
      if (++growth_streak >= 3)
        throw no_contraction("successive differences grew for 3 consecutive iterations");
    } else {
      growth_streak = 0;
    }
    prev_diff = diff;
  }
  throw convergence_error("picard: tolerance not reached within the iteration budget",
                          static_cast<double>(config.picard_max_iters));
}

std::vector<double> weighted_ratio_monitor(const KernelProfile& profile,
                                           std::span<const Field> fields, double gamma) {
  std::vector<double> out;
  out.reserve(fields.size());
  for (const Field& f : fields) out.push_back(weighted_sup(profile, f, gamma));
  return out;
}

double estimate_eta_star(const KernelProfile& profile, const Field& v0, int sample_count) {
  if (sample_count < 10) throw std::domain_error("estimate_eta_star: need at least 10 sample times");
  double mass = 0.0;
  for (double v : v0.values) mass += v;
  if (!(mass > 0.0)) throw std::domain_error("estimate_eta_star: v0 must be nonzero");

  std::vector<double> lt(sample_count), ly(sample_count);
  for (int i = 0; i < sample_count; ++i) {
    const double t = std::pow(10.0, 1.0 + 2.0 * i / (sample_count - 1));  // [10, 10^3]
    Field g = apply_G(profile, v0, t);
    lt[i] = std::log(t);
    ly[i] = -std::log(g.sup());
  }
  // least squares slope
  double mx = 0, my = 0;
  for (int i = 0; i < sample_count; ++i) {
    mx += lt[i];
    my += ly[i];
  }
  mx /= sample_count;
  my /= sample_count;
  double num = 0, den = 0;
  for (int i = 0; i < sample_count; ++i) {
    num += (lt[i] - mx) * (ly[i] - my);
    den += (lt[i] - mx) * (lt[i] - mx);
  }
  return num / den;
}

}  // namespace frac
