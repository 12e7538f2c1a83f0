#include "frac/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace frac {

namespace {

using nlohmann::json;

double require_number(const json& j, const std::string& path, const char* key, double fallback,
                      bool required = false) {
  if (!j.contains(key)) {
    if (required) throw config_error(path + "/" + key, "missing required field");
    return fallback;
  }
  if (!j[key].is_number()) throw config_error(path + "/" + key, "expected a number");
  return j[key].get<double>();
}

std::int64_t require_int(const json& j, const std::string& path, const char* key,
                         std::int64_t fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) throw config_error(path + "/" + key, "expected an integer");
  return j[key].get<std::int64_t>();
}

std::string require_string(const json& j, const std::string& path, const char* key,
                           const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_string()) throw config_error(path + "/" + key, "expected a string");
  return j[key].get<std::string>();
}

void check_positive(double v, const std::string& path) {
  if (!(v > 0.0)) throw config_error(path, "must be positive");
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw config_error("/", std::string("invalid JSON: ") + e.what());
  }
  ExperimentConfig c;

  c.mode = require_string(j, "", "mode", c.mode);
  const bool known = c.mode == "kernel" || c.mode == "solve" || c.mode == "dirichlet" ||
                     c.mode == "sweep" || c.mode == "verify";
  if (!known) throw config_error("/mode", "unknown mode '" + c.mode + "'");

  if (j.contains("params")) {
    const json& p = j["params"];
    if (!p.is_object()) throw config_error("/params", "expected an object");
    c.params.alpha = require_number(p, "/params", "alpha", c.params.alpha);
    c.params.beta = require_number(p, "/params", "beta", c.params.beta);
    c.params.dim = static_cast<int>(require_int(p, "/params", "dim", c.params.dim));
    c.params.eta = require_number(p, "/params", "eta", c.params.eta);
    if (!(c.params.alpha > 0.0) || c.params.alpha > 2.0)
      throw config_error("/params/alpha", "must lie in (0, 2]");
    if (!(c.params.beta > 0.0) || c.params.beta > 1.0)
      throw config_error("/params/beta", "must lie in (0, 1]");
    if (c.params.dim < 1) throw config_error("/params/dim", "must be >= 1");
    if (!(c.params.eta > 0.0)) throw config_error("/params/eta", "must be positive");
  }

  if (j.contains("grid")) {
    const json& g = j["grid"];
    c.grid_half_width = require_number(g, "/grid", "half_width", c.grid_half_width);
    c.grid_points = static_cast<int>(require_int(g, "/grid", "points", c.grid_points));
    check_positive(c.grid_half_width, "/grid/half_width");
    if (c.grid_points < 3 || c.grid_points % 2 == 0)
      throw config_error("/grid/points", "must be odd and >= 3");
  }

  if (j.contains("mesh")) {
    const json& m = j["mesh"];
    c.mesh_horizon = require_number(m, "/mesh", "horizon", c.mesh_horizon);
    c.mesh_steps = static_cast<int>(require_int(m, "/mesh", "steps", c.mesh_steps));
    c.mesh_grading = require_number(m, "/mesh", "grading", c.mesh_grading);
    check_positive(c.mesh_horizon, "/mesh/horizon");
    if (c.mesh_steps < 1) throw config_error("/mesh/steps", "must be >= 1");
    if (c.mesh_grading < 1.0) throw config_error("/mesh/grading", "must be >= 1");
  }

  if (j.contains("v0")) {
    const json& v = j["v0"];
    c.v0.shape = require_string(v, "/v0", "shape", c.v0.shape);
    c.v0.amplitude = require_number(v, "/v0", "amplitude", c.v0.amplitude);
    c.v0.radius = require_number(v, "/v0", "radius", c.v0.radius);
    c.v0.gamma = require_number(v, "/v0", "gamma", c.v0.gamma);
    const bool ok = c.v0.shape == "indicator" || c.v0.shape == "kernel" ||
                    c.v0.shape == "delta" || c.v0.shape == "scaled_phi1" || c.v0.shape == "zero";
    if (!ok) throw config_error("/v0/shape", "unknown shape '" + c.v0.shape + "'");
    if (c.v0.amplitude < 0.0) throw config_error("/v0/amplitude", "must be nonnegative");
    check_positive(c.v0.radius, "/v0/radius");
    check_positive(c.v0.gamma, "/v0/gamma");
  }

  if (j.contains("solve")) {
    const json& s = j["solve"];
    c.blowup_threshold = require_number(s, "/solve", "blowup_threshold", c.blowup_threshold);
    c.picard_tol = require_number(s, "/solve", "picard_tol", c.picard_tol);
    c.picard_max_iters = static_cast<int>(require_int(s, "/solve", "picard_max_iters", c.picard_max_iters));
    check_positive(c.blowup_threshold, "/solve/blowup_threshold");
    check_positive(c.picard_tol, "/solve/picard_tol");
    if (c.picard_max_iters < 1) throw config_error("/solve/picard_max_iters", "must be >= 1");
    if (s.contains("decay_test")) {
      const json& d = s["decay_test"];
      if (!d.is_object()) throw config_error("/solve/decay_test", "expected an object");
      DecayTest dt;
      dt.gamma = require_number(d, "/solve/decay_test", "gamma", 1.0);
      dt.delta = require_number(d, "/solve/decay_test", "delta", 0.01);
      check_positive(dt.gamma, "/solve/decay_test/gamma");
      check_positive(dt.delta, "/solve/decay_test/delta");
      c.decay_test = dt;
    }
  }

  if (j.contains("kernel")) {
    const json& k = j["kernel"];
    c.kernel_options.grid_points =
        static_cast<int>(require_int(k, "/kernel", "grid_points", c.kernel_options.grid_points));
    c.kernel_options.z_min = require_number(k, "/kernel", "z_min", c.kernel_options.z_min);
    c.kernel_options.z_max = require_number(k, "/kernel", "z_max", c.kernel_options.z_max);
    c.kernel_options.rel_tol = require_number(k, "/kernel", "rel_tol", c.kernel_options.rel_tol);
    c.kernel_options.quadrature_budget = static_cast<int>(
        require_int(k, "/kernel", "quadrature_budget", c.kernel_options.quadrature_budget));
    c.profile_cache = require_string(k, "/kernel", "cache_dir", c.profile_cache);
    if (c.kernel_options.grid_points < 16) throw config_error("/kernel/grid_points", "must be >= 16");
    if (!(c.kernel_options.z_min > 0.0) || !(c.kernel_options.z_max > c.kernel_options.z_min))
      throw config_error("/kernel/z_min", "need 0 < z_min < z_max");
  }

  if (j.contains("dirichlet")) {
    const json& d = j["dirichlet"];
    c.dirichlet_radius = require_number(d, "/dirichlet", "radius", c.dirichlet_radius);
    c.dirichlet_n_grid = static_cast<int>(require_int(d, "/dirichlet", "n_grid", c.dirichlet_n_grid));
    c.dirichlet_n_modes = static_cast<int>(require_int(d, "/dirichlet", "n_modes", c.dirichlet_n_modes));
    if (d.contains("nonlinearity") && !d["nonlinearity"].is_boolean())
      throw config_error("/dirichlet/nonlinearity", "expected a boolean");
    c.nonlinearity_enabled = d.value("nonlinearity", true);
    check_positive(c.dirichlet_radius, "/dirichlet/radius");
    if (c.dirichlet_n_modes < 1) throw config_error("/dirichlet/n_modes", "must be >= 1");
    if (c.dirichlet_n_grid < c.dirichlet_n_modes + 2)
      throw config_error("/dirichlet/n_grid", "too coarse for the requested mode count");
  }

  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    if (!s.contains("etas") || !s["etas"].is_array())
      throw config_error("/sweep/etas", "expected an array of eta values");
    for (std::size_t i = 0; i < s["etas"].size(); ++i) {
      const auto& e = s["etas"][i];
      std::ostringstream path;
      path << "/sweep/etas/" << i;
      if (!e.is_number()) throw config_error(path.str(), "expected a number");
      const double eta = e.get<double>();
      if (!(eta > 0.0)) throw config_error(path.str(), "must be positive");
      c.sweep_etas.push_back(eta);
    }
  }
  if (c.mode == "sweep" && c.sweep_etas.empty())
    throw config_error("/sweep/etas", "sweep mode requires a nonempty eta list");

  if (j.contains("verify")) {
    const json& v = j["verify"];
    const double samples = require_number(v, "/verify", "mc_samples", static_cast<double>(c.mc_samples));
    if (!(samples >= 1000.0)) throw config_error("/verify/mc_samples", "need at least 10^3 samples");
    c.mc_samples = static_cast<std::uint64_t>(samples);
    if (v.contains("checks")) {
      if (!v["checks"].is_array()) throw config_error("/verify/checks", "expected an array");
      for (std::size_t i = 0; i < v["checks"].size(); ++i) {
        const auto& e = v["checks"][i];
        std::ostringstream path;
        path << "/verify/checks/" << i;
        if (!e.is_string()) throw config_error(path.str(), "expected a string");
        const std::string name = e.get<std::string>();
        if (name != "bounds" && name != "derivatives" && name != "lp_decay" && name != "mc")
          throw config_error(path.str(), "unknown check '" + name + "'");
        c.verify_checks.push_back(name);
      }
    }
  }

  if (j.contains("output")) {
    c.out_dir = require_string(j["output"], "/output", "dir", c.out_dir);
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
      throw config_error("/seed", "expected an integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("jobs")) c.jobs = static_cast<unsigned>(require_int(j, "", "jobs", c.jobs));
  return c;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("/", "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string ExperimentConfig::resolved_json() const {
  nlohmann::json j;
  j["mode"] = mode;
  j["params"] = {{"alpha", params.alpha}, {"beta", params.beta}, {"dim", params.dim}, {"eta", params.eta}};
  j["grid"] = {{"half_width", grid_half_width}, {"points", grid_points}};
  j["mesh"] = {{"horizon", mesh_horizon}, {"steps", mesh_steps}, {"grading", mesh_grading}};
  j["v0"] = {{"shape", v0.shape}, {"amplitude", v0.amplitude}, {"radius", v0.radius}, {"gamma", v0.gamma}};
  j["solve"] = {{"blowup_threshold", blowup_threshold},
                {"picard_tol", picard_tol},
                {"picard_max_iters", picard_max_iters}};
  if (decay_test)
    j["solve"]["decay_test"] = {{"gamma", decay_test->gamma}, {"delta", decay_test->delta}};
  j["kernel"] = {{"grid_points", kernel_options.grid_points},
                 {"z_min", kernel_options.z_min},
                 {"z_max", kernel_options.z_max},
                 {"rel_tol", kernel_options.rel_tol},
                 {"quadrature_budget", kernel_options.quadrature_budget},
                 {"cache_dir", profile_cache}};
  j["dirichlet"] = {{"radius", dirichlet_radius},
                    {"n_grid", dirichlet_n_grid},
                    {"n_modes", dirichlet_n_modes},
                    {"nonlinearity", nonlinearity_enabled}};
  if (!sweep_etas.empty()) j["sweep"] = {{"etas", sweep_etas}};
  j["verify"] = {{"mc_samples", mc_samples}, {"checks", verify_checks}};
  j["seed"] = seed;
  // jobs and the output directory are execution knobs, not experiment
  // content: identical configs must reproduce identical bytes wherever and
  // however they run
  return j.dump(2);
}

Field make_initial_field(const InitialDataSpec& spec, const SpaceGrid& grid,
                         const KernelProfile& profile) {
  Field f = Field::zero(grid);
  if (spec.shape == "zero") return f;
  if (spec.shape == "indicator") {
    for (int i = 0; i < grid.points; ++i)
      if (std::abs(grid.x(i)) <= spec.radius) f.values[i] = spec.amplitude;
    return f;
  }
  if (spec.shape == "delta") {
    f.values[grid.center_index()] = spec.amplitude / grid.dx();
    return f;
  }
  if (spec.shape == "kernel") {
    for (int i = 0; i < grid.points; ++i)
      f.values[i] = spec.amplitude * profile.evaluate_kernel(spec.gamma, grid.x(i));
    return f;
  }
  throw config_error("/v0/shape", "shape '" + spec.shape + "' is not valid for whole-space runs");
}

}  // namespace frac
