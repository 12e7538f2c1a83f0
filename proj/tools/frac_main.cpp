#include <cstdint>
#include <string>

#include "CLI11.hpp"
#include "frac/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"frac: space-time fractional heat kernels, mild-equation solves and verification"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  unsigned jobs = 0;
  bool seed_given = false, jobs_given = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON experiment config")->required();
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    sub->add_option("--seed", seed, "RNG seed (overrides config)")->each([&](const std::string&) {
      seed_given = true;
    });
    sub->add_option("--jobs", jobs, "worker threads, 0 = all cores")->each([&](const std::string&) {
      jobs_given = true;
    });
  };

  for (const char* name : {"kernel", "solve", "dirichlet", "sweep", "verify"}) add_common(app.add_subcommand(name));

  CLI11_PARSE(app, argc, argv);
  const std::string mode = app.get_subcommands().front()->get_name();
  return frac::run_cli(mode, config_path, out_dir, seed, seed_given, jobs, jobs_given);
}
