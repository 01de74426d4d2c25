// Command-line front end: profile | run | sweep | steady.
//
// Settings are resolved in order: built-in defaults, --config file,
// SEAWATER_<KEY> environment variables, command-line flags.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include <seawater/seawater.hpp>

namespace {

struct Flags {
  std::optional<std::string> config_file;
  std::optional<double> rho, nu, mass_f, mass_g, t_max, dt_max, newton_tol, checkpoint_interval;
  std::optional<int> grid_n, newton_max_iter, workers, profile_samples;
  std::optional<unsigned long long> seed;
  std::optional<std::string> mesh_file, out_dir, nus, initial;
};

template <class T> void apply(std::optional<T> &dst, const std::optional<T> &src) {
  if (src)
    dst = src;
}

template <class T> void apply(T &dst, const std::optional<T> &src) {
  if (src)
    dst = *src;
}

seawater::RunConfig resolve(const Flags &f) {
  seawater::RunConfig cfg;
  if (f.config_file)
    cfg = seawater::load_config(*f.config_file, cfg);
  seawater::apply_env_overrides(cfg);
  apply(cfg.rho, f.rho);
  apply(cfg.nu, f.nu);
  apply(cfg.mass_f, f.mass_f);
  apply(cfg.mass_g, f.mass_g);
  apply(cfg.grid_n, f.grid_n);
  apply(cfg.mesh_file, f.mesh_file);
  apply(cfg.t_max, f.t_max);
  apply(cfg.dt_max, f.dt_max);
  apply(cfg.newton_tol, f.newton_tol);
  apply(cfg.newton_max_iter, f.newton_max_iter);
  apply(cfg.initial, f.initial);
  apply(cfg.out_dir, f.out_dir);
  apply(cfg.seed, f.seed);
  apply(cfg.workers, f.workers);
  apply(cfg.checkpoint_interval, f.checkpoint_interval);
  apply(cfg.profile_samples, f.profile_samples);
  if (f.nus)
    cfg.nus = seawater::parse_double_list(*f.nus);
  return cfg;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Two-phase seawater intrusion: stationary profiles, evolution and decay rates"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.set_version_flag("--version", "seawater 1.0");
  app.footer("Environment: every config key can be set as SEAWATER_<KEY>, e.g. SEAWATER_DT_MAX=1e-3.\n"
             "Exit codes: 0 success, 2 usage, 3 numerical failure.");

  Flags f;
  app.add_option("--config", f.config_file, "key = value file");
  app.add_option("--rho", f.rho, "density ratio in (0,1)");
  app.add_option("--nu", f.nu, "viscosity ratio > 0");
  app.add_option("--mass-f", f.mass_f, "freshwater mass (profile)");
  app.add_option("--mass-g", f.mass_g, "saltwater mass (profile)");
  app.add_option("--grid-n", f.grid_n, "cells per side of the square grid");
  app.add_option("--mesh-file", f.mesh_file, "mesh file, replaces the square grid");
  app.add_option("--t-max", f.t_max, "final time");
  app.add_option("--dt-max", f.dt_max, "largest time step");
  app.add_option("--newton-tol", f.newton_tol, "Newton residual tolerance (inf-norm)");
  app.add_option("--newton-max-iter", f.newton_max_iter, "Newton iterations before halving dt");
  app.add_option("--initial", f.initial,
                 "paper-5.2 | single-phase-f | single-phase-g | f:cx,cy,r2,a;g:...");
  app.add_option("--out-dir", f.out_dir, "output directory");
  app.add_option("--nus", f.nus, "comma separated viscosity ratios (sweep)");
  app.add_option("--workers", f.workers, "parallel runs (sweep)");
  app.add_option("--checkpoint-interval", f.checkpoint_interval, "time between checkpoints (run)");
  app.add_option("--profile-samples", f.profile_samples, "cross-section samples (profile)");
  app.add_option("--seed", f.seed, "reserved");

  auto *profile = app.add_subcommand("profile", "critical values, case, radii and cross-section");
  auto *run = app.add_subcommand("run", "evolve the initial data, write energies and checkpoints");
  auto *sweep = app.add_subcommand("sweep", "decay rate for each nu in --nus");
  auto *steady = app.add_subcommand("steady", "discrete steady state and comparison to the profile");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : seawater::kExitUsage;
  }

  try {
    const seawater::RunConfig cfg = resolve(f);
    if (*profile)
      return seawater::cmd_profile(cfg, std::cout);
    if (*run)
      return seawater::cmd_run(cfg, std::cout);
    if (*sweep)
      return seawater::cmd_sweep(cfg, std::cout);
    if (*steady)
      return seawater::cmd_steady(cfg, std::cout);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return seawater::exit_code_for(e);
  }
  return seawater::kExitUsage;
}
