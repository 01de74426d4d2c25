#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>

#include "config.hpp"
#include "errors.hpp"
#include "experiment.hpp"
#include "profiles.hpp"

namespace seawater {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

/// Exit status for an exception escaping a command.
inline int exit_code_for(const std::exception &e) {
  if (dynamic_cast<const UsageError *>(&e) || dynamic_cast<const InvalidArgument *>(&e) ||
      dynamic_cast<const ParseError *>(&e))
    return kExitUsage;
  return kExitNumerical;
}

namespace detail {

inline std::filesystem::path prepare_out_dir(const RunConfig &cfg) {
  std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::ofstream open_output(const std::filesystem::path &path) {
  std::ofstream os(path);
  if (!os)
    throw Error("cannot write '" + path.string() + "'");
  return os;
}

inline void write_state_csv(std::ostream &os, const State &s, const Mesh &mesh) {
  os << "cell,x,y,f,g\n";
  for (std::size_t k = 0; k < mesh.num_cells(); ++k)
    os << k << ',' << format_double(mesh.cells[k].center.x) << ','
       << format_double(mesh.cells[k].center.y) << ',' << format_double(s.f[k]) << ','
       << format_double(s.g[k]) << '\n';
}

inline std::string profile_summary(const StationaryProfile &prof, const CriticalNus &c) {
  std::string out;
  auto line = [&](const char *key, double v) { out += std::string(key) + " = " + format_double(v) + '\n'; };
  auto opt = [&](const char *key, const std::optional<double> &v) {
    if (v)
      line(key, *v);
  };
  line("rho", prof.params.rho);
  line("nu", prof.params.nu);
  line("mass_f", prof.params.mass_f);
  line("mass_g", prof.params.mass_g);
  line("nu1", c.nu1);
  line("nu2", c.nu2);
  line("nu3", c.nu3);
  out += "case = " + to_string(prof.config) + '\n';
  line("r1", prof.r1);
  line("r2", prof.r2);
  opt("r3", prof.r3);
  opt("c1", prof.c1);
  opt("c2", prof.c2);
  opt("c3", prof.c3);
  opt("c4", prof.c4);
  return out;
}

/// L1 distance between cell values and the analytic profile centred at (1/2,1/2).
inline std::pair<double, double> l1_to_profile(const State &s, const Mesh &mesh,
                                               const StationaryProfile &prof) {
  double ef = 0.0, eg = 0.0;
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    const RadialSample a = eval_profile(prof, norm(mesh.cells[k].center - Point{0.5, 0.5}));
    ef += mesh.cells[k].measure * std::abs(s.f[k] - a.f_value);
    eg += mesh.cells[k].measure * std::abs(s.g[k] - a.g_value);
  }
  return {ef, eg};
}

} // namespace detail

/// Critical values, configuration, radii and constants, plus a radial
/// cross-section. Needs both masses.
inline int cmd_profile(const RunConfig &cfg, std::ostream &log) {
  if (!cfg.mass_f || !cfg.mass_g)
    throw UsageError("profile needs --mass-f and --mass-g");
  cfg.validate();
  const PhysicalParams p{cfg.rho, cfg.nu, *cfg.mass_f, *cfg.mass_g};
  const CriticalNus c = critical_nus(p);
  const StationaryProfile prof = solve_profile(p);
  const auto dir = detail::prepare_out_dir(cfg);
  const std::string summary = detail::profile_summary(prof, c);
  detail::open_output(dir / "profile_summary.txt") << summary;
  const double r_max = 1.2 * prof.r3.value_or(prof.r2);
  auto os = detail::open_output(dir / "profile_cross_section.csv");
  write_cross_section_csv(
      os, sample_cross_section(prof, static_cast<std::size_t>(cfg.profile_samples), r_max));
  log << summary;
  return kExitOk;
}

/// Evolves the initial data to t_max. Writes energy.csv (one row per
/// accepted step), periodic checkpoints and the final state.
inline int cmd_run(const RunConfig &cfg, std::ostream &log) {
  const Problem pr = make_problem(cfg);
  const auto dir = detail::prepare_out_dir(cfg);
  int index = 0;
  auto checkpoint = [&](const State &s, double dt) {
    char name[32];
    std::snprintf(name, sizeof(name), "checkpoint_%04d.csv", index++);
    auto os = detail::open_output(dir / name);
    write_checkpoint(os, s, pr.mesh, dt);
  };
  TimeStepper stepper = make_stepper(cfg);
  checkpoint(pr.initial, stepper.dt);
  double next_checkpoint = cfg.checkpoint_interval;
  const DecayRun run = run_decay(pr, stepper, cfg.t_max, [&](const State &s, const StepInfo &info) {
    if (s.time >= next_checkpoint * (1.0 - 1e-12)) {
      checkpoint(s, info.dt);
      while (next_checkpoint <= s.time * (1.0 + 1e-12))
        next_checkpoint += cfg.checkpoint_interval;
    }
    return true;
  });
  {
    auto os = detail::open_output(dir / "energy.csv");
    write_trajectory_csv(os, run.rows);
  }
  {
    auto os = detail::open_output(dir / "final_state.csv");
    detail::write_state_csv(os, run.final_state, pr.mesh);
  }
  const auto [mf, mg] = state_masses(run.final_state, pr.mesh);
  log << "cells = " << pr.mesh.num_cells() << '\n'
      << "t = " << format_double(run.final_state.time) << '\n'
      << "accepted_steps = " << run.advance.accepted_steps << '\n'
      << "rejected_steps = " << run.advance.rejected_steps << '\n'
      << "relative_energy = " << format_double(run.rows.back().relative_energy) << '\n'
      << "mass_f_drift = " << format_double(mf - pr.params.mass_f) << '\n'
      << "mass_g_drift = " << format_double(mg - pr.params.mass_g) << '\n';
  return kExitOk;
}

/// Discrete steady state for the masses of the initial data, compared with
/// the analytic profile when both phases are present.
inline int cmd_steady(const RunConfig &cfg, std::ostream &log) {
  const Problem pr = make_problem(cfg);
  const auto dir = detail::prepare_out_dir(cfg);
  const SteadyResult st = steady_solve(pr.mesh, pr.b, pr.params, pr.initial);
  {
    auto os = detail::open_output(dir / "steady_state.csv");
    detail::write_state_csv(os, st.state, pr.mesh);
  }
  std::string summary = "mass_f = " + format_double(pr.params.mass_f) + '\n' +
                        "mass_g = " + format_double(pr.params.mass_g) + '\n' +
                        "steady_residual = " + format_double(st.steady_residual) + '\n' +
                        "steps = " + std::to_string(st.steps) + '\n' +
                        "energy = " + format_double(discrete_energy(st.state, pr.mesh, pr.b, pr.params)) +
                        '\n';
  if (pr.params.mass_f > 0.0 && pr.params.mass_g > 0.0) {
    const StationaryProfile prof = solve_profile(pr.params);
    const auto [ef, eg] = detail::l1_to_profile(st.state, pr.mesh, prof);
    summary += "case = " + to_string(prof.config) + '\n' +
               "l1_error_f = " + format_double(ef) + '\n' + "l1_error_g = " + format_double(eg) + '\n';
  }
  detail::open_output(dir / "steady_summary.txt") << summary;
  log << summary;
  return kExitOk;
}

/// Decay experiment for every nu in cfg.nus; per-run CSVs and a summary
/// table. Any failed run makes the exit status numerical-failure.
inline int cmd_sweep(const RunConfig &cfg, std::ostream &log) {
  if (cfg.nus.empty())
    throw UsageError("sweep needs a nonempty --nus list");
  cfg.validate();
  const auto dir = detail::prepare_out_dir(cfg);
  const auto results = nu_sweep(cfg.nus, cfg, cfg.workers);
  bool all_ok = true;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto &r = results[i];
    all_ok = all_ok && r.ok;
    char name[64];
    std::snprintf(name, sizeof(name), "decay_%02zu.csv", i);
    auto os = detail::open_output(dir / name);
    write_trajectory_csv(os, r.rows);
  }
  {
    auto os = detail::open_output(dir / "sweep_summary.csv");
    write_sweep_summary_csv(os, results);
  }
  write_sweep_summary_csv(log, results);
  return all_ok ? kExitOk : kExitNumerical;
}

} // namespace seawater
