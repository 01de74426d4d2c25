#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "config.hpp"
#include "diagnostics.hpp"
#include "initial.hpp"
#include "mesh.hpp"
#include "scheme.hpp"
#include "state.hpp"

namespace seawater {

/// Mesh, potential and sampled initial data of one run. `params` carries the
/// discrete masses of the initial data.
struct Problem {
  Mesh mesh;
  PotentialField b;
  State initial;
  PhysicalParams params;
};

inline Mesh make_mesh(const RunConfig &cfg) {
  return cfg.mesh_file.empty() ? build_square_grid(cfg.grid_n) : load_mesh(cfg.mesh_file);
}

inline Problem make_problem(const RunConfig &cfg) {
  cfg.validate();
  Problem pr;
  pr.mesh = make_mesh(cfg);
  pr.b = potential_field(pr.mesh);
  pr.initial = sample_initial_condition(pr.mesh, parse_initial_condition(cfg.initial));
  const auto [mf, mg] = state_masses(pr.initial, pr.mesh);
  pr.params = PhysicalParams{cfg.rho, cfg.nu, mf, mg};
  pr.params.validate_coefficients();
  return pr;
}

inline TimeStepper make_stepper(const RunConfig &cfg) {
  TimeStepper ts;
  ts.dt_max = cfg.dt_max;
  ts.dt = cfg.dt_max;
  ts.newton_tol = cfg.newton_tol;
  ts.newton_max_iter = cfg.newton_max_iter;
  return ts;
}

struct TrajectoryRow {
  double t = 0.0;
  double energy = 0.0;
  double relative_energy = 0.0;
  double entropy = 0.0;
};

inline TrajectoryRow trajectory_row(const State &s, double reference_energy, const Problem &pr) {
  TrajectoryRow row;
  row.t = s.time;
  row.energy = discrete_energy(s, pr.mesh, pr.b, pr.params);
  row.relative_energy = row.energy - reference_energy;
  row.entropy = discrete_entropy(s, pr.mesh, pr.params);
  return row;
}

inline void write_trajectory_csv(std::ostream &os, const std::vector<TrajectoryRow> &rows) {
  os << "t,energy,relative_energy,entropy\n";
  for (const auto &r : rows)
    os << format_double(r.t) << ',' << format_double(r.energy) << ','
       << format_double(r.relative_energy) << ',' << format_double(r.entropy) << '\n';
}

struct DecayRun {
  State steady;
  State final_state;
  std::vector<TrajectoryRow> rows;
  AdvanceResult advance;
};

/// Computes the discrete steady state, then evolves the initial data to
/// `t_max`, recording energies after every accepted step. `on_step` may stop
/// the run early by returning false.
inline DecayRun run_decay(const Problem &pr, TimeStepper stepper, double t_max,
                          const StepObserver &on_step = {}) {
  DecayRun out;
  out.steady = steady_solve(pr.mesh, pr.b, pr.params, pr.initial).state;
  const double e_ref = discrete_energy(out.steady, pr.mesh, pr.b, pr.params);
  out.rows.push_back(trajectory_row(pr.initial, e_ref, pr));
  ImplicitScheme scheme(pr.mesh, pr.b, pr.params);
  out.advance = advance(scheme, pr.initial, stepper, t_max,
                        [&](const State &s, const StepInfo &info) {
                          out.rows.push_back(trajectory_row(s, e_ref, pr));
                          return on_step ? on_step(s, info) : true;
                        });
  out.final_state = out.advance.state;
  return out;
}

inline std::vector<DecaySample> decay_series(const std::vector<TrajectoryRow> &rows) {
  std::vector<DecaySample> out;
  out.reserve(rows.size());
  for (const auto &r : rows)
    out.push_back({r.t, r.relative_energy});
  return out;
}

struct SweepResult {
  double nu = 0.0;
  bool ok = false;
  std::string error;
  DecayRecord record;
  std::vector<TrajectoryRow> rows;
};

/// Runs one decay experiment per entry of `nus` (other settings from `base`)
/// and fits the exponential rate. Failures are recorded per entry; results
/// are in input order whatever the worker count.
inline std::vector<SweepResult> nu_sweep(const std::vector<double> &nus, const RunConfig &base,
                                         int workers = 1, const FitOptions &fit = {}) {
  if (nus.empty())
    throw InvalidArgument("nu_sweep needs at least one value of nu");
  std::vector<SweepResult> results(nus.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < nus.size();) {
      SweepResult &r = results[i];
      r.nu = nus[i];
      try {
        RunConfig cfg = base;
        cfg.nu = nus[i];
        const Problem pr = make_problem(cfg);
        DecayRun run = run_decay(pr, make_stepper(cfg), cfg.t_max);
        r.rows = std::move(run.rows);
        r.record = fit_rate(decay_series(r.rows), fit);
        r.ok = true;
      } catch (const std::exception &e) {
        r.ok = false;
        r.error = e.what();
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(workers, static_cast<int>(nus.size())));
  if (n_threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t)
      pool.emplace_back(work);
    for (auto &th : pool)
      th.join();
  }
  return results;
}

inline void write_sweep_summary_csv(std::ostream &os, const std::vector<SweepResult> &results) {
  os << "nu,p,C,fit_residual,status\n";
  for (const auto &r : results) {
    os << format_double(r.nu) << ',';
    if (r.ok)
      os << format_double(r.record.fitted_rate) << ',' << format_double(r.record.fitted_prefactor)
         << ',' << format_double(r.record.fit_residual) << ",ok\n";
    else
      os << ",,," << csv_quote("error: " + r.error) << '\n';
  }
}

} // namespace seawater
