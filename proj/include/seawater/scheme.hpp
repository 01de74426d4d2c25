#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "diagnostics.hpp"
#include "errors.hpp"
#include "format.hpp"
#include "mesh.hpp"
#include "params.hpp"
#include "state.hpp"

namespace seawater {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Adaptive backward Euler step control. A failed Newton solve halves `dt`;
/// an accepted step doubles it, capped at `dt_max`.
struct TimeStepper {
  double dt = 2e-4;
  double dt_max = 2e-4;
  double dt_min = 1e-12;
  int newton_max_iter = 30;
  double newton_tol = 1e-9;

  void validate() const {
    if (!(dt_max > 0.0) || !(dt > 0.0) || dt > dt_max)
      throw InvalidArgument("time stepper requires 0 < dt <= dt_max");
    if (!(dt_min > 0.0))
      throw InvalidArgument("time stepper requires dt_min > 0");
    if (newton_max_iter < 1)
      throw InvalidArgument("newton_max_iter must be at least 1");
    if (!(newton_tol > 0.0))
      throw InvalidArgument("newton_tol must be positive");
  }
};

/// Per-cell residual of the f and g balance equations.
struct Residual {
  std::vector<double> f;
  std::vector<double> g;

  double inf_norm() const {
    double r = 0.0;
    for (double v : f)
      r = std::max(r, std::abs(v));
    for (double v : g)
      r = std::max(r, std::abs(v));
    return r;
  }
};

/// Upstream mobility: positive part of the value on the side the potential
/// drop flows from; ties go to K.
inline double upwind_mobility(double value_k, double value_l, double potential_drop) {
  return std::max(0.0, potential_drop >= 0.0 ? value_k : value_l);
}

/// Fluxes across one edge (K -> L) and their derivatives with respect to
/// (f_K, g_K, f_L, g_L). The upwind branch is frozen at the evaluation point
/// and d(x+)/dx is 1 for x > 0, 0 otherwise.
struct EdgeFlux {
  double flux_f = 0.0;
  double flux_g = 0.0;
  std::array<double, 4> dflux_f{};
  std::array<double, 4> dflux_g{};
};

inline EdgeFlux edge_flux(double fk, double gk, double fl, double gl, double bk, double bl,
                          double tau, const PhysicalParams &p, bool with_derivatives) {
  EdgeFlux out;
  const double nu = p.nu, rho = p.rho;

  const double drop_f = (fk - fl) + (gk - gl) + (bk - bl) / nu;
  const bool up_f = drop_f >= 0.0;
  const double mob_f = upwind_mobility(fk, fl, drop_f);
  out.flux_f = tau * nu * mob_f * drop_f;

  const double drop_g = rho * (fk - fl) + (gk - gl) + (bk - bl);
  const bool up_g = drop_g >= 0.0;
  const double mob_g = upwind_mobility(gk, gl, drop_g);
  out.flux_g = tau * mob_g * drop_g;

  if (with_derivatives) {
    const double dmf_k = (up_f && fk > 0.0) ? 1.0 : 0.0;
    const double dmf_l = (!up_f && fl > 0.0) ? 1.0 : 0.0;
    const double cf = tau * nu;
    out.dflux_f = {cf * (dmf_k * drop_f + mob_f), cf * mob_f, cf * (dmf_l * drop_f - mob_f),
                   -cf * mob_f};

    const double dmg_k = (up_g && gk > 0.0) ? 1.0 : 0.0;
    const double dmg_l = (!up_g && gl > 0.0) ? 1.0 : 0.0;
    out.dflux_g = {tau * mob_g * rho, tau * (dmg_k * drop_g + mob_g), -tau * mob_g * rho,
                   tau * (dmg_l * drop_g - mob_g)};
  }
  return out;
}

namespace detail {
inline void require_states(const State &a, const State &b, const Mesh &mesh,
                           const PotentialField &pot) {
  require_same_size(a, mesh);
  require_same_size(b, mesh);
  if (pot.b_values.size() != mesh.num_cells())
    throw InvalidArgument("potential field does not match mesh");
}
} // namespace detail

/// Flux part of the residual only: the discrete steady-state equations.
inline Residual assemble_steady_residual(const State &s, const Mesh &mesh, const PotentialField &b,
                                         const PhysicalParams &p) {
  detail::require_states(s, s, mesh, b);
  const std::size_t n = mesh.num_cells();
  Residual r{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  for (const auto &e : mesh.interior_edges) {
    const EdgeFlux fl = edge_flux(s.f[e.k], s.g[e.k], s.f[e.l], s.g[e.l], b.b_values[e.k],
                                  b.b_values[e.l], e.transmissibility, p, false);
    r.f[e.k] += fl.flux_f;
    r.f[e.l] -= fl.flux_f;
    r.g[e.k] += fl.flux_g;
    r.g[e.l] -= fl.flux_g;
  }
  return r;
}

/// Backward Euler residual
///   m(K)(f_K - f_K^old)/dt + sum_sigma tau f_sigma nu dphi_f,
///   m(K)(g_K - g_K^old)/dt + sum_sigma tau g_sigma dphi_g.
inline Residual assemble_residual(const State &next, const State &old, double dt, const Mesh &mesh,
                                  const PotentialField &b, const PhysicalParams &p) {
  detail::require_states(next, old, mesh, b);
  Residual r = assemble_steady_residual(next, mesh, b, p);
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    const double w = mesh.cells[k].measure / dt;
    r.f[k] += w * (next.f[k] - old.f[k]);
    r.g[k] += w * (next.g[k] - old.g[k]);
  }
  return r;
}

/// Unknowns are interleaved: row/column 2K is f_K, 2K+1 is g_K.
inline SparseMatrix assemble_jacobian(const State &next, const State &old, double dt,
                                      const Mesh &mesh, const PotentialField &b,
                                      const PhysicalParams &p) {
  detail::require_states(next, old, mesh, b);
  const int n = static_cast<int>(mesh.num_cells());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(4 * n + 16 * mesh.interior_edges.size()));
  for (int k = 0; k < n; ++k) {
    const double w = mesh.cells[k].measure / dt;
    trip.emplace_back(2 * k, 2 * k, w);
    trip.emplace_back(2 * k + 1, 2 * k + 1, w);
  }
  for (const auto &e : mesh.interior_edges) {
    const EdgeFlux fl = edge_flux(next.f[e.k], next.g[e.k], next.f[e.l], next.g[e.l],
                                  b.b_values[e.k], b.b_values[e.l], e.transmissibility, p, true);
    const std::array<int, 4> cols{2 * e.k, 2 * e.k + 1, 2 * e.l, 2 * e.l + 1};
    for (int c = 0; c < 4; ++c) {
      trip.emplace_back(2 * e.k, cols[c], fl.dflux_f[c]);
      trip.emplace_back(2 * e.l, cols[c], -fl.dflux_f[c]);
      trip.emplace_back(2 * e.k + 1, cols[c], fl.dflux_g[c]);
      trip.emplace_back(2 * e.l + 1, cols[c], -fl.dflux_g[c]);
    }
  }
  SparseMatrix jac(2 * n, 2 * n);
  jac.setFromTriplets(trip.begin(), trip.end());
  return jac;
}

enum class NewtonStatus { Converged, NonConvergence, LinearSolveFailure };

struct NewtonResult {
  NewtonStatus status = NewtonStatus::NonConvergence;
  State state;
  int iterations = 0;
  std::vector<double> residual_history; // inf-norm before the first and after each update
};

/// Implicit scheme on a fixed mesh. Keeps the Jacobian sparsity pattern and
/// the symbolic LU analysis across Newton iterations and time steps; one
/// instance per simulation.
class ImplicitScheme {
public:
  ImplicitScheme(const Mesh &mesh, PotentialField b, PhysicalParams p)
      : mesh_(&mesh), b_(std::move(b)), p_(p) {
    p_.validate_coefficients();
    if (b_.b_values.size() != mesh.num_cells())
      throw InvalidArgument("potential field does not match mesh");
    build_pattern();
  }

  const Mesh &mesh() const { return *mesh_; }
  const PotentialField &potential() const { return b_; }
  const PhysicalParams &params() const { return p_; }

  /// Solves one backward Euler step from `old` with step `dt`. At least one
  /// Newton update is always taken.
  NewtonResult newton_solve(const State &old, double dt, int max_iter, double tol) {
    NewtonResult res;
    res.state = old;
    State &x = res.state;
    const std::size_t n = mesh_->num_cells();
    Residual r = assemble_residual(x, old, dt, *mesh_, b_, p_);
    res.residual_history.push_back(r.inf_norm());
    Eigen::VectorXd rhs(2 * n), delta(2 * n);
    for (int it = 1; it <= max_iter; ++it) {
      fill_jacobian(x, dt);
      lu_.factorize(jac_);
      if (lu_.info() != Eigen::Success) {
        res.status = NewtonStatus::LinearSolveFailure;
        res.iterations = it;
        return res;
      }
      for (std::size_t k = 0; k < n; ++k) {
        rhs[2 * k] = -r.f[k];
        rhs[2 * k + 1] = -r.g[k];
      }
      delta = lu_.solve(rhs);
      if (lu_.info() != Eigen::Success || !delta.allFinite()) {
        res.status = NewtonStatus::LinearSolveFailure;
        res.iterations = it;
        return res;
      }
      for (std::size_t k = 0; k < n; ++k) {
        x.f[k] += delta[2 * k];
        x.g[k] += delta[2 * k + 1];
      }
      r = assemble_residual(x, old, dt, *mesh_, b_, p_);
      const double norm = r.inf_norm();
      res.residual_history.push_back(norm);
      res.iterations = it;
      if (!std::isfinite(norm)) {
        res.status = NewtonStatus::NonConvergence;
        return res;
      }
      if (norm < tol) {
        res.status = NewtonStatus::Converged;
        x.time = old.time + dt;
        return res;
      }
    }
    res.status = NewtonStatus::NonConvergence;
    return res;
  }

private:
  void build_pattern() {
    const int n = static_cast<int>(mesh_->num_cells());
    std::vector<Eigen::Triplet<double>> trip;
    for (int k = 0; k < n; ++k)
      for (int a = 0; a < 2; ++a)
        for (int c = 0; c < 2; ++c)
          trip.emplace_back(2 * k + a, 2 * k + c, 1.0);
    for (const auto &e : mesh_->interior_edges)
      for (int a = 0; a < 2; ++a)
        for (int c = 0; c < 2; ++c) {
          trip.emplace_back(2 * e.k + a, 2 * e.l + c, 1.0);
          trip.emplace_back(2 * e.l + a, 2 * e.k + c, 1.0);
        }
    jac_.resize(2 * n, 2 * n);
    jac_.setFromTriplets(trip.begin(), trip.end());
    jac_.makeCompressed();

    auto slot = [this](int row, int col) {
      const int *outer = jac_.outerIndexPtr();
      const int *inner = jac_.innerIndexPtr();
      const int *pos = std::lower_bound(inner + outer[col], inner + outer[col + 1], row);
      return static_cast<int>(pos - inner);
    };
    diag_slots_.resize(2 * static_cast<std::size_t>(n));
    for (int i = 0; i < 2 * n; ++i)
      diag_slots_[i] = slot(i, i);
    edge_slots_.resize(mesh_->interior_edges.size());
    for (std::size_t i = 0; i < mesh_->interior_edges.size(); ++i) {
      const Edge &e = mesh_->interior_edges[i];
      const std::array<int, 4> idx{2 * e.k, 2 * e.k + 1, 2 * e.l, 2 * e.l + 1};
      for (int row = 0; row < 4; ++row)
        for (int col = 0; col < 4; ++col)
          edge_slots_[i][4 * row + col] = slot(idx[row], idx[col]);
    }
    lu_.analyzePattern(jac_);
  }

  void fill_jacobian(const State &x, double dt) {
    double *val = jac_.valuePtr();
    std::fill(val, val + jac_.nonZeros(), 0.0);
    for (std::size_t k = 0; k < mesh_->num_cells(); ++k) {
      const double w = mesh_->cells[k].measure / dt;
      val[diag_slots_[2 * k]] += w;
      val[diag_slots_[2 * k + 1]] += w;
    }
    for (std::size_t i = 0; i < mesh_->interior_edges.size(); ++i) {
      const Edge &e = mesh_->interior_edges[i];
      const EdgeFlux fl = edge_flux(x.f[e.k], x.g[e.k], x.f[e.l], x.g[e.l], b_.b_values[e.k],
                                    b_.b_values[e.l], e.transmissibility, p_, true);
      const auto &s = edge_slots_[i];
      for (int c = 0; c < 4; ++c) {
        val[s[0 * 4 + c]] += fl.dflux_f[c];
        val[s[1 * 4 + c]] += fl.dflux_g[c];
        val[s[2 * 4 + c]] -= fl.dflux_f[c];
        val[s[3 * 4 + c]] -= fl.dflux_g[c];
      }
    }
  }

  const Mesh *mesh_;
  PotentialField b_;
  PhysicalParams p_;
  SparseMatrix jac_;
  std::vector<int> diag_slots_;
  std::vector<std::array<int, 16>> edge_slots_;
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu_;
};

inline NewtonResult newton_solve(const State &old, double dt, const Mesh &mesh,
                                 const PotentialField &b, const PhysicalParams &p,
                                 int max_iter = 30, double tol = 1e-9) {
  ImplicitScheme scheme(mesh, b, p);
  return scheme.newton_solve(old, dt, max_iter, tol);
}

struct StepInfo {
  double dt = 0.0;
  int newton_iterations = 0;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
};

/// Called after every accepted step; returning false stops the run.
using StepObserver = std::function<bool(const State &, const StepInfo &)>;

struct AdvanceResult {
  State state;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  bool stopped_by_observer = false;
};

/// Marches `state` to `t_target` with the adaptive policy of `stepper`, whose
/// `dt` is updated in place so that successive calls continue smoothly.
inline AdvanceResult advance(ImplicitScheme &scheme, const State &state, TimeStepper &stepper,
                             double t_target, const StepObserver &observer = {}) {
  stepper.validate();
  AdvanceResult out;
  out.state = state;
  StepInfo info;
  // Relative guard so that round-off in the accumulated time does not leave
  // a microscopic final step.
  const double t_eps = 1e-12 * std::max(1.0, std::abs(t_target));
  while (out.state.time < t_target - t_eps) {
    const double remaining = t_target - out.state.time;
    const bool clipped = stepper.dt >= remaining;
    const double dt = clipped ? remaining : stepper.dt;
    NewtonResult nr =
        scheme.newton_solve(out.state, dt, stepper.newton_max_iter, stepper.newton_tol);
    if (nr.status != NewtonStatus::Converged) {
      ++out.rejected_steps;
      ++info.rejected_steps;
      stepper.dt = (clipped ? dt : stepper.dt) * 0.5;
      if (stepper.dt < stepper.dt_min)
        throw StepUnderflow("time step fell below " + format_double(stepper.dt_min) +
                            " at t = " + format_double(out.state.time));
      continue;
    }
    out.state = std::move(nr.state);
    if (clipped)
      out.state.time = t_target;
    ++out.accepted_steps;
    ++info.accepted_steps;
    info.dt = dt;
    info.newton_iterations = nr.iterations;
    if (!clipped)
      stepper.dt = std::min(2.0 * stepper.dt, stepper.dt_max);
    if (observer && !observer(out.state, info)) {
      out.stopped_by_observer = true;
      break;
    }
  }
  return out;
}

inline AdvanceResult advance(const State &state, TimeStepper &stepper, double t_target,
                             const Mesh &mesh, const PotentialField &b, const PhysicalParams &p,
                             const StepObserver &observer = {}) {
  ImplicitScheme scheme(mesh, b, p);
  return advance(scheme, state, stepper, t_target, observer);
}

struct SteadyOptions {
  double dt_initial = 1e-3;
  double dt_max = 1e4;
  double residual_tol = 1e-9;       // inf-norm of the flux residual
  double decrement_tol = 1e-14;     // energy decrease per unit time
  double newton_tol = 1e-13;
  int newton_max_iter = 30;
  std::size_t max_steps = 20000;
};

struct SteadyResult {
  State state;
  double steady_residual = 0.0;
  std::size_t steps = 0;
};

/// Discrete steady state reached by time marching from `guess`, which fixes
/// the masses. Steps grow geometrically so that late steps act as Newton
/// iterations on the mass-constrained steady problem.
inline SteadyResult steady_solve(const Mesh &mesh, const PotentialField &b, const PhysicalParams &p,
                                 const State &guess, const SteadyOptions &opt = {}) {
  ImplicitScheme scheme(mesh, b, p);
  TimeStepper stepper;
  stepper.dt = opt.dt_initial;
  stepper.dt_max = opt.dt_max;
  stepper.newton_max_iter = opt.newton_max_iter;
  stepper.newton_tol = opt.newton_tol;
  stepper.validate();

  SteadyResult out;
  State cur = guess;
  cur.time = 0.0;
  double energy = discrete_energy(cur, mesh, b, p);
  for (std::size_t step = 0; step < opt.max_steps; ++step) {
    NewtonResult nr = scheme.newton_solve(cur, stepper.dt, stepper.newton_max_iter,
                                          stepper.newton_tol);
    if (nr.status != NewtonStatus::Converged) {
      stepper.dt *= 0.5;
      if (stepper.dt < stepper.dt_min)
        throw StepUnderflow("steady_solve: time step underflow");
      continue;
    }
    const double dt = stepper.dt;
    cur = std::move(nr.state);
    ++out.steps;
    stepper.dt = std::min(2.0 * stepper.dt, stepper.dt_max);
    const double e_new = discrete_energy(cur, mesh, b, p);
    const double decrement = (energy - e_new) / dt;
    energy = e_new;
    const double res = assemble_steady_residual(cur, mesh, b, p).inf_norm();
    if (res < opt.residual_tol && decrement < opt.decrement_tol) {
      out.state = std::move(cur);
      out.steady_residual = res;
      return out;
    }
  }
  throw NotStationary("steady_solve did not reach the stationary tolerance in " +
                      std::to_string(opt.max_steps) + " steps");
}

/// Checkpoint: three header lines (mesh hash, t, dt) and cell,f,g rows.
inline void write_checkpoint(std::ostream &os, const State &s, const Mesh &mesh, double dt) {
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(mesh_hash(mesh)));
  os << "# mesh_hash=" << hex << '\n';
  os << "# t=" << format_double(s.time) << '\n';
  os << "# dt=" << format_double(dt) << '\n';
  os << "cell,f,g\n";
  for (std::size_t k = 0; k < s.size(); ++k)
    os << k << ',' << format_double(s.f[k]) << ',' << format_double(s.g[k]) << '\n';
}

struct Checkpoint {
  std::uint64_t mesh_hash = 0;
  double dt = 0.0;
  State state;
};

inline Checkpoint read_checkpoint(std::istream &in) {
  Checkpoint cp;
  std::string line;
  auto header = [&](const std::string &key) {
    if (!std::getline(in, line) || line.rfind("# " + key + "=", 0) != 0)
      throw ParseError("checkpoint: missing '" + key + "' header");
    return line.substr(key.size() + 3);
  };
  cp.mesh_hash = std::stoull(header("mesh_hash"), nullptr, 16);
  cp.state.time = parse_double(header("t"));
  cp.dt = parse_double(header("dt"));
  if (!std::getline(in, line) || trim(line) != "cell,f,g")
    throw ParseError("checkpoint: missing column header");
  while (std::getline(in, line)) {
    if (trim(line).empty())
      continue;
    const auto fields = split(trim(line), ',');
    if (fields.size() != 3)
      throw ParseError("checkpoint: expected 3 columns");
    if (parse_integer(fields[0]) != static_cast<long long>(cp.state.f.size()))
      throw ParseError("checkpoint: cells out of order");
    cp.state.f.push_back(parse_double(fields[1]));
    cp.state.g.push_back(parse_double(fields[2]));
  }
  return cp;
}

} // namespace seawater
