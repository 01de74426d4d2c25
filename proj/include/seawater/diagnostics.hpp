#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "mesh.hpp"
#include "params.hpp"
#include "state.hpp"

namespace seawater {

namespace detail {
inline void require_same_size(const State &s, const Mesh &mesh) {
  if (s.f.size() != mesh.num_cells() || s.g.size() != mesh.num_cells())
    throw InvalidArgument("state does not match mesh");
}
} // namespace detail

/// Energy density (rho/2)(f+g)^2 + ((1-rho)/2) g^2 + b ((rho/nu) f + g).
inline double energy_density(double f, double g, double b, const PhysicalParams &p) {
  const double s = f + g;
  return 0.5 * p.rho * s * s + 0.5 * (1.0 - p.rho) * g * g + b * (p.rho / p.nu * f + g);
}

inline double discrete_energy(const State &s, const Mesh &mesh, const PotentialField &b,
                              const PhysicalParams &p) {
  detail::require_same_size(s, mesh);
  double e = 0.0;
  for (std::size_t k = 0; k < mesh.num_cells(); ++k)
    e += mesh.cells[k].measure * energy_density(s.f[k], s.g[k], b.b_values[k], p);
  return e;
}

/// Energy gap to a reference steady state; nonnegative when the reference is
/// the discrete minimizer and the masses agree.
inline double relative_energy(const State &s, const State &steady, const Mesh &mesh,
                              const PotentialField &b, const PhysicalParams &p) {
  return discrete_energy(s, mesh, b, p) - discrete_energy(steady, mesh, b, p);
}

/// Quadratic part of the energy gap,
/// sum m(K) [(rho/2)(df + dg)^2 + ((1-rho)/2) dg^2].
/// Equals relative_energy when the masses agree and the perturbation stays
/// where the reference phase potentials are constant.
inline double relative_energy_quadratic(const State &s, const State &steady, const Mesh &mesh,
                                        const PhysicalParams &p) {
  detail::require_same_size(s, mesh);
  detail::require_same_size(steady, mesh);
  double e = 0.0;
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    const double df = s.f[k] - steady.f[k], dg = s.g[k] - steady.g[k];
    e += mesh.cells[k].measure *
         (0.5 * p.rho * (df + dg) * (df + dg) + 0.5 * (1.0 - p.rho) * dg * dg);
  }
  return e;
}

/// sum m(K) (rho f ln f + nu g ln g), with 0 ln 0 = 0.
inline double discrete_entropy(const State &s, const Mesh &mesh, const PhysicalParams &p) {
  detail::require_same_size(s, mesh);
  auto xlogx = [](double x) { return x > 0.0 ? x * std::log(x) : 0.0; };
  double h = 0.0;
  for (std::size_t k = 0; k < mesh.num_cells(); ++k)
    h += mesh.cells[k].measure * (p.rho * xlogx(s.f[k]) + p.nu * xlogx(s.g[k]));
  return h;
}

/// Squared discrete L2 norm sum m(K) h_K^2.
inline double discrete_l2_squared(const std::vector<double> &h, const Mesh &mesh) {
  double s = 0.0;
  for (std::size_t k = 0; k < mesh.num_cells(); ++k)
    s += mesh.cells[k].measure * h[k] * h[k];
  return s;
}

/// Phase potentials f + g + b/nu and rho f + g + b at one cell.
inline std::pair<double, double> phase_potentials(double f, double g, double b,
                                                  const PhysicalParams &p) {
  return {f + g + b / p.nu, p.rho * f + g + b};
}

/// Edge-based counterpart of the energy dissipation,
/// sum_sigma tau (nu rho f_sigma dphi_f^2 + g_sigma dphi_g^2) with upwind
/// mobilities. Backward Euler steps satisfy E^n - E^{n+1} >= dt * I^{n+1}.
inline double dissipation_surrogate(const State &s, const Mesh &mesh, const PotentialField &b,
                                    const PhysicalParams &p) {
  detail::require_same_size(s, mesh);
  double d = 0.0;
  for (const auto &e : mesh.interior_edges) {
    const auto [pfk, pgk] = phase_potentials(s.f[e.k], s.g[e.k], b.b_values[e.k], p);
    const auto [pfl, pgl] = phase_potentials(s.f[e.l], s.g[e.l], b.b_values[e.l], p);
    const double df = pfk - pfl, dg = pgk - pgl;
    const double mf = std::max(0.0, df >= 0.0 ? s.f[e.k] : s.f[e.l]);
    const double mg = std::max(0.0, dg >= 0.0 ? s.g[e.k] : s.g[e.l]);
    d += e.transmissibility * (p.nu * p.rho * mf * df * df + mg * dg * dg);
  }
  return d;
}

/// Constants bracketing the energy by N(f) + N(g), where
/// N(h) = ||h||_2^2 + ||h||_{L^1(|x - c|^2)} and b = |x - c|^2 / 8.
struct NormEquivalence {
  double lower = 0.0;
  double upper = 0.0;
};

inline NormEquivalence norm_equivalence_constants(const PhysicalParams &p) {
  // E >= (rho/2)(f^2 + b f / nu) + (1/2)(g^2 + b g)
  // E <= rho f^2 + ((1+rho)/2) g^2 + (rho/nu) b f + b g
  const double rho = p.rho, nu = p.nu;
  NormEquivalence c;
  c.lower = std::min({rho / 2.0, rho / (16.0 * nu), 0.5, 1.0 / 16.0});
  c.upper = std::max({rho, (1.0 + rho) / 2.0, rho / (8.0 * nu), 1.0 / 8.0});
  return c;
}

inline double norm_measure(const std::vector<double> &h, const Mesh &mesh, Point center = {0.5, 0.5}) {
  double s = 0.0;
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    const Point d = mesh.cells[k].center - center;
    s += mesh.cells[k].measure * (h[k] * h[k] + dot(d, d) * std::abs(h[k]));
  }
  return s;
}

struct EnergyReport {
  double time = 0.0;
  double energy = 0.0;
  double relative_energy = 0.0;
  double entropy = 0.0;
  double dissipation_surrogate = 0.0;
};

inline EnergyReport energy_report(const State &s, const State &steady, const Mesh &mesh,
                                  const PotentialField &b, const PhysicalParams &p) {
  EnergyReport r;
  r.time = s.time;
  r.energy = discrete_energy(s, mesh, b, p);
  r.relative_energy = r.energy - discrete_energy(steady, mesh, b, p);
  r.entropy = discrete_entropy(s, mesh, p);
  r.dissipation_surrogate = dissipation_surrogate(s, mesh, b, p);
  return r;
}

struct DecaySample {
  double t = 0.0;
  double relative_energy = 0.0;
};

/// Exponential fit relative_energy ~ prefactor * exp(-rate * t).
struct DecayRecord {
  std::vector<DecaySample> series;
  double fitted_rate = 0.0;
  double fitted_prefactor = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  double fit_residual = 0.0; // RMS of the log-linear fit
  std::size_t points_used = 0;
};

struct FitOptions {
  /// Leading fraction of the time horizon discarded as transient.
  double skip_fraction = 0.1;
  /// Samples at or below this value are treated as round-off and dropped.
  double energy_floor = 1e-12;
  /// Explicit window; overrides skip_fraction when set.
  std::optional<std::pair<double, double>> window;
  std::size_t min_points = 10;
};

/// Least-squares line through (t, ln E) over the fit window; rate = -slope.
inline DecayRecord fit_rate(std::vector<DecaySample> series, const FitOptions &opt = {}) {
  DecayRecord rec;
  rec.series = std::move(series);
  if (rec.series.size() < opt.min_points)
    throw InsufficientData("fit_rate needs at least " + std::to_string(opt.min_points) +
                           " samples, got " + std::to_string(rec.series.size()));
  double t_lo, t_hi;
  if (opt.window) {
    t_lo = opt.window->first;
    t_hi = opt.window->second;
  } else {
    const double t0 = rec.series.front().t, t1 = rec.series.back().t;
    t_lo = t0 + opt.skip_fraction * (t1 - t0);
    t_hi = t1;
  }
  std::vector<std::pair<double, double>> pts;
  for (const auto &s : rec.series) {
    if (s.t < t_lo || s.t > t_hi)
      continue;
    if (s.relative_energy <= 0.0 && opt.energy_floor <= 0.0)
      throw NonPositiveEnergy("non-positive relative energy at t = " + format_double(s.t));
    if (s.relative_energy <= opt.energy_floor)
      continue;
    pts.emplace_back(s.t, std::log(s.relative_energy));
  }
  if (pts.size() < opt.min_points)
    throw InsufficientData("only " + std::to_string(pts.size()) +
                           " usable samples in the fit window");
  const double n = static_cast<double>(pts.size());
  double mt = 0.0, my = 0.0;
  for (const auto &[t, y] : pts) {
    mt += t;
    my += y;
  }
  mt /= n;
  my /= n;
  double stt = 0.0, sty = 0.0;
  for (const auto &[t, y] : pts) {
    stt += (t - mt) * (t - mt);
    sty += (t - mt) * (y - my);
  }
  if (!(stt > 0.0))
    throw InsufficientData("fit window spans a single time");
  const double slope = sty / stt;
  const double intercept = my - slope * mt;
  double ss = 0.0;
  for (const auto &[t, y] : pts) {
    const double r = y - (intercept + slope * t);
    ss += r * r;
  }
  rec.fitted_rate = -slope;
  rec.fitted_prefactor = std::exp(intercept);
  rec.t_lo = pts.front().first;
  rec.t_hi = pts.back().first;
  rec.fit_residual = std::sqrt(ss / n);
  rec.points_used = pts.size();
  return rec;
}

} // namespace seawater
