#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "format.hpp"
#include "params.hpp"

namespace seawater {

/// One quadratic piece `constant + slope * r^2` of a radial profile, valid on
/// [r_lo, r_hi].
struct RadialPiece {
  double r_lo = 0.0;
  double r_hi = 0.0;
  double constant = 0.0;
  double slope = 0.0;

  double value(double r) const { return constant + slope * r * r; }
  double derivative(double r) const { return 2.0 * slope * r; }
  bool contains(double r) const { return r >= r_lo && r <= r_hi; }

  /// 2*pi * int_{r_lo}^{r_hi} (constant + slope r^2) r dr
  double mass() const {
    const double a2 = r_lo * r_lo, b2 = r_hi * r_hi;
    return std::numbers::pi * (constant * (b2 - a2) + 0.5 * slope * (b2 * b2 - a2 * a2));
  }
};

/// Closed-form radially symmetric stationary state, centred at the origin of
/// the confining potential. `r3` and the constants that a configuration does
/// not use are left empty.
struct StationaryProfile {
  ConfigCase config;
  double r1 = 0.0;
  double r2 = 0.0;
  std::optional<double> r3;
  std::optional<double> c1, c2, c3, c4;
  PhysicalParams params;

  std::vector<RadialPiece> f_pieces;
  std::vector<RadialPiece> g_pieces;
};

struct RadialSample {
  double r = 0.0;
  double f_value = 0.0;
  double g_value = 0.0;
};

namespace detail {

inline void require_denominator(double d, const char *what) {
  if (std::abs(d) < 1e-14)
    throw DegenerateCase(std::string("vanishing denominator ") + what);
}

/// Nonnegative root of X^2 - S X + P = 0 for S < 0, P <= 0, computed as
/// P / X_- with X_- = (S - sqrt(S^2 - 4P)) / 2 to avoid cancellation.
inline double nonnegative_root(double s, double p) {
  const double disc = s * s - 4.0 * p;
  if (disc < 0.0)
    throw InfeasibleRoot("quadratic for r1^2 has no real root");
  const double x_minus = 0.5 * (s - std::sqrt(disc));
  const double root = (x_minus == 0.0) ? 0.0 : p / x_minus;
  if (root < -1e-14 * std::max(1.0, std::abs(s)))
    throw InfeasibleRoot("selected root for r1^2 is negative: " + format_double(root));
  return std::max(root, 0.0);
}

inline void push_piece(std::vector<RadialPiece> &pieces, double lo, double hi,
                       double constant, double slope) {
  if (hi > lo)
    pieces.push_back({lo, hi, constant, slope});
}

} // namespace detail

inline StationaryProfile solve_profile(const PhysicalParams &p) {
  p.validate();
  const double pi = std::numbers::pi;
  const double rho = p.rho, nu = p.nu, mf = p.mass_f, mg = p.mass_g;

  StationaryProfile prof;
  prof.params = p;
  prof.config = classify(p);

  // Slopes (coefficients of r^2) on E_F and E_G intersection, and on the
  // single-phase regions.
  const double s_f_both = (nu - 1.0) / (8.0 * nu * (1.0 - rho));
  const double s_g_both = (rho - nu) / (8.0 * nu * (1.0 - rho));
  const double s_f_only = -1.0 / (8.0 * nu);
  const double s_g_only = -1.0 / 8.0;

  switch (prof.config.config) {
  case Configuration::Case1: {
    detail::require_denominator(nu - rho, "(nu - rho)");
    const double r1 = std::pow(16.0 * nu * (1.0 - rho) * mg / (pi * (nu - rho)), 0.25);
    double r2 = std::pow(16.0 * nu * (mf + mg) / pi, 0.25);
    if (prof.config.boundary == Boundary::AtNu2)
      r2 = r1;
    const double r1s = r1 * r1, r2s = r2 * r2;
    const double c3 = r2s / (8.0 * nu);
    const double c2 = (nu - rho) / (8.0 * nu * (1.0 - rho)) * r1s;
    const double c1 = (r2s - (nu - rho) / (1.0 - rho) * r1s) / (8.0 * nu);
    prof.r1 = r1;
    prof.r2 = r2;
    prof.c1 = c1;
    prof.c2 = c2;
    prof.c3 = c3;
    detail::push_piece(prof.f_pieces, 0.0, r1, c1, s_f_both);
    detail::push_piece(prof.f_pieces, r1, r2, c3, s_f_only);
    detail::push_piece(prof.g_pieces, 0.0, r1, c2, s_g_both);
    break;
  }
  case Configuration::Case2: {
    detail::require_denominator(1.0 - nu, "(1 - nu)");
    const double r1 = std::pow(16.0 * nu * (1.0 - rho) * mf / (pi * (1.0 - nu)), 0.25);
    const double r2 = std::pow(16.0 * (rho * mf + mg) / pi, 0.25);
    const double r1s = r1 * r1, r2s = r2 * r2;
    const double c1 = (1.0 - nu) / (8.0 * nu * (1.0 - rho)) * r1s;
    const double c4 = r2s / 8.0;
    const double c2 = c4 - rho * c1;
    prof.r1 = r1;
    prof.r2 = r2;
    prof.c1 = c1;
    prof.c2 = c2;
    prof.c4 = c4;
    detail::push_piece(prof.f_pieces, 0.0, r1, c1, s_f_both);
    detail::push_piece(prof.g_pieces, 0.0, r1, c2, s_g_both);
    detail::push_piece(prof.g_pieces, r1, r2, c4, s_g_only);
    break;
  }
  case Configuration::Case3: {
    detail::require_denominator(rho - nu, "(rho - nu)");
    detail::require_denominator(1.0 - nu, "(1 - nu)");
    const double s = -8.0 * nu * std::sqrt(mg * (1.0 - nu) / (pi * (rho - nu) * rho));
    double pcoef = 16.0 * nu / pi * (nu * (1.0 - rho) * mg / (rho * (rho - nu)) - mf);
    if (prof.config.boundary == Boundary::AtNu1)
      pcoef = 0.0;
    const double r1s = detail::nonnegative_root(s, pcoef);
    const double r2s =
        r1s + 4.0 * nu * (1.0 - rho) * std::sqrt(mg / (pi * (rho - nu) * rho * (1.0 - nu)));
    const double r3s = rho * (1.0 - nu) / (nu * (1.0 - rho)) * r2s -
                       (rho - nu) / (nu * (1.0 - rho)) * r1s;
    const double c1 = (1.0 - nu) / (8.0 * nu * (1.0 - rho)) * r2s;
    const double c2 = -(rho - nu) / (8.0 * nu * (1.0 - rho)) * r1s;
    const double c4 = r3s / 8.0;
    const double c3 = c1 - (rho - nu) / (8.0 * nu * (1.0 - rho)) * r1s;
    prof.r1 = std::sqrt(r1s);
    prof.r2 = std::sqrt(r2s);
    prof.r3 = std::sqrt(r3s);
    prof.c1 = c1;
    prof.c2 = c2;
    prof.c3 = c3;
    prof.c4 = c4;
    detail::push_piece(prof.f_pieces, 0.0, prof.r1, c3, s_f_only);
    detail::push_piece(prof.f_pieces, prof.r1, prof.r2, c1, s_f_both);
    detail::push_piece(prof.g_pieces, prof.r1, prof.r2, c2, s_g_both);
    detail::push_piece(prof.g_pieces, prof.r2, *prof.r3, c4, s_g_only);
    break;
  }
  case Configuration::Case4: {
    detail::require_denominator(nu - 1.0, "(nu - 1)");
    const double s = -8.0 * std::sqrt(mf * (nu - rho) / (pi * (nu - 1.0) * nu));
    double pcoef = 16.0 / pi * ((1.0 - rho) * mf / (nu - 1.0) - mg);
    if (prof.config.boundary == Boundary::AtNu3)
      pcoef = 0.0;
    const double r1s = detail::nonnegative_root(s, pcoef);
    const double r2s =
        r1s + 4.0 * (1.0 - rho) * std::sqrt(nu * mf / (pi * (nu - rho) * (nu - 1.0)));
    // Continuity of F at r2 together with F(r3) = 0.
    const double r3s = ((nu - rho) * r2s - (nu - 1.0) * r1s) / (1.0 - rho);
    const double c1 = -(nu - 1.0) / (8.0 * nu * (1.0 - rho)) * r1s;
    const double c2 = (nu - rho) / (8.0 * nu * (1.0 - rho)) * r2s;
    const double c3 = r3s / (8.0 * nu);
    // Continuity of G at r1.
    const double c4 = c2 - rho * (nu - 1.0) / (8.0 * nu * (1.0 - rho)) * r1s;
    prof.r1 = std::sqrt(r1s);
    prof.r2 = std::sqrt(r2s);
    prof.r3 = std::sqrt(r3s);
    prof.c1 = c1;
    prof.c2 = c2;
    prof.c3 = c3;
    prof.c4 = c4;
    detail::push_piece(prof.f_pieces, prof.r1, prof.r2, c1, s_f_both);
    detail::push_piece(prof.f_pieces, prof.r2, *prof.r3, c3, s_f_only);
    detail::push_piece(prof.g_pieces, 0.0, prof.r1, c4, s_g_only);
    detail::push_piece(prof.g_pieces, prof.r1, prof.r2, c2, s_g_both);
    break;
  }
  }
  return prof;
}

namespace detail {
inline const RadialPiece *find_piece(const std::vector<RadialPiece> &pieces, double r) {
  for (const auto &piece : pieces)
    if (piece.contains(r))
      return &piece;
  return nullptr;
}
} // namespace detail

inline RadialSample eval_profile(const StationaryProfile &prof, double r) {
  RadialSample s{r, 0.0, 0.0};
  if (const auto *piece = detail::find_piece(prof.f_pieces, r))
    s.f_value = std::max(0.0, piece->value(r));
  if (const auto *piece = detail::find_piece(prof.g_pieces, r))
    s.g_value = std::max(0.0, piece->value(r));
  return s;
}

/// Radial derivatives (dF/dr, dG/dr) taken on the first piece containing r;
/// zero outside the supports.
inline std::pair<double, double> eval_profile_slopes(const StationaryProfile &prof, double r) {
  std::pair<double, double> d{0.0, 0.0};
  if (const auto *piece = detail::find_piece(prof.f_pieces, r))
    d.first = piece->derivative(r);
  if (const auto *piece = detail::find_piece(prof.g_pieces, r))
    d.second = piece->derivative(r);
  return d;
}

/// Exact masses of F and G, integrated piece by piece in polar coordinates.
inline std::pair<double, double> profile_masses(const StationaryProfile &prof) {
  double mf = 0.0, mg = 0.0;
  for (const auto &piece : prof.f_pieces)
    mf += piece.mass();
  for (const auto &piece : prof.g_pieces)
    mg += piece.mass();
  return {mf, mg};
}

inline std::vector<RadialSample> sample_cross_section(const StationaryProfile &prof,
                                                      std::size_t n, double r_max) {
  if (n < 2)
    throw InvalidArgument("sample_cross_section needs n >= 2");
  if (!(r_max > 0.0))
    throw InvalidArgument("sample_cross_section needs r_max > 0");
  std::vector<RadialSample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (i + 1 == n) ? r_max : r_max * static_cast<double>(i) / static_cast<double>(n - 1);
    out.push_back(eval_profile(prof, r));
  }
  return out;
}

inline void write_cross_section_csv(std::ostream &os, const std::vector<RadialSample> &samples) {
  os << "r,F,G\n";
  for (const auto &s : samples)
    os << format_double(s.r) << ',' << format_double(s.f_value) << ','
       << format_double(s.g_value) << '\n';
}

/// Compactly supported parabolic cap max{height - curvature r^2, 0}.
struct BarenblattProfile {
  double height = 0.0;
  double curvature = 0.0;
  double radius = 0.0;
  double mass = 0.0;

  double operator()(double r) const { return std::max(0.0, height - curvature * r * r); }
};

/// Cap of prescribed mass and curvature; the mass of the cap is
/// pi * height^2 / (2 curvature).
inline BarenblattProfile barenblatt_reference(double mass, double curvature) {
  if (!(mass > 0.0))
    throw InvalidArgument("barenblatt_reference needs a positive mass");
  if (!(curvature > 0.0))
    throw InvalidArgument("barenblatt_reference needs a positive curvature");
  BarenblattProfile b;
  b.mass = mass;
  b.curvature = curvature;
  b.height = std::sqrt(2.0 * curvature * mass / std::numbers::pi);
  b.radius = std::sqrt(b.height / curvature);
  return b;
}

/// Steady freshwater profile without saltwater: F = C3 - r^2/(8 nu).
inline BarenblattProfile single_phase_f_reference(double mass, double nu) {
  return barenblatt_reference(mass, 1.0 / (8.0 * nu));
}

/// Steady saltwater profile without freshwater: G = C4 - r^2/8.
inline BarenblattProfile single_phase_g_reference(double mass) {
  return barenblatt_reference(mass, 1.0 / 8.0);
}

} // namespace seawater
