#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>

#include "errors.hpp"
#include "format.hpp"

namespace seawater {

/// Physical data of the rescaled two-phase problem.
///
/// `rho` is the fresh/salt density ratio, `nu` the salt/fresh kinematic
/// viscosity ratio; `mass_f` and `mass_g` are the conserved freshwater and
/// saltwater masses.
struct PhysicalParams {
  double rho = 0.9;
  double nu = 1.0;
  double mass_f = 1.0;
  double mass_g = 1.0;

  /// Checks rho and nu only; the evolution does not depend on the masses.
  void validate_coefficients() const {
    if (!(rho > 0.0 && rho < 1.0))
      throw InvalidArgument("rho must lie in (0,1), got " + format_double(rho));
    if (!(nu > 0.0) || !std::isfinite(nu))
      throw InvalidArgument("nu must be positive, got " + format_double(nu));
  }

  void validate() const {
    validate_coefficients();
    if (!(mass_f > 0.0) || !std::isfinite(mass_f))
      throw InvalidArgument("mass_f must be positive, got " + format_double(mass_f));
    if (!(mass_g > 0.0) || !std::isfinite(mass_g))
      throw InvalidArgument("mass_g must be positive, got " + format_double(mass_g));
  }

  bool operator==(const PhysicalParams &) const = default;
};

/// Critical viscosity ratios at which the support topology of the
/// stationary profile changes. Always 0 < nu1 < rho < nu2 < 1 < nu3.
struct CriticalNus {
  double nu1 = 0.0;
  double nu2 = 0.0;
  double nu3 = 0.0;
};

inline CriticalNus critical_nus(const PhysicalParams &p) {
  p.validate();
  const double rho = p.rho, mf = p.mass_f, mg = p.mass_g;
  CriticalNus c;
  c.nu1 = rho * rho * mf / (mg + rho * (mf - mg));
  c.nu2 = (rho * mf + mg) / (mf + mg);
  c.nu3 = 1.0 + (1.0 - rho) * mf / mg;
  return c;
}

/// Same value as `critical_nus(p).nu1`, written with the positive
/// denominator rho*M_f + (1-rho)*M_g.
inline double critical_nu1_alternate(const PhysicalParams &p) {
  return p.rho * p.rho * p.mass_f / (p.rho * p.mass_f + (1.0 - p.rho) * p.mass_g);
}

/// Support topology of the stationary profile.
///  - Case1: E_G = disk(r1) inside E_F = disk(r2)
///  - Case2: E_F = disk(r1) inside E_G = disk(r2)
///  - Case3: E_F = disk(r2), E_G = annulus(r1, r3)
///  - Case4: E_G = disk(r2), E_F = annulus(r1, r3)
enum class Configuration { Case1, Case2, Case3, Case4 };

enum class Boundary { None, AtNu1, AtNu2, AtNu3 };

/// Configuration tag plus a marker when nu sits on a critical value. On a
/// boundary `config` names the case whose formulas are evaluated there:
/// Case3 at nu1* (r1 = 0), Case1 at nu2* (r1 = r2), Case4 at nu3* (r1 = 0).
struct ConfigCase {
  Configuration config = Configuration::Case1;
  Boundary boundary = Boundary::None;

  bool operator==(const ConfigCase &) const = default;
};

inline std::string_view to_string(Configuration c) {
  switch (c) {
  case Configuration::Case1: return "Case1";
  case Configuration::Case2: return "Case2";
  case Configuration::Case3: return "Case3";
  case Configuration::Case4: return "Case4";
  }
  return "?";
}

inline std::string_view to_string(Boundary b) {
  switch (b) {
  case Boundary::None: return "None";
  case Boundary::AtNu1: return "AtNu1";
  case Boundary::AtNu2: return "AtNu2";
  case Boundary::AtNu3: return "AtNu3";
  }
  return "?";
}

inline std::string to_string(const ConfigCase &c) {
  std::string s(to_string(c.config));
  if (c.boundary != Boundary::None) {
    s += '/';
    s += to_string(c.boundary);
  }
  return s;
}

/// Relative width of the band around each critical value that is reported
/// as a boundary case.
inline constexpr double kClassificationTolerance = 1e-12;

inline bool near_critical(double nu, double critical) {
  return std::abs(nu - critical) <= kClassificationTolerance * std::max(1.0, critical);
}

inline ConfigCase classify(const PhysicalParams &p) {
  const CriticalNus c = critical_nus(p);
  const double nu = p.nu;
  if (near_critical(nu, c.nu1))
    return {Configuration::Case3, Boundary::AtNu1};
  if (near_critical(nu, c.nu2))
    return {Configuration::Case1, Boundary::AtNu2};
  if (near_critical(nu, c.nu3))
    return {Configuration::Case4, Boundary::AtNu3};
  if (nu < c.nu1)
    return {Configuration::Case3, Boundary::None};
  if (nu < c.nu2)
    return {Configuration::Case2, Boundary::None};
  if (nu < c.nu3)
    return {Configuration::Case1, Boundary::None};
  return {Configuration::Case4, Boundary::None};
}

} // namespace seawater
