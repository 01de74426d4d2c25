#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "format.hpp"
#include "mesh.hpp"
#include "state.hpp"

namespace seawater {

enum class Phase { F, G };

/// Paraboloid bump amplitude * (radius2 - |x - center|^2)^+.
struct Bump {
  Phase phase = Phase::F;
  Point center;
  double radius2 = 0.0;
  double amplitude = 0.0;

  double operator()(Point x) const {
    const Point d = x - center;
    return amplitude * std::max(0.0, radius2 - dot(d, d));
  }

  bool operator==(const Bump &) const = default;
};

/// Sum of bumps per phase, sampled at cell centres.
struct InitialCondition {
  std::vector<Bump> bumps;

  bool operator==(const InitialCondition &) const = default;
};

inline InitialCondition reference_initial_condition() {
  return {{Bump{Phase::F, {2.0 / 7.0, 2.0 / 7.0}, 1.0 / 16.0, 1.0 / 3.0},
           Bump{Phase::G, {5.0 / 7.0, 5.0 / 7.0}, 1.0 / 16.0, 1.0 / 3.0}}};
}

/// Presets: "paper-5.2", "single-phase-f" (reference f, g = 0) and
/// "single-phase-g" (f = 0, reference g). Otherwise a ';'-separated list of
/// "f:cx,cy,radius2,amplitude" / "g:..." bumps.
inline InitialCondition parse_initial_condition(std::string_view spec) {
  spec = trim(spec);
  const InitialCondition reference = reference_initial_condition();
  if (spec == "paper-5.2")
    return reference;
  if (spec == "single-phase-f")
    return {{reference.bumps[0]}};
  if (spec == "single-phase-g")
    return {{reference.bumps[1]}};
  InitialCondition ic;
  for (auto item : split(spec, ';')) {
    item = trim(item);
    if (item.empty())
      continue;
    if (item.size() < 3 || item[1] != ':' || (item[0] != 'f' && item[0] != 'g'))
      throw ParseError("initial condition item must look like 'f:cx,cy,radius2,amplitude', got '" +
                       std::string(item) + "'");
    const auto nums = split(item.substr(2), ',');
    if (nums.size() != 4)
      throw ParseError("bump needs four numbers: cx,cy,radius2,amplitude");
    Bump b;
    b.phase = item[0] == 'f' ? Phase::F : Phase::G;
    b.center = {parse_double(nums[0]), parse_double(nums[1])};
    b.radius2 = parse_double(nums[2]);
    b.amplitude = parse_double(nums[3]);
    if (b.radius2 < 0.0 || b.amplitude < 0.0)
      throw ParseError("bump radius2 and amplitude must be nonnegative");
    ic.bumps.push_back(b);
  }
  if (ic.bumps.empty())
    throw ParseError("unknown initial condition '" + std::string(spec) + "'");
  return ic;
}

inline std::string to_string(const InitialCondition &ic) {
  std::string out;
  for (const auto &b : ic.bumps) {
    if (!out.empty())
      out += ';';
    out += b.phase == Phase::F ? "f:" : "g:";
    out += format_double(b.center.x) + ',' + format_double(b.center.y) + ',' +
           format_double(b.radius2) + ',' + format_double(b.amplitude);
  }
  return out;
}

inline State sample_initial_condition(const Mesh &mesh, const InitialCondition &ic) {
  State s(mesh.num_cells());
  for (std::size_t k = 0; k < mesh.num_cells(); ++k)
    for (const auto &b : ic.bumps)
      (b.phase == Phase::F ? s.f[k] : s.g[k]) += b(mesh.cells[k].center);
  return s;
}

} // namespace seawater
