#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "mesh.hpp"

namespace seawater {

/// Freshwater and saltwater heights per cell at one time level.
struct State {
  std::vector<double> f;
  std::vector<double> g;
  double time = 0.0;

  State() = default;
  explicit State(std::size_t n, double t = 0.0) : f(n, 0.0), g(n, 0.0), time(t) {}

  std::size_t size() const { return f.size(); }

  bool operator==(const State &) const = default;
};

/// Discrete masses sum_K m(K) f_K and sum_K m(K) g_K.
inline std::pair<double, double> state_masses(const State &s, const Mesh &mesh) {
  double mf = 0.0, mg = 0.0;
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    mf += mesh.cells[k].measure * s.f[k];
    mg += mesh.cells[k].measure * s.g[k];
  }
  return {mf, mg};
}

inline double min_value(const std::vector<double> &v) {
  return v.empty() ? 0.0 : *std::min_element(v.begin(), v.end());
}

} // namespace seawater
