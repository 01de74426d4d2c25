#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "format.hpp"

namespace seawater {

struct Point {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point &) const = default;
};

inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }

struct Cell {
  Point center;
  double measure = 0.0;
  std::vector<int> vertices; // counter-clockwise

  bool operator==(const Cell &) const = default;
};

/// Interior edge sigma = K|L with two-point transmissibility m(sigma)/d_sigma.
struct Edge {
  int k = 0;
  int l = 0;
  double measure = 0.0;
  double distance = 0.0;
  double transmissibility = 0.0;
  int v0 = 0; // endpoints, for diagnostics
  int v1 = 0;

  bool operator==(const Edge &) const = default;
};

/// Admissible two-point flux mesh of a bounded polygonal domain. Boundary
/// edges carry no flux and are not stored.
struct Mesh {
  std::vector<Point> vertices;
  std::vector<Cell> cells;
  std::vector<Edge> interior_edges;
  std::vector<Point> domain; // boundary polygon, counter-clockwise

  std::size_t num_cells() const { return cells.size(); }

  double total_measure() const {
    double s = 0.0;
    for (const auto &c : cells)
      s += c.measure;
    return s;
  }

  bool operator==(const Mesh &) const = default;
};

inline constexpr double kOrthogonalityTolerance = 1e-10;

inline double polygon_area(const std::vector<Point> &poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point &p = poly[i];
    const Point &q = poly[(i + 1) % poly.size()];
    a += cross(p, q);
  }
  return 0.5 * a;
}

inline Point polygon_centroid(const std::vector<Point> &poly) {
  const double area = polygon_area(poly);
  double cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point &p = poly[i];
    const Point &q = poly[(i + 1) % poly.size()];
    const double w = cross(p, q);
    cx += (p.x + q.x) * w;
    cy += (p.y + q.y) * w;
  }
  return {cx / (6.0 * area), cy / (6.0 * area)};
}

inline Point circumcenter(Point a, Point b, Point c) {
  const double d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
  const double a2 = dot(a, a), b2 = dot(b, b), c2 = dot(c, c);
  return {(a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d,
          (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d};
}

/// Checks the two-point flux admissibility of one interior edge: distinct
/// centres, x_K -> x_L pointing across the edge from K to L, and the segment
/// orthogonal to the edge.
inline void check_edge_admissibility(const Mesh &mesh, const Edge &e) {
  const Point a = mesh.vertices[e.v0], b = mesh.vertices[e.v1];
  const Point xk = mesh.cells[e.k].center, xl = mesh.cells[e.l].center;
  const Point t = b - a, d = xl - xk;
  const double lt = norm(t), ld = norm(d);
  auto where = [&] {
    return " on edge between cells " + std::to_string(e.k) + " and " + std::to_string(e.l);
  };
  if (!(ld > 0.0))
    throw AdmissibilityError("coincident cell centres" + where(), e.k, e.l);
  if (std::abs(dot(t, d)) / (lt * ld) > kOrthogonalityTolerance)
    throw AdmissibilityError("centre segment not orthogonal to edge" + where(), e.k, e.l);
  // Outward normal of K along the edge; (a, b) follows K's CCW orientation.
  const Point n{t.y, -t.x};
  if (dot(n, d) <= 0.0)
    throw AdmissibilityError("centres in the wrong order across edge" + where(), e.k, e.l);
}

namespace detail {

/// Derives interior edges and the boundary loop from the cell/vertex lists.
inline void build_topology(Mesh &mesh) {
  std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> by_edge; // key -> (cell, a)
  for (int k = 0; k < static_cast<int>(mesh.cells.size()); ++k) {
    const auto &vs = mesh.cells[k].vertices;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      const int a = vs[i], b = vs[(i + 1) % vs.size()];
      by_edge[{std::min(a, b), std::max(a, b)}].push_back({k, a});
    }
  }
  mesh.interior_edges.clear();
  std::map<int, int> boundary_next;
  for (const auto &[key, uses] : by_edge) {
    if (uses.size() > 2)
      throw ParseError("edge (" + std::to_string(key.first) + "," +
                       std::to_string(key.second) + ") shared by more than two cells");
    if (uses.size() == 2) {
      if (uses[0].first == uses[1].first)
        throw ParseError("duplicate edge inside cell " + std::to_string(uses[0].first));
      if (uses[0].second == uses[1].second)
        throw ParseError("cells " + std::to_string(uses[0].first) + " and " +
                         std::to_string(uses[1].first) + " overlap (inconsistent orientation)");
      Edge e;
      e.k = uses[0].first;
      e.l = uses[1].first;
      e.v0 = uses[0].second;
      e.v1 = (e.v0 == key.first) ? key.second : key.first;
      const Point a = mesh.vertices[e.v0], b = mesh.vertices[e.v1];
      e.measure = norm(b - a);
      e.distance = norm(mesh.cells[e.l].center - mesh.cells[e.k].center);
      check_edge_admissibility(mesh, e);
      e.transmissibility = e.measure / e.distance;
      mesh.interior_edges.push_back(e);
    } else {
      const int a = uses[0].second;
      const int b = (a == key.first) ? key.second : key.first;
      if (boundary_next.count(a))
        throw ParseError("boundary is not a simple closed curve at vertex " + std::to_string(a));
      boundary_next[a] = b;
    }
  }
  mesh.domain.clear();
  if (!boundary_next.empty()) {
    const int start = boundary_next.begin()->first;
    int v = start;
    do {
      mesh.domain.push_back(mesh.vertices[v]);
      auto it = boundary_next.find(v);
      if (it == boundary_next.end())
        throw ParseError("open boundary at vertex " + std::to_string(v));
      v = it->second;
    } while (v != start && mesh.domain.size() <= boundary_next.size());
    if (mesh.domain.size() != boundary_next.size())
      throw ParseError("domain boundary must be a single closed loop");
  }
}

} // namespace detail

/// Uniform n x n grid of the unit square, cell centres at centroids.
inline Mesh build_square_grid(int n) {
  if (n < 2)
    throw InvalidArgument("build_square_grid needs n >= 2");
  Mesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      mesh.vertices.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  mesh.cells.reserve(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      Cell c;
      c.vertices = {vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)};
      const Point lo = mesh.vertices[vid(i, j)], hi = mesh.vertices[vid(i + 1, j + 1)];
      c.center = {0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y)};
      std::vector<Point> poly;
      for (int v : c.vertices)
        poly.push_back(mesh.vertices[v]);
      c.measure = polygon_area(poly);
      mesh.cells.push_back(std::move(c));
    }
  detail::build_topology(mesh);
  return mesh;
}

/// Reads the plain-text mesh format:
///
///     VERTICES
///     <id> <x> <y>
///     CELLS
///     <id> <v0> <v1> ... (counter-clockwise; clockwise cells are reversed)
///     CENTERS            (optional)
///     <id> <x> <y>
///
/// Ids are dense and zero-based. Blank lines and `#` comments are ignored.
/// Without explicit centres, triangles use their circumcentre and other
/// polygons their centroid.
inline Mesh parse_mesh(std::istream &in) {
  enum class Section { None, Vertices, Cells, Centers } section = Section::None;
  std::map<long long, Point> vertices;
  std::map<long long, std::vector<long long>> cells;
  std::map<long long, Point> centers;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    std::string_view view = trim(std::string_view(line).substr(0, hash));
    if (view.empty())
      continue;
    if (view == "VERTICES") { section = Section::Vertices; continue; }
    if (view == "CELLS") { section = Section::Cells; continue; }
    if (view == "CENTERS") { section = Section::Centers; continue; }
    const auto tok = split_ws(view);
    try {
      switch (section) {
      case Section::None:
        throw ParseError("data before any section header");
      case Section::Vertices:
      case Section::Centers: {
        if (tok.size() != 3)
          throw ParseError("expected '<id> <x> <y>'");
        const long long id = parse_integer(tok[0]);
        const Point pt{parse_double(tok[1]), parse_double(tok[2])};
        auto &target = (section == Section::Vertices) ? vertices : centers;
        if (!target.emplace(id, pt).second)
          throw ParseError("duplicate id " + std::to_string(id));
        break;
      }
      case Section::Cells: {
        if (tok.size() < 4)
          throw ParseError("a cell needs at least three vertices");
        const long long id = parse_integer(tok[0]);
        std::vector<long long> vs;
        for (std::size_t i = 1; i < tok.size(); ++i)
          vs.push_back(parse_integer(tok[i]));
        if (!cells.emplace(id, std::move(vs)).second)
          throw ParseError("duplicate cell id " + std::to_string(id));
        break;
      }
      }
    } catch (const ParseError &e) {
      throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  auto check_dense = [](const auto &m, const char *what) {
    long long expect = 0;
    for (const auto &kv : m)
      if (kv.first != expect++)
        throw ParseError(std::string(what) + " ids must be 0..N-1");
  };
  check_dense(vertices, "vertex");
  check_dense(cells, "cell");
  check_dense(centers, "center");
  if (cells.empty())
    throw ParseError("mesh has no cells");
  if (!centers.empty() && centers.size() != cells.size())
    throw ParseError("CENTERS must list every cell");

  Mesh mesh;
  for (const auto &[id, pt] : vertices)
    mesh.vertices.push_back(pt);
  for (const auto &[id, vs] : cells) {
    Cell c;
    std::vector<Point> poly;
    for (long long v : vs) {
      if (v < 0 || v >= static_cast<long long>(mesh.vertices.size()))
        throw ParseError("cell " + std::to_string(id) + " references unknown vertex " +
                         std::to_string(v));
      if (std::find(c.vertices.begin(), c.vertices.end(), static_cast<int>(v)) != c.vertices.end())
        throw ParseError("cell " + std::to_string(id) + " repeats vertex " + std::to_string(v));
      c.vertices.push_back(static_cast<int>(v));
      poly.push_back(mesh.vertices[v]);
    }
    double area = polygon_area(poly);
    if (area < 0.0) {
      std::reverse(c.vertices.begin(), c.vertices.end());
      std::reverse(poly.begin(), poly.end());
      area = -area;
    }
    if (!(area > 0.0))
      throw NegativeMeasure("cell " + std::to_string(id) + " has non-positive area");
    c.measure = area;
    if (!centers.empty())
      c.center = centers.at(id);
    else if (poly.size() == 3)
      c.center = circumcenter(poly[0], poly[1], poly[2]);
    else
      c.center = polygon_centroid(poly);
    mesh.cells.push_back(std::move(c));
  }
  detail::build_topology(mesh);
  return mesh;
}

inline Mesh load_mesh(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ParseError("cannot open mesh file '" + path + "'");
  return parse_mesh(in);
}

/// Writes a mesh with explicit centres so that parse_mesh reproduces it.
inline void write_mesh(std::ostream &os, const Mesh &mesh) {
  os << "VERTICES\n";
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
    os << i << ' ' << format_double(mesh.vertices[i].x) << ' '
       << format_double(mesh.vertices[i].y) << '\n';
  os << "CELLS\n";
  for (std::size_t k = 0; k < mesh.cells.size(); ++k) {
    os << k;
    for (int v : mesh.cells[k].vertices)
      os << ' ' << v;
    os << '\n';
  }
  os << "CENTERS\n";
  for (std::size_t k = 0; k < mesh.cells.size(); ++k)
    os << k << ' ' << format_double(mesh.cells[k].center.x) << ' '
       << format_double(mesh.cells[k].center.y) << '\n';
}

/// Fingerprint of the geometry seen by the scheme.
inline std::uint64_t mesh_hash(const Mesh &mesh) {
  std::uint64_t h = fnv1a("mesh");
  for (const auto &c : mesh.cells)
    h = fnv1a(format_double(c.center.x) + ' ' + format_double(c.center.y) + ' ' +
                  format_double(c.measure) + ';',
              h);
  for (const auto &e : mesh.interior_edges)
    h = fnv1a(std::to_string(e.k) + ' ' + std::to_string(e.l) + ' ' +
                  format_double(e.transmissibility) + ';',
              h);
  return h;
}

/// Per-cell values of the confining potential scale * |x_K - center|^2.
struct PotentialField {
  std::vector<double> b_values;
};

inline PotentialField potential_field(const Mesh &mesh, Point center = {0.5, 0.5},
                                      double scale = 1.0 / 8.0) {
  PotentialField b;
  b.b_values.reserve(mesh.num_cells());
  for (const auto &c : mesh.cells) {
    const Point d = c.center - center;
    b.b_values.push_back(scale * dot(d, d));
  }
  return b;
}

inline void write_cell_csv(std::ostream &os, const Mesh &mesh, const std::vector<double> &values,
                           const std::string &value_name = "value") {
  if (values.size() != mesh.num_cells())
    throw InvalidArgument("write_cell_csv: value count does not match mesh");
  os << "cell,x,y," << value_name << '\n';
  for (std::size_t k = 0; k < values.size(); ++k)
    os << k << ',' << format_double(mesh.cells[k].center.x) << ','
       << format_double(mesh.cells[k].center.y) << ',' << format_double(values[k]) << '\n';
}

} // namespace seawater
