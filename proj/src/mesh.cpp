#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

#include "steklov/geometry.hpp"

namespace steklov::geometry {

namespace {

std::uint64_t edge_key(int a, int b) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (lo << 32) | hi;
}

double norm(Point2 d) { return std::hypot(d.x, d.y); }

void fill_lengths(Mesh& mesh) {
  const auto flat = mesh.flat_component_lengths();
  mesh.component_lengths.resize(flat.size());
  for (std::size_t c = 0; c < flat.size(); ++c) mesh.component_lengths[c] = mesh.boundary_weights[c] * flat[c];
}

}  // namespace

Point2 Mesh::delta(int a, int b) const {
  Point2 d{vertices[b].x - vertices[a].x, vertices[b].y - vertices[a].y};
  if (periodic_map) {
    const double P = periodic_map->period;
    while (d.y > 0.5 * P) d.y -= P;
    while (d.y < -0.5 * P) d.y += P;
  }
  return d;
}

std::array<Point2, 3> Mesh::triangle_coords(int t) const {
  const auto& tri = triangles[t];
  const Point2 p0 = vertices[tri[0]];
  const Point2 d1 = delta(tri[0], tri[1]);
  const Point2 d2 = delta(tri[0], tri[2]);
  return {p0, Point2{p0.x + d1.x, p0.y + d1.y}, Point2{p0.x + d2.x, p0.y + d2.y}};
}

double Mesh::signed_area(int t) const {
  const auto& tri = triangles[t];
  const Point2 d1 = delta(tri[0], tri[1]);
  const Point2 d2 = delta(tri[0], tri[2]);
  return 0.5 * (d1.x * d2.y - d1.y * d2.x);
}

double Mesh::flat_area() const {
  double total = 0.0;
  for (int t = 0; t < static_cast<int>(triangles.size()); ++t) total += signed_area(t);
  return total;
}

std::vector<double> Mesh::flat_component_lengths() const {
  std::vector<double> out;
  out.reserve(boundary_components.size());
  for (const auto& cycle : boundary_components) {
    double len = 0.0;
    for (std::size_t i = 0; i < cycle.size(); ++i) len += norm(delta(cycle[i], cycle[(i + 1) % cycle.size()]));
    out.push_back(len);
  }
  return out;
}

Mesh Mesh::with_scaled_weights(double c) const {
  Mesh copy = *this;
  for (auto& w : copy.boundary_weights) w *= c;
  for (auto& l : copy.component_lengths) l *= c;
  return copy;
}

TopologyInfo topology_of(const Mesh& mesh) {
  std::set<std::uint64_t> edges;
  for (const auto& tri : mesh.triangles) {
    for (int k = 0; k < 3; ++k) edges.insert(edge_key(tri[k], tri[(k + 1) % 3]));
  }
  TopologyInfo info;
  info.euler_char = static_cast<int>(mesh.vertices.size()) - static_cast<int>(edges.size()) +
                    static_cast<int>(mesh.triangles.size());
  info.boundary_count = static_cast<int>(mesh.boundary_components.size());
  const int twice_genus = 2 - info.boundary_count - info.euler_char;
  if (twice_genus < 0 || twice_genus % 2 != 0) throw std::runtime_error("topology_of: inconsistent Euler characteristic");
  info.genus = twice_genus / 2;
  return info;
}

Mesh polar_disk_mesh(double radius, int rings, double eps, int mode) {
  if (rings < 1) throw std::invalid_argument("polar_disk_mesh: need at least one ring");
  Mesh mesh;
  mesh.vertices.push_back({0.0, 0.0});
  std::vector<int> ring_start(rings + 1, 0);
  for (int i = 1; i <= rings; ++i) {
    ring_start[i] = static_cast<int>(mesh.vertices.size());
    const int count = 6 * i;
    for (int j = 0; j < count; ++j) {
      const double th = 2.0 * kPi * j / count;
      const double r = radius * i / rings * (1.0 + eps * std::cos(mode * th));
      mesh.vertices.push_back({r * std::cos(th), r * std::sin(th)});
    }
  }
  for (int j = 0; j < 6; ++j) mesh.triangles.push_back({0, ring_start[1] + j, ring_start[1] + (j + 1) % 6});
  for (int i = 2; i <= rings; ++i) {
    const int nin = 6 * (i - 1);
    const int nout = 6 * i;
    auto inner = [&](int p) { return ring_start[i - 1] + p % nin; };
    auto outer = [&](int q) { return ring_start[i] + q % nout; };
    int p = 0;
    int q = 0;
    // Sweep both rings by angle; (q+1)/nout < (p+1)/nin compared exactly in integers.
    while (p < nin || q < nout) {
      const bool advance_outer =
          p == nin || (q < nout && static_cast<long>(q + 1) * nin < static_cast<long>(p + 1) * nout);
      if (advance_outer) {
        mesh.triangles.push_back({inner(p), outer(q), outer(q + 1)});
        ++q;
      } else {
        mesh.triangles.push_back({inner(p), outer(q), inner(p + 1)});
        ++p;
      }
    }
  }
  std::vector<int> boundary(6 * rings);
  for (int j = 0; j < 6 * rings; ++j) boundary[j] = ring_start[rings] + j;
  mesh.boundary_components.push_back(std::move(boundary));
  mesh.boundary_weights = {1.0};
  fill_lengths(mesh);
  return mesh;
}

Mesh periodic_strip_mesh(double L, int intervals_across) {
  if (!(L > 0.0)) throw std::invalid_argument("periodic_strip_mesh: L must be positive");
  const int n = intervals_across;
  if (n < 1) throw std::invalid_argument("periodic_strip_mesh: need at least one interval");
  const int ntheta = std::max(12, static_cast<int>(std::lround(kPi * n / L)));
  Mesh mesh;
  auto id = [ntheta](int i, int j) { return i * ntheta + (j % ntheta); };
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j < ntheta; ++j) mesh.vertices.push_back({-L + 2.0 * L * i / n, 2.0 * kPi * j / ntheta});
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < ntheta; ++j) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      mesh.triangles.push_back({a, b, c});
      mesh.triangles.push_back({a, c, d});
    }
  }
  std::vector<int> lower;
  std::vector<int> upper;
  for (int j = 0; j < ntheta; ++j) {
    lower.push_back(id(0, (ntheta - j) % ntheta));
    upper.push_back(id(n, j));
  }
  mesh.boundary_components = {std::move(lower), std::move(upper)};
  Periodicity per;
  per.period = 2.0 * kPi;
  for (int i = 0; i <= n; ++i) per.seam.push_back(id(i, 0));
  mesh.periodic_map = std::move(per);
  mesh.boundary_weights = {1.0, 1.0};
  fill_lengths(mesh);
  return mesh;
}

MeshBuild make_mesh(const DomainSpec& spec, int resolution) {
  if (resolution < 4) throw std::invalid_argument("make_mesh: resolution must be at least 4");
  ConformalChart chart = chart_for(spec);
  Mesh mesh;
  if (const auto* rect = std::get_if<PeriodicRectangle>(&chart.parameter_domain)) {
    mesh = periodic_strip_mesh(rect->half_length, resolution);
  } else {
    const auto& disk = std::get<PolarDisk>(chart.parameter_domain);
    mesh = polar_disk_mesh(disk.radius, resolution, disk.eps, disk.mode);
  }
  mesh.boundary_weights = chart.boundary_factor;
  fill_lengths(mesh);
  check_mesh(mesh);
  return {std::move(mesh), std::move(chart)};
}

void check_mesh(const Mesh& mesh) {
  const int nv = static_cast<int>(mesh.vertices.size());
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    for (int v : mesh.triangles[t]) {
      if (v < 0 || v >= nv) throw std::runtime_error("check_mesh: triangle references a missing vertex");
    }
    if (!(mesh.signed_area(t) > 0.0)) throw std::runtime_error("check_mesh: non-positive triangle area");
  }
  // Directed edges that have no reversed twin form the boundary.
  std::map<std::pair<int, int>, int> directed;
  for (const auto& tri : mesh.triangles) {
    for (int k = 0; k < 3; ++k) ++directed[{tri[k], tri[(k + 1) % 3]}];
  }
  std::set<std::pair<int, int>> open;
  for (const auto& [e, count] : directed) {
    if (count > 1) throw std::runtime_error("check_mesh: inconsistent orientation");
    if (!directed.count({e.second, e.first})) open.insert(e);
  }
  std::set<int> seen;
  std::size_t cycle_edges = 0;
  for (const auto& cycle : mesh.boundary_components) {
    if (cycle.size() < 3) throw std::runtime_error("check_mesh: boundary cycle too short");
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      if (!seen.insert(cycle[i]).second) throw std::runtime_error("check_mesh: boundary cycles overlap");
      if (!open.count({cycle[i], cycle[(i + 1) % cycle.size()]})) {
        throw std::runtime_error("check_mesh: boundary cycle is not a counterclockwise boundary path");
      }
    }
    cycle_edges += cycle.size();
  }
  if (cycle_edges != open.size()) throw std::runtime_error("check_mesh: boundary cycles miss boundary edges");
  if (mesh.boundary_weights.size() != mesh.boundary_components.size()) {
    throw std::runtime_error("check_mesh: one boundary weight per component required");
  }
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
  char buf[96];
  os << "vertices " << mesh.vertices.size() << " triangles " << mesh.triangles.size() << " boundaries "
     << mesh.boundary_components.size() << '\n';
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v.x, v.y);
    os << buf;
  }
  for (const auto& t : mesh.triangles) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& cycle : mesh.boundary_components) {
    for (std::size_t i = 0; i < cycle.size(); ++i) os << (i ? " " : "") << cycle[i];
    os << '\n';
  }
}

}  // namespace steklov::geometry
