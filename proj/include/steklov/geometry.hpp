#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace steklov::geometry {

inline constexpr double kPi = 3.14159265358979323846;

enum class DomainKind { FlatDisk, FlatCylinder, SphericalBand, SphericalCap, HyperbolicDisk, PerturbedDisk };

std::string to_string(DomainKind kind);
DomainKind domain_kind_from_string(const std::string& name);

// Study domain. `radius` is the Euclidean radius for FlatDisk and the geodesic
// radius (or band half-angle) for the curved kinds; `half_length` is only read
// for FlatCylinder; the perturbation fields only for PerturbedDisk.
struct DomainSpec {
  DomainKind kind = DomainKind::FlatDisk;
  double radius = 1.0;
  double half_length = 1.0;
  double perturb_eps = 0.0;
  int perturb_mode = 1;

  static DomainSpec flat_disk(double a);
  static DomainSpec flat_cylinder(double L);
  static DomainSpec spherical_band(double R);
  static DomainSpec spherical_cap(double R);
  static DomainSpec hyperbolic_disk(double R);
  static DomainSpec perturbed_disk(double eps, int m);

  // Throws std::invalid_argument when a parameter is out of range.
  void validate() const;
  bool simply_connected() const { return kind != DomainKind::FlatCylinder && kind != DomainKind::SphericalBand; }
  std::string describe() const;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

// Flat parameter regions. The rectangle is [-half_length, half_length] x [0, 2pi)
// with the second coordinate periodic; polar disks are centred at the origin,
// optionally with boundary r(theta) = radius * (1 + eps cos(m theta)).
struct PeriodicRectangle {
  double half_length = 1.0;
};
struct PolarDisk {
  double radius = 1.0;
  double eps = 0.0;
  int mode = 1;
};

struct ConformalChart {
  std::variant<PeriodicRectangle, PolarDisk> parameter_domain;
  std::function<double(Point2)> log_factor;  // w = ln rho
  std::vector<double> boundary_factor;       // rho_0 per boundary component
  double nominal_curvature = 0.0;

  double factor(Point2 p) const;
};

// r = 2 arctan(tanh(L/2)): half-length of a flat cylinder -> spherical band half-angle.
double cylinder_band_map(double L);
// Inverse: t = ln((1 + tan(r/2)) / (1 - tan(r/2))).
double band_cylinder_map(double R);

ConformalChart flat_cylinder_chart(double L);
ConformalChart band_chart(double R);
ConformalChart geodesic_disk_chart(double K, double R);
ConformalChart perturbed_disk_chart(double eps, int m);
ConformalChart chart_for(const DomainSpec& spec);

// Max over interior samples of |e^{-2w}(-Lap0 w) - K| using a centred
// five-point Laplacian with step h. Samples avoid the parameter boundary.
double curvature_residual(const ConformalChart& chart, double h, int samples_per_axis = 24);

struct Periodicity {
  double period = 0.0;     // along the second coordinate
  std::vector<int> seam;   // vertices on y = 0 that stand in for their y = period images
};

struct Mesh {
  std::vector<Point2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::vector<int>> boundary_components;  // counterclockwise cycles
  std::optional<Periodicity> periodic_map;
  std::vector<double> boundary_weights;   // rho_0 per component
  std::vector<double> component_lengths;  // sum rho_0 |e| per component

  // Displacement b - a, unwrapped across the periodic seam.
  Point2 delta(int a, int b) const;
  // Corner coordinates of a triangle, unwrapped relative to its first corner.
  std::array<Point2, 3> triangle_coords(int t) const;
  double signed_area(int t) const;
  double flat_area() const;
  std::vector<double> flat_component_lengths() const;
  // Copy with every boundary weight multiplied by c; lengths rescaled accordingly.
  Mesh with_scaled_weights(double c) const;
};

struct TopologyInfo {
  int genus = 0;
  int boundary_count = 1;
  int euler_char = 1;
};

// Euler characteristic from V - E + F of the (identified) triangulation.
TopologyInfo topology_of(const Mesh& mesh);

struct MeshBuild {
  Mesh mesh;
  ConformalChart chart;
};

// n is the number of radial rings for disks, the number of intervals across
// [-L, L] for cylinders and bands.
MeshBuild make_mesh(const DomainSpec& spec, int resolution);

// Polar disk with a centre fan and `rings` rings carrying 6 i vertices each,
// radially scaled by (1 + eps cos(m theta)).
Mesh polar_disk_mesh(double radius, int rings, double eps = 0.0, int mode = 1);
// Structured grid on [-L, L] x [0, 2pi) with the theta direction merged.
Mesh periodic_strip_mesh(double L, int intervals_across);

// Throws std::runtime_error when an invariant (orientation, boundary cover) fails.
void check_mesh(const Mesh& mesh);

void write_mesh(std::ostream& os, const Mesh& mesh);

}  // namespace steklov::geometry
