#include "steklov/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace steklov::geometry {

std::string to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::FlatDisk: return "disk";
    case DomainKind::FlatCylinder: return "cylinder";
    case DomainKind::SphericalBand: return "band";
    case DomainKind::SphericalCap: return "cap";
    case DomainKind::HyperbolicDisk: return "hyperbolic-disk";
    case DomainKind::PerturbedDisk: return "perturbed-disk";
  }
  return "unknown";
}

DomainKind domain_kind_from_string(const std::string& name) {
  for (auto kind : {DomainKind::FlatDisk, DomainKind::FlatCylinder, DomainKind::SphericalBand,
                    DomainKind::SphericalCap, DomainKind::HyperbolicDisk, DomainKind::PerturbedDisk}) {
    if (to_string(kind) == name) return kind;
  }
  throw std::invalid_argument("unknown domain kind '" + name + "'");
}

DomainSpec DomainSpec::flat_disk(double a) {
  DomainSpec s;
  s.kind = DomainKind::FlatDisk;
  s.radius = a;
  return s;
}

DomainSpec DomainSpec::flat_cylinder(double L) {
  DomainSpec s;
  s.kind = DomainKind::FlatCylinder;
  s.half_length = L;
  return s;
}

DomainSpec DomainSpec::spherical_band(double R) {
  DomainSpec s;
  s.kind = DomainKind::SphericalBand;
  s.radius = R;
  return s;
}

DomainSpec DomainSpec::spherical_cap(double R) {
  DomainSpec s;
  s.kind = DomainKind::SphericalCap;
  s.radius = R;
  return s;
}

DomainSpec DomainSpec::hyperbolic_disk(double R) {
  DomainSpec s;
  s.kind = DomainKind::HyperbolicDisk;
  s.radius = R;
  return s;
}

DomainSpec DomainSpec::perturbed_disk(double eps, int m) {
  DomainSpec s;
  s.kind = DomainKind::PerturbedDisk;
  s.radius = 1.0;
  s.perturb_eps = eps;
  s.perturb_mode = m;
  return s;
}

void DomainSpec::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  switch (kind) {
    case DomainKind::FlatDisk:
    case DomainKind::HyperbolicDisk:
      require(radius > 0.0 && std::isfinite(radius), "radius must be positive");
      break;
    case DomainKind::FlatCylinder:
      require(half_length > 0.0 && std::isfinite(half_length), "cylinder half-length L must be positive");
      break;
    case DomainKind::SphericalBand:
      require(radius > 0.0 && radius < kPi / 2, "band half-angle R must lie in (0, pi/2)");
      break;
    case DomainKind::SphericalCap:
      require(radius > 0.0 && radius < kPi, "cap radius R must lie in (0, pi)");
      break;
    case DomainKind::PerturbedDisk:
      require(perturb_eps >= 0.0 && perturb_eps < 1.0, "perturbation eps must lie in [0, 1)");
      require(perturb_mode >= 1, "perturbation mode m must be >= 1");
      break;
  }
}

std::string DomainSpec::describe() const {
  char buf[128];
  switch (kind) {
    case DomainKind::FlatCylinder:
      std::snprintf(buf, sizeof buf, "cylinder(L=%.12g)", half_length);
      break;
    case DomainKind::PerturbedDisk:
      std::snprintf(buf, sizeof buf, "perturbed-disk(eps=%.12g, m=%d)", perturb_eps, perturb_mode);
      break;
    default:
      std::snprintf(buf, sizeof buf, "%s(R=%.12g)", to_string(kind).c_str(), radius);
      break;
  }
  return buf;
}

double ConformalChart::factor(Point2 p) const { return std::exp(log_factor(p)); }

double cylinder_band_map(double L) {
  if (!(L > 0.0)) throw std::invalid_argument("cylinder_band_map: L must be positive");
  return 2.0 * std::atan(std::tanh(0.5 * L));
}

double band_cylinder_map(double R) {
  if (!(R > 0.0 && R < kPi / 2)) throw std::invalid_argument("band_cylinder_map: R must lie in (0, pi/2)");
  const double s = std::tan(0.5 * R);
  // ln((1+s)/(1-s)) = 2 atanh(s), which keeps precision for small s.
  return 2.0 * std::atanh(s);
}

ConformalChart flat_cylinder_chart(double L) {
  if (!(L > 0.0)) throw std::invalid_argument("flat_cylinder_chart: L must be positive");
  ConformalChart c;
  c.parameter_domain = PeriodicRectangle{L};
  c.log_factor = [](Point2) { return 0.0; };
  c.boundary_factor = {1.0, 1.0};
  c.nominal_curvature = 0.0;
  return c;
}

ConformalChart band_chart(double R) {
  const double L = band_cylinder_map(R);
  ConformalChart c;
  c.parameter_domain = PeriodicRectangle{L};
  c.log_factor = [](Point2 p) { return -std::log(std::cosh(p.x)); };
  const double rho0 = 1.0 / std::cosh(L);
  c.boundary_factor = {rho0, rho0};
  c.nominal_curvature = 1.0;
  return c;
}

ConformalChart geodesic_disk_chart(double K, double R) {
  if (!(R > 0.0)) throw std::invalid_argument("geodesic_disk_chart: R must be positive");
  ConformalChart c;
  c.nominal_curvature = K;
  if (K == 0.0) {
    c.parameter_domain = PolarDisk{R};
    c.log_factor = [](Point2) { return 0.0; };
  } else if (K == 1.0) {
    if (!(R < kPi)) throw std::invalid_argument("geodesic_disk_chart: spherical radius must be below pi");
    c.parameter_domain = PolarDisk{std::tan(0.5 * R)};
    c.log_factor = [](Point2 p) { return std::log(2.0 / (1.0 + p.x * p.x + p.y * p.y)); };
  } else if (K == -1.0) {
    c.parameter_domain = PolarDisk{std::tanh(0.5 * R)};
    c.log_factor = [](Point2 p) { return std::log(2.0 / (1.0 - p.x * p.x - p.y * p.y)); };
  } else {
    throw std::invalid_argument("geodesic_disk_chart: K must be -1, 0 or 1");
  }
  const double rE = std::get<PolarDisk>(c.parameter_domain).radius;
  c.boundary_factor = {std::exp(c.log_factor(Point2{rE, 0.0}))};
  return c;
}

ConformalChart perturbed_disk_chart(double eps, int m) {
  ConformalChart c;
  c.parameter_domain = PolarDisk{1.0, eps, m};
  c.log_factor = [](Point2) { return 0.0; };
  c.boundary_factor = {1.0};
  c.nominal_curvature = 0.0;
  return c;
}

ConformalChart chart_for(const DomainSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case DomainKind::FlatDisk: return geodesic_disk_chart(0.0, spec.radius);
    case DomainKind::FlatCylinder: return flat_cylinder_chart(spec.half_length);
    case DomainKind::SphericalBand: return band_chart(spec.radius);
    case DomainKind::SphericalCap: return geodesic_disk_chart(1.0, spec.radius);
    case DomainKind::HyperbolicDisk: return geodesic_disk_chart(-1.0, spec.radius);
    case DomainKind::PerturbedDisk: return perturbed_disk_chart(spec.perturb_eps, spec.perturb_mode);
  }
  throw std::invalid_argument("chart_for: unhandled domain kind");
}

double curvature_residual(const ConformalChart& chart, double h, int samples_per_axis) {
  const auto& w = chart.log_factor;
  const double K = chart.nominal_curvature;
  double worst = 0.0;
  auto probe = [&](Point2 p) {
    const double lap = (w({p.x + h, p.y}) + w({p.x - h, p.y}) + w({p.x, p.y + h}) + w({p.x, p.y - h}) - 4.0 * w(p)) /
                       (h * h);
    worst = std::max(worst, std::abs(std::exp(-2.0 * w(p)) * (-lap) - K));
  };
  const int n = samples_per_axis;
  if (const auto* rect = std::get_if<PeriodicRectangle>(&chart.parameter_domain)) {
    const double span = rect->half_length - 2.0 * h;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        probe({-span + 2.0 * span * (i + 0.5) / n, 2.0 * kPi * j / n});
      }
    }
  } else {
    const auto& disk = std::get<PolarDisk>(chart.parameter_domain);
    const double rmax = disk.radius * (1.0 - disk.eps) - 2.0 * h;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double r = rmax * (i + 0.5) / n;
        const double th = 2.0 * kPi * j / n;
        probe({r * std::cos(th), r * std::sin(th)});
      }
    }
  }
  return worst;
}

}  // namespace steklov::geometry
