#include "steklov/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace steklov::analytic {

using geometry::DomainKind;
using geometry::kPi;

std::string to_string(SpectrumSource source) { return source == SpectrumSource::Analytic ? "analytic" : "numeric"; }

std::string to_string(EquivalenceClass cls) {
  switch (cls) {
    case EquivalenceClass::DiskType: return "disk-type";
    case EquivalenceClass::CylinderType: return "cylinder-type";
    case EquivalenceClass::None: return "none";
  }
  return "none";
}

std::vector<double> Spectrum::expanded() const {
  std::vector<double> out;
  for (const auto& e : entries) out.insert(out.end(), static_cast<std::size_t>(e.multiplicity), e.value);
  return out;
}

std::vector<SpectrumEntry> merge_entries(std::vector<SpectrumEntry> raw, double rel_tol) {
  std::stable_sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
  std::vector<SpectrumEntry> out;
  for (auto& e : raw) {
    if (!out.empty()) {
      auto& last = out.back();
      const double scale = std::max(std::abs(last.value), std::abs(e.value));
      if (std::abs(e.value - last.value) <= rel_tol * scale) {
        last.multiplicity += e.multiplicity;
        last.label += "+" + e.label;
        continue;
      }
    }
    out.push_back(std::move(e));
  }
  return out;
}

double critical_length() {
  auto g = [](double x) { return x * std::tanh(x) - 1.0; };
  double lo = 1.0;
  double hi = 1.5;
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < 2; ++i) {
    const double th = std::tanh(x);
    x -= g(x) / (th + x * (1.0 - th * th));
  }
  return x;
}

double critical_band_radius() { return geometry::cylinder_band_map(critical_length()); }

Spectrum cylinder_spectrum(double L, int k_max) {
  if (!(L > 0.0)) throw std::invalid_argument("cylinder_spectrum: L must be positive");
  if (k_max < 1) throw std::invalid_argument("cylinder_spectrum: k_max must be >= 1");
  std::vector<SpectrumEntry> raw{{0.0, 1, "const"}, {1.0 / L, 1, "linear-t"}};
  for (int k = 1; k <= k_max; ++k) {
    const double kL = k * L;
    raw.push_back({k * std::tanh(kL), 2, "k" + std::to_string(k) + "-cosh"});
    raw.push_back({k / std::tanh(kL), 2, "k" + std::to_string(k) + "-sinh"});
  }
  Spectrum s;
  s.entries = merge_entries(std::move(raw), kMergeTolerance);
  s.source = SpectrumSource::Analytic;
  s.domain = DomainSpec::flat_cylinder(L);
  return s;
}

Sigma1 sigma1_cylinder(double L) {
  if (!(L > 0.0)) throw std::invalid_argument("sigma1_cylinder: L must be positive");
  const double L0 = critical_length();
  Sigma1 out;
  out.value = std::min(1.0 / L, std::tanh(L));
  if (std::abs(L - L0) <= kThresholdTolerance) {
    out.multiplicity = 3;
  } else {
    out.multiplicity = L > L0 ? 1 : 2;
  }
  return out;
}

Spectrum disk_spectrum(double a, int k_max) {
  if (!(a > 0.0)) throw std::invalid_argument("disk_spectrum: radius must be positive");
  if (k_max < 0) throw std::invalid_argument("disk_spectrum: k_max must be non-negative");
  Spectrum s;
  s.entries.push_back({0.0, 1, "const"});
  for (int k = 1; k <= k_max; ++k) s.entries.push_back({k / a, 2, "r^" + std::to_string(k) + "-cos/sin"});
  s.source = SpectrumSource::Analytic;
  s.domain = DomainSpec::flat_disk(a);
  return s;
}

Spectrum scaled_spectrum(const Spectrum& s, double rho0) {
  if (!(rho0 > 0.0)) throw std::invalid_argument("scaled_spectrum: rho0 must be positive");
  Spectrum out = s;
  for (auto& e : out.entries) e.value /= rho0;
  return out;
}

std::optional<Spectrum> analytic_spectrum(const DomainSpec& spec, int k_max) {
  spec.validate();
  switch (spec.kind) {
    case DomainKind::FlatDisk: return disk_spectrum(spec.radius, k_max);
    case DomainKind::FlatCylinder: return cylinder_spectrum(spec.half_length, k_max);
    case DomainKind::SphericalBand: {
      const auto chart = geometry::band_chart(spec.radius);
      const double L = std::get<geometry::PeriodicRectangle>(chart.parameter_domain).half_length;
      auto s = scaled_spectrum(cylinder_spectrum(L, k_max), chart.boundary_factor[0]);
      s.domain = spec;
      return s;
    }
    case DomainKind::SphericalCap:
    case DomainKind::HyperbolicDisk: {
      const auto chart = geometry::chart_for(spec);
      const double rE = std::get<geometry::PolarDisk>(chart.parameter_domain).radius;
      auto s = scaled_spectrum(disk_spectrum(rE, k_max), chart.boundary_factor[0]);
      s.domain = spec;
      return s;
    }
    case DomainKind::PerturbedDisk:
      if (spec.perturb_eps == 0.0) {
        auto s = disk_spectrum(1.0, k_max);
        s.domain = spec;
        return s;
      }
      return std::nullopt;
  }
  return std::nullopt;
}

std::string CylinderMode::label() const {
  switch (kind) {
    case Kind::Constant: return "const";
    case Kind::Linear: return "linear-t";
    case Kind::Cosh:
    case Kind::Sinh:
      return "k" + std::to_string(k) + (kind == Kind::Cosh ? "-cosh" : "-sinh") + (sine ? "-sin" : "-cos");
  }
  return "const";
}

CylinderMode CylinderMode::parse(const std::string& label) {
  CylinderMode m;
  if (label == "const") return m;
  if (label == "linear-t") {
    m.kind = Kind::Linear;
    return m;
  }
  const auto bad = [&label] { return std::invalid_argument("unknown cylinder mode label '" + label + "'"); };
  if (label.size() < 2 || label[0] != 'k') throw bad();
  const auto dash = label.find('-');
  if (dash == std::string::npos || dash == 1) throw bad();
  for (std::size_t i = 1; i < dash; ++i) {
    if (label[i] < '0' || label[i] > '9') throw bad();
  }
  m.k = std::stoi(label.substr(1, dash - 1));
  const std::string rest = label.substr(dash + 1);
  if (rest == "cosh-cos" || rest == "cosh-sin") {
    m.kind = Kind::Cosh;
  } else if (rest == "sinh-cos" || rest == "sinh-sin") {
    m.kind = Kind::Sinh;
  } else {
    throw bad();
  }
  m.sine = rest.substr(5) == "sin";
  if (m.k < 1) throw bad();
  return m;
}

double cylinder_eigenfunction(const CylinderMode& mode, double L, double t, double theta) {
  (void)L;
  switch (mode.kind) {
    case CylinderMode::Kind::Constant: return 1.0;
    case CylinderMode::Kind::Linear: return t;
    case CylinderMode::Kind::Cosh:
    case CylinderMode::Kind::Sinh: {
      const double radial = mode.kind == CylinderMode::Kind::Cosh ? std::cosh(mode.k * t) : std::sinh(mode.k * t);
      const double angular = mode.sine ? std::sin(mode.k * theta) : std::cos(mode.k * theta);
      return radial * angular;
    }
  }
  throw std::invalid_argument("cylinder_eigenfunction: unknown mode");
}

Gradient2 cylinder_eigenfunction_gradient(const CylinderMode& mode, double L, double t, double theta) {
  (void)L;
  switch (mode.kind) {
    case CylinderMode::Kind::Constant: return {};
    case CylinderMode::Kind::Linear: return {1.0, 0.0};
    case CylinderMode::Kind::Cosh:
    case CylinderMode::Kind::Sinh: {
      const double k = mode.k;
      const bool cosh_mode = mode.kind == CylinderMode::Kind::Cosh;
      const double radial = cosh_mode ? std::cosh(k * t) : std::sinh(k * t);
      const double dradial = k * (cosh_mode ? std::sinh(k * t) : std::cosh(k * t));
      const double angular = mode.sine ? std::sin(k * theta) : std::cos(k * theta);
      const double dangular = k * (mode.sine ? std::cos(k * theta) : -std::sin(k * theta));
      return {dradial * angular, radial * dangular};
    }
  }
  throw std::invalid_argument("cylinder_eigenfunction_gradient: unknown mode");
}

double subcritical_Q(double theta, double L, double A, double B) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double along = A * c + B * s;
  const double across = B * c - A * s;
  const double sh = std::sinh(L);
  const double ch = std::cosh(L);
  return along * along * sh * sh + across * across * ch * ch;
}

Verdict solvability_verdict(const DomainSpec& spec) {
  spec.validate();
  Verdict v;
  switch (spec.kind) {
    case DomainKind::FlatDisk:
    case DomainKind::SphericalCap:
    case DomainKind::HyperbolicDisk:
      v.solvable = true;
      v.equivalence_class = EquivalenceClass::DiskType;
      v.witness = "every first eigenfunction (conformal image of r cos(theta - phi)) has constant boundary gradient";
      return v;
    case DomainKind::PerturbedDisk:
      if (spec.perturb_eps == 0.0) {
        v.solvable = true;
        v.equivalence_class = EquivalenceClass::DiskType;
        v.witness = "unperturbed unit disk";
      } else {
        v.solvable = false;
        v.equivalence_class = EquivalenceClass::None;
        v.witness = "Weinstock strict: simply connected and not a round disk, so sigma1 * L(boundary) < 2 pi";
      }
      return v;
    case DomainKind::FlatCylinder:
    case DomainKind::SphericalBand: {
      const double L = spec.kind == DomainKind::FlatCylinder ? spec.half_length : geometry::band_cylinder_map(spec.radius);
      const double L0 = critical_length();
      v.equivalence_class = EquivalenceClass::CylinderType;
      v.cylinder_length = L;
      v.solvable = L >= L0 - kThresholdTolerance;
      v.witness = v.solvable ? "linear-t: u = t has |grad u| = 1 and constant traces +-L"
                             : "sigma1 = tanh L with eigenspace (A cos + B sin) cosh t; boundary gradient never constant";
      return v;
    }
  }
  return v;
}

}  // namespace steklov::analytic
