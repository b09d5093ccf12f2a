#pragma once

#include <optional>
#include <string>
#include <vector>

#include "steklov/geometry.hpp"

namespace steklov::analytic {

using geometry::DomainSpec;

enum class SpectrumSource { Analytic, Numeric };
std::string to_string(SpectrumSource source);

struct SpectrumEntry {
  double value = 0.0;
  int multiplicity = 1;
  std::string label;
};

struct Spectrum {
  std::vector<SpectrumEntry> entries;
  SpectrumSource source = SpectrumSource::Analytic;
  DomainSpec domain;

  // Eigenvalues with multiplicities expanded, ascending.
  std::vector<double> expanded() const;
};

// Sorts values and merges neighbours whose relative gap is below rel_tol
// (relative to the larger magnitude). Labels of merged entries are joined by '+'.
std::vector<SpectrumEntry> merge_entries(std::vector<SpectrumEntry> raw, double rel_tol);

inline constexpr double kMergeTolerance = 1e-9;
inline constexpr double kThresholdTolerance = 1e-12;

// Unique positive root of x tanh x = 1.
double critical_length();
// 2 arctan(tanh(L0 / 2)).
double critical_band_radius();

Spectrum cylinder_spectrum(double L, int k_max);

struct Sigma1 {
  double value = 0.0;
  int multiplicity = 1;
};
Sigma1 sigma1_cylinder(double L);

Spectrum disk_spectrum(double a, int k_max);
Spectrum scaled_spectrum(const Spectrum& s, double rho0);

// Closed-form spectrum of a domain, or nullopt for perturbed disks.
std::optional<Spectrum> analytic_spectrum(const DomainSpec& spec, int k_max);

// Mode of the flat cylinder [-L, L] x S^1.
struct CylinderMode {
  enum class Kind { Constant, Linear, Cosh, Sinh };
  Kind kind = Kind::Constant;
  int k = 0;            // angular frequency, >= 1 for Cosh/Sinh
  bool sine = false;    // v_k = sin(k theta) instead of cos(k theta)

  std::string label() const;
  // Accepts "const", "linear-t" and "k<k>-<cosh|sinh>-<cos|sin>".
  static CylinderMode parse(const std::string& label);
};

double cylinder_eigenfunction(const CylinderMode& mode, double L, double t, double theta);

struct Gradient2 {
  double dt = 0.0;
  double dtheta = 0.0;
};
Gradient2 cylinder_eigenfunction_gradient(const CylinderMode& mode, double L, double t, double theta);

// Squared boundary gradient of (A cos theta + B sin theta) cosh t on t = +-L.
double subcritical_Q(double theta, double L, double A, double B);

enum class EquivalenceClass { DiskType, CylinderType, None };
std::string to_string(EquivalenceClass cls);

struct Verdict {
  bool solvable = false;
  EquivalenceClass equivalence_class = EquivalenceClass::None;
  double cylinder_length = 0.0;  // L of the equivalent cylinder, when cylinder-type
  std::string witness;
};

Verdict solvability_verdict(const DomainSpec& spec);

}  // namespace steklov::analytic
