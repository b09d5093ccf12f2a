#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "steklov/analytic.hpp"
#include "steklov/geometry.hpp"
#include "steklov/solver.hpp"

namespace steklov::diagnostics {

using fem::EigenSolution;
using geometry::DomainSpec;

struct Thresholds {
  double tau_solv = 1e-2;   // CV(|grad u|) below which a boundary gradient counts as constant
  double tau_const = 1e-3;  // CV of a trace below which it counts as constant
  int scan_steps = 180;
  int fibonacci_points = 1000;
  double threshold_blur = 0.02;  // |L - L0| inside which verdict disagreement is tolerated
};

struct GradientStats {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double cv = 0.0;
};

GradientStats sample_stats(const std::vector<double>& samples);

// Per-component statistics of boundary_gradient. Throws fem::SolverError on a
// zero mean gradient, which cannot happen for sigma > 0.
std::vector<GradientStats> gradient_constancy(const EigenSolution& eig);

double worst_cv(const std::vector<GradientStats>& stats);

// Linear combination sum c_i u_i of a cluster; sigma is the Rayleigh value sum c_i^2 sigma_i.
EigenSolution combine(const std::vector<EigenSolution>& cluster, const std::vector<double>& coefficients);

struct ScanResult {
  double best_cv = 0.0;               // minimum over the eigenspace of the worst-component CV
  std::vector<double> coefficients;   // unit vector attaining it
  std::vector<GradientStats> stats;   // per component, at the optimum
  double worst_scanned_cv = 0.0;      // maximum over the scan grid (before refinement)
  int evaluations = 0;
};

// Multiplicity 1: the single function. Multiplicity 2: cos(phi) g1 + sin(phi) g2
// over `scan_steps` angles in [0, pi). Multiplicity 3: Fibonacci grid on the
// unit sphere. Grid minima are polished by a local search.
ScanResult eigenspace_scan(const std::vector<EigenSolution>& cluster, const Thresholds& thresholds = {});

double weinstock_product(double sigma1, double boundary_length);

struct IdentityResidual {
  std::string name;
  double max_abs_residual = 0.0;
  int sample_count = 0;
  int resolution = 0;
  int skipped = 0;
};

struct TraceComponent {
  bool is_constant = false;
  double value = 0.0;  // mean trace value
  double cv = 0.0;
};

struct TraceCheck {
  bool applicable = false;     // two components
  bool all_constant = false;
  std::vector<TraceComponent> components;
  double sum_residual = 0.0;        // |c1 + c2| / max|c_i|
  double magnitude_residual = 0.0;  // max_i |c_i^2 - c^2/sigma^2| / c_i^2
  bool consistent = false;          // both residuals within tolerance
};

TraceCheck trace_constant_values(const EigenSolution& eig, double tau_const, double tol);

// Boundary bookkeeping: |sigma1 * sum_i delta_i L_i - 2 pi chi|, delta_i = 1 when
// the trace on component i is NOT constant.
IdentityResidual gauss_bonnet_identity(double sigma1, const std::vector<bool>& trace_nonconstant,
                                       const std::vector<double>& lengths, int euler_char, int resolution = 0);

enum class Stencil { FivePoint, NinePoint };

// Discrete Laplacian of f = log |grad u|^2 for a closed-form flat-cylinder mode
// on the grid of spacing h over (-L, L) x [0, 2pi). Grid points with
// |grad u|^2 < min_grad_sq are skipped and counted.
IdentityResidual delta_f_harmonicity(const analytic::CylinderMode& mode, double L, double h, Stencil stencil,
                                     double min_grad_sq = 0.01);

// Same for the disk mode u = r cos(theta) of radius a on a Cartesian grid.
IdentityResidual delta_f_disk(double a, double h, Stencil stencil);

struct DiskMode1 {
  double radius = 1.0;
};
struct CylinderLinear {
  double half_length = 1.0;
};
using OsiDescriptor = std::variant<DiskMode1, CylinderLinear>;

// Residual of (1/2) df/dnu - (sigma1 - kappa) on the disk and of
// (1/2) df/dnu + kappa on a cylinder component, sampled around the boundary.
IdentityResidual prop_boundary_check(const OsiDescriptor& descriptor, int samples = 64);

// Integral of u over the domain in the g-area element e^{2w} dA_0, by the
// edge-midpoint rule on each triangle.
double mean_value(const geometry::Mesh& mesh, const geometry::ConformalChart& chart, const Eigen::VectorXd& nodal);
double mean_value(const EigenSolution& eig, const geometry::ConformalChart& chart);
double mean_value(const geometry::Mesh& mesh, const geometry::ConformalChart& chart,
                  const std::function<double(geometry::Point2)>& closed_form);

// max_k |1^T M g_k| over the given solutions (skipping sigma_0).
double boundary_orthogonality(const std::vector<EigenSolution>& solutions, const Eigen::MatrixXd& boundary_mass);

struct SolvabilityReport {
  DomainSpec domain;
  int resolution = 0;
  std::vector<double> eigenvalues;  // numeric, including sigma_0
  double sigma1 = 0.0;
  int sigma1_multiplicity = 0;
  std::optional<double> sigma1_analytic;
  std::vector<std::vector<GradientStats>> gradient_stats;  // per first-eigenspace basis function
  ScanResult scan;
  std::vector<bool> trace_constant;  // per component, for the scan witness
  std::vector<bool> delta_flags;     // per component, 1 = trace not constant
  std::optional<double> weinstock_product;
  double boundary_length = 0.0;
  std::vector<double> component_lengths;
  geometry::TopologyInfo topology;
  bool verdict_numeric = false;
  analytic::Verdict verdict_analytic;
  bool threshold_zone = false;
  bool verdicts_agree = false;
  std::optional<IdentityResidual> gauss_bonnet;
  TraceCheck trace_check;
  std::vector<double> mean_values;  // eigenfunctions k >= 1
  double boundary_orthogonality = 0.0;
  Thresholds thresholds;
};

inline constexpr int kReportEigenCount = 11;

SolvabilityReport run_full_report(const DomainSpec& spec, int resolution, const Thresholds& thresholds = {},
                                  const fem::SolverConfig& config = {});

}  // namespace steklov::diagnostics
