#include "steklov/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace steklov::diagnostics {

using geometry::kPi;
using geometry::Point2;

GradientStats sample_stats(const std::vector<double>& samples) {
  GradientStats s;
  if (samples.empty()) return s;
  double sum = 0.0;
  s.min = samples.front();
  s.max = samples.front();
  for (double v : samples) {
    sum += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean = sum / static_cast<double>(samples.size());
  double var = 0.0;
  for (double v : samples) var += (v - s.mean) * (v - s.mean);
  var /= static_cast<double>(samples.size());
  s.cv = s.mean != 0.0 ? std::sqrt(var) / std::abs(s.mean) : std::numeric_limits<double>::infinity();
  return s;
}

std::vector<GradientStats> gradient_constancy(const EigenSolution& eig) {
  if (!(eig.sigma > 0.0)) throw std::invalid_argument("gradient_constancy: eigenvalue must be positive");
  std::vector<GradientStats> out;
  for (const auto& samples : fem::boundary_gradient(eig)) {
    out.push_back(sample_stats(samples));
    if (!(out.back().mean > 0.0)) throw fem::SolverError("zero mean boundary gradient for a positive eigenvalue");
  }
  return out;
}

double worst_cv(const std::vector<GradientStats>& stats) {
  double w = 0.0;
  for (const auto& s : stats) w = std::max(w, s.cv);
  return w;
}

namespace {

EigenSolution combine_boundary(const std::vector<EigenSolution>& cluster, const std::vector<double>& c) {
  EigenSolution out;
  out.boundary_values = Eigen::VectorXd::Zero(cluster.front().boundary_values.size());
  double norm_sq = 0.0;
  for (std::size_t i = 0; i < cluster.size(); ++i) {
    out.boundary_values += c[i] * cluster[i].boundary_values;
    out.sigma += c[i] * c[i] * cluster[i].sigma;
    norm_sq += c[i] * c[i];
  }
  out.sigma /= norm_sq;
  out.boundary_values /= std::sqrt(norm_sq);
  out.weight_used = cluster.front().weight_used;
  out.mesh = cluster.front().mesh;
  out.partition = cluster.front().partition;
  return out;
}

double score(const std::vector<EigenSolution>& cluster, const std::vector<double>& c) {
  return worst_cv(gradient_constancy(combine_boundary(cluster, c)));
}

std::vector<double> on_sphere(const Eigen::Vector3d& p) {
  const Eigen::Vector3d q = p.normalized();
  return {q.x(), q.y(), q.z()};
}

}  // namespace

EigenSolution combine(const std::vector<EigenSolution>& cluster, const std::vector<double>& coefficients) {
  if (cluster.empty() || coefficients.size() != cluster.size()) {
    throw std::invalid_argument("combine: one coefficient per eigenfunction required");
  }
  EigenSolution out = combine_boundary(cluster, coefficients);
  double norm_sq = 0.0;
  for (double c : coefficients) norm_sq += c * c;
  out.interior_values = Eigen::VectorXd::Zero(cluster.front().interior_values.size());
  for (std::size_t i = 0; i < cluster.size(); ++i) out.interior_values += coefficients[i] * cluster[i].interior_values;
  out.interior_values /= std::sqrt(norm_sq);
  return out;
}

ScanResult eigenspace_scan(const std::vector<EigenSolution>& cluster, const Thresholds& thresholds) {
  if (cluster.empty() || cluster.size() > 3) throw std::invalid_argument("eigenspace_scan: cluster size must be 1 to 3");
  ScanResult result;
  auto eval = [&](const std::vector<double>& c) {
    ++result.evaluations;
    return score(cluster, c);
  };

  if (cluster.size() == 1) {
    result.coefficients = {1.0};
    result.best_cv = eval(result.coefficients);
    result.worst_scanned_cv = result.best_cv;
  } else if (cluster.size() == 2) {
    const int steps = std::max(2, thresholds.scan_steps);
    const double dphi = kPi / steps;
    auto at = [](double phi) { return std::vector<double>{std::cos(phi), std::sin(phi)}; };
    int best = 0;
    double best_cv = std::numeric_limits<double>::infinity();
    for (int i = 0; i < steps; ++i) {
      const double cv = eval(at(i * dphi));
      result.worst_scanned_cv = std::max(result.worst_scanned_cv, cv);
      if (cv < best_cv) {
        best_cv = cv;
        best = i;
      }
    }
    // Golden-section polish inside the neighbouring grid cells.
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = (best - 1) * dphi;
    double b = (best + 1) * dphi;
    double x1 = b - golden * (b - a);
    double x2 = a + golden * (b - a);
    double f1 = eval(at(x1));
    double f2 = eval(at(x2));
    while (b - a > 1e-10) {
      if (f1 < f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - golden * (b - a);
        f1 = eval(at(x1));
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + golden * (b - a);
        f2 = eval(at(x2));
      }
    }
    const double phi = f1 < f2 ? x1 : x2;
    const double polished = std::min(f1, f2);
    if (polished < best_cv) {
      result.coefficients = at(phi);
      result.best_cv = polished;
    } else {
      result.coefficients = at(best * dphi);
      result.best_cv = best_cv;
    }
  } else {
    const int n = std::max(2, thresholds.fibonacci_points);
    const double golden_angle = kPi * (3.0 - std::sqrt(5.0));
    Eigen::Vector3d best_p;
    double best_cv = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / n;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = i * golden_angle;
      const Eigen::Vector3d p(r * std::cos(phi), r * std::sin(phi), z);
      const double cv = eval(on_sphere(p));
      result.worst_scanned_cv = std::max(result.worst_scanned_cv, cv);
      if (cv < best_cv) {
        best_cv = cv;
        best_p = p;
      }
    }
    // Compass search on the sphere around the best grid point.
    double step = 0.5 * std::sqrt(4.0 * kPi / n);
    while (step > 1e-9 && result.evaluations < n + 2000) {
      Eigen::Vector3d e1 = best_p.unitOrthogonal();
      Eigen::Vector3d e2 = best_p.cross(e1).normalized();
      bool moved = false;
      for (const Eigen::Vector3d& dir : {e1, Eigen::Vector3d(-e1), e2, Eigen::Vector3d(-e2)}) {
        const Eigen::Vector3d trial = (best_p + step * dir).normalized();
        const double cv = eval(on_sphere(trial));
        if (cv < best_cv) {
          best_cv = cv;
          best_p = trial;
          moved = true;
          break;
        }
      }
      if (!moved) step *= 0.5;
    }
    result.coefficients = on_sphere(best_p);
    result.best_cv = best_cv;
  }
  result.stats = gradient_constancy(combine_boundary(cluster, result.coefficients));
  return result;
}

double weinstock_product(double sigma1, double boundary_length) { return sigma1 * boundary_length; }

TraceCheck trace_constant_values(const EigenSolution& eig, double tau_const, double tol) {
  TraceCheck out;
  const int k = eig.component_count();
  out.applicable = k == 2;
  out.all_constant = true;
  for (int c = 0; c < k; ++c) {
    const Eigen::VectorXd tr = eig.trace(c);
    const std::vector<double> values(tr.data(), tr.data() + tr.size());
    const GradientStats s = sample_stats(values);
    TraceComponent comp;
    comp.value = s.mean;
    comp.cv = s.cv;
    comp.is_constant = s.cv <= tau_const;
    out.all_constant = out.all_constant && comp.is_constant;
    out.components.push_back(comp);
  }
  if (!out.applicable || !out.all_constant) return out;

  const double c1 = out.components[0].value;
  const double c2 = out.components[1].value;
  out.sum_residual = std::abs(c1 + c2) / std::max(std::abs(c1), std::abs(c2));
  double mean_grad = 0.0;
  int count = 0;
  for (const auto& samples : fem::boundary_gradient(eig)) {
    for (double v : samples) {
      mean_grad += v;
      ++count;
    }
  }
  mean_grad /= count;
  const double target = mean_grad * mean_grad / (eig.sigma * eig.sigma);
  for (const auto& comp : out.components) {
    out.magnitude_residual =
        std::max(out.magnitude_residual, std::abs(comp.value * comp.value - target) / (comp.value * comp.value));
  }
  out.consistent = out.sum_residual <= tol && out.magnitude_residual <= tol;
  return out;
}

IdentityResidual gauss_bonnet_identity(double sigma1, const std::vector<bool>& trace_nonconstant,
                                       const std::vector<double>& lengths, int euler_char, int resolution) {
  if (trace_nonconstant.size() != lengths.size()) throw std::invalid_argument("gauss_bonnet_identity: size mismatch");
  double lhs = 0.0;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (trace_nonconstant[i]) lhs += sigma1 * lengths[i];
  }
  IdentityResidual r;
  r.name = "gauss_bonnet";
  r.max_abs_residual = std::abs(lhs - 2.0 * kPi * euler_char);
  r.sample_count = static_cast<int>(lengths.size());
  r.resolution = resolution;
  return r;
}

namespace {

template <typename F, typename Accept>
IdentityResidual grid_laplacian(const char* name, F&& f, Accept&& accept, double x0, double x1, double y0,
                                double y1, bool periodic_y, double h, Stencil stencil) {
  IdentityResidual r;
  r.name = name;
  r.resolution = static_cast<int>(std::lround(1.0 / h));
  const int nx = static_cast<int>(std::floor((x1 - x0) / h + 1e-9));
  const int ny = periodic_y ? static_cast<int>(std::lround((y1 - y0) / h)) : static_cast<int>(std::floor((y1 - y0) / h + 1e-9));
  const int margin = 1;
  for (int i = margin; i <= nx - margin; ++i) {
    const double x = x0 + i * h;
    if (x <= x0 || x >= x1) continue;
    for (int j = periodic_y ? 0 : margin; j < (periodic_y ? ny : ny - margin + 1); ++j) {
      const double y = y0 + j * h;
      if (!accept(x, y)) {
        ++r.skipped;
        continue;
      }
      const double c = f(x, y);
      const double edge = f(x + h, y) + f(x - h, y) + f(x, y + h) + f(x, y - h);
      double lap;
      if (stencil == Stencil::FivePoint) {
        lap = (edge - 4.0 * c) / (h * h);
      } else {
        const double corner = f(x + h, y + h) + f(x - h, y + h) + f(x + h, y - h) + f(x - h, y - h);
        lap = (4.0 * edge + corner - 20.0 * c) / (6.0 * h * h);
      }
      r.max_abs_residual = std::max(r.max_abs_residual, std::abs(0.5 * lap));
      ++r.sample_count;
    }
  }
  return r;
}

}  // namespace

IdentityResidual delta_f_harmonicity(const analytic::CylinderMode& mode, double L, double h, Stencil stencil,
                                     double min_grad_sq) {
  if (!(L > 0.0) || !(h > 0.0)) throw std::invalid_argument("delta_f_harmonicity: L and h must be positive");
  auto grad_sq = [&](double t, double th) {
    const auto g = analytic::cylinder_eigenfunction_gradient(mode, L, t, th);
    return g.dt * g.dt + g.dtheta * g.dtheta;
  };
  auto f = [&](double t, double th) { return std::log(grad_sq(t, th)); };
  auto accept = [&](double t, double th) { return grad_sq(t, th) >= min_grad_sq; };
  auto r = grid_laplacian("delta_f_harmonicity", f, accept, -L, L, 0.0, 2.0 * kPi, true, h, stencil);
  r.name = "delta_f:" + mode.label();
  return r;
}

IdentityResidual delta_f_disk(double a, double h, Stencil stencil) {
  // u = r cos(theta) = x, so |grad u|^2 = 1 everywhere.
  auto f = [](double, double) { return std::log(1.0); };
  auto accept = [&](double x, double y) { return std::hypot(x, y) < a - 2.0 * h; };
  auto r = grid_laplacian("delta_f:disk-r-cos", f, accept, -a, a, -a, a, false, h, stencil);
  r.skipped = 0;
  return r;
}

IdentityResidual prop_boundary_check(const OsiDescriptor& descriptor, int samples) {
  IdentityResidual r;
  r.sample_count = samples;
  const double dn = 1e-5;
  if (const auto* disk = std::get_if<DiskMode1>(&descriptor)) {
    const double a = disk->radius;
    const double sigma1 = analytic::disk_spectrum(a, 1).entries[1].value;
    const double kappa = 1.0 / a;
    // |grad(x)|^2 = 1 for u = r cos(theta).
    auto f = [](Point2) { return std::log(1.0); };
    r.name = "prop_boundary:disk";
    for (int i = 0; i < samples; ++i) {
      const double th = 2.0 * kPi * i / samples;
      const Point2 n{std::cos(th), std::sin(th)};
      const Point2 out{(a + dn) * n.x, (a + dn) * n.y};
      const Point2 in{(a - dn) * n.x, (a - dn) * n.y};
      const double dfdn = (f(out) - f(in)) / (2.0 * dn);
      r.max_abs_residual = std::max(r.max_abs_residual, std::abs(0.5 * dfdn - (sigma1 - kappa)));
    }
  } else {
    const double L = std::get<CylinderLinear>(descriptor).half_length;
    const analytic::CylinderMode linear = analytic::CylinderMode::parse("linear-t");
    auto f = [&](double t, double th) {
      const auto g = analytic::cylinder_eigenfunction_gradient(linear, L, t, th);
      return std::log(g.dt * g.dt + g.dtheta * g.dtheta);
    };
    const double kappa = 0.0;  // t = +-L are geodesics of the flat cylinder
    r.name = "prop_boundary:cylinder-linear";
    for (int i = 0; i < samples; ++i) {
      const double th = 2.0 * kPi * i / samples;
      for (double side : {-1.0, 1.0}) {
        const double t = side * L;
        const double dfdn = side * (f(t + dn, th) - f(t - dn, th)) / (2.0 * dn);
        r.max_abs_residual = std::max(r.max_abs_residual, std::abs(0.5 * dfdn + kappa));
      }
    }
    r.sample_count = 2 * samples;
  }
  return r;
}

namespace {

template <typename Value>
double midpoint_integral(const geometry::Mesh& mesh, const geometry::ConformalChart& chart, Value&& value) {
  double total = 0.0;
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    const auto p = mesh.triangle_coords(t);
    const double area = mesh.signed_area(t);
    double acc = 0.0;
    for (int e = 0; e < 3; ++e) {
      const int a = e;
      const int b = (e + 1) % 3;
      const Point2 mid{0.5 * (p[a].x + p[b].x), 0.5 * (p[a].y + p[b].y)};
      const double w = chart.log_factor(mid);
      acc += value(t, a, b, mid) * std::exp(2.0 * w);
    }
    total += area * acc / 3.0;
  }
  return total;
}

}  // namespace

double mean_value(const geometry::Mesh& mesh, const geometry::ConformalChart& chart, const Eigen::VectorXd& nodal) {
  return midpoint_integral(mesh, chart, [&](int t, int a, int b, Point2) {
    const auto& tri = mesh.triangles[t];
    return 0.5 * (nodal[tri[a]] + nodal[tri[b]]);
  });
}

double mean_value(const EigenSolution& eig, const geometry::ConformalChart& chart) {
  return mean_value(*eig.mesh, chart, eig.nodal_values());
}

double mean_value(const geometry::Mesh& mesh, const geometry::ConformalChart& chart,
                  const std::function<double(Point2)>& closed_form) {
  return midpoint_integral(mesh, chart, [&](int, int, int, Point2 mid) { return closed_form(mid); });
}

double boundary_orthogonality(const std::vector<EigenSolution>& solutions, const Eigen::MatrixXd& boundary_mass) {
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(boundary_mass.rows());
  const Eigen::VectorXd weights = boundary_mass * ones;
  double worst = 0.0;
  for (std::size_t k = 1; k < solutions.size(); ++k) worst = std::max(worst, std::abs(weights.dot(solutions[k].boundary_values)));
  return worst;
}

SolvabilityReport run_full_report(const DomainSpec& spec, int resolution, const Thresholds& thresholds,
                                  const fem::SolverConfig& config) {
  spec.validate();
  SolvabilityReport rep;
  rep.domain = spec;
  rep.resolution = resolution;
  rep.thresholds = thresholds;

  auto build = geometry::make_mesh(spec, resolution);
  const fem::SteklovProblem problem(build.mesh);
  const auto solutions = problem.solve(kReportEigenCount, config);
  for (const auto& s : solutions) rep.eigenvalues.push_back(s.sigma);

  const auto groups = fem::cluster_indices(rep.eigenvalues, config.cluster_gap);
  if (groups.size() < 2 || groups[0].size() != 1) throw fem::SolverError("could not isolate sigma_0 from sigma_1");
  std::vector<EigenSolution> cluster;
  for (int i : groups[1]) cluster.push_back(solutions[i]);
  rep.sigma1_multiplicity = static_cast<int>(cluster.size());
  for (const auto& c : cluster) rep.sigma1 += c.sigma;
  rep.sigma1 /= static_cast<double>(cluster.size());
  if (const auto exact = analytic::analytic_spectrum(spec, 4)) rep.sigma1_analytic = exact->entries.at(1).value;

  for (const auto& c : cluster) rep.gradient_stats.push_back(gradient_constancy(c));
  rep.scan = eigenspace_scan(cluster, thresholds);
  const EigenSolution witness = combine(cluster, rep.scan.coefficients);

  rep.trace_check = trace_constant_values(witness, thresholds.tau_const, thresholds.tau_const);
  for (const auto& comp : rep.trace_check.components) {
    rep.trace_constant.push_back(comp.is_constant);
    rep.delta_flags.push_back(!comp.is_constant);
  }

  rep.component_lengths = problem.mesh().component_lengths;
  for (double l : rep.component_lengths) rep.boundary_length += l;
  if (spec.simply_connected()) rep.weinstock_product = weinstock_product(rep.sigma1, rep.boundary_length);
  rep.topology = geometry::topology_of(problem.mesh());

  rep.verdict_numeric = rep.scan.best_cv <= thresholds.tau_solv;
  rep.verdict_analytic = analytic::solvability_verdict(spec);
  if (rep.verdict_analytic.equivalence_class == analytic::EquivalenceClass::CylinderType) {
    rep.threshold_zone =
        std::abs(rep.verdict_analytic.cylinder_length - analytic::critical_length()) <= thresholds.threshold_blur;
  }
  rep.verdicts_agree = rep.verdict_numeric == rep.verdict_analytic.solvable;

  if (rep.verdict_numeric) {
    rep.gauss_bonnet = gauss_bonnet_identity(rep.sigma1, rep.delta_flags, rep.component_lengths,
                                             rep.topology.euler_char, resolution);
  }
  for (std::size_t k = 1; k < solutions.size(); ++k) rep.mean_values.push_back(mean_value(solutions[k], build.chart));
  rep.boundary_orthogonality = boundary_orthogonality(solutions, problem.boundary_mass());
  return rep;
}

}  // namespace steklov::diagnostics
