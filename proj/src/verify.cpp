#include "steklov/verify.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "steklov/analytic.hpp"
#include "steklov/parallel.hpp"
#include "steklov/serialize.hpp"
#include "steklov/solver.hpp"

namespace steklov::verify {

using geometry::DomainSpec;
using geometry::kPi;

Fault fault_from_string(const std::string& name) {
  if (name == "none") return Fault::None;
  if (name == "mass-unscaled") return Fault::MassUnscaled;
  throw std::invalid_argument("unknown fault '" + name + "'");
}

std::string to_string(Fault fault) {
  return fault == Fault::MassUnscaled ? "mass-unscaled" : "none";
}

int Summary::passed() const {
  int n = 0;
  for (const auto& c : checks) n += c.passed && !c.skipped;
  return n;
}

int Summary::failed() const {
  int n = 0;
  for (const auto& c : checks) n += !c.passed && !c.skipped;
  return n;
}

int Summary::skipped() const {
  int n = 0;
  for (const auto& c : checks) n += c.skipped;
  return n;
}

namespace {

std::string fmt(const char* pattern, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

class Recorder {
 public:
  explicit Recorder(std::vector<Check>& out) : out_(out) {}

  void at_most(const std::string& suite, const std::string& name, double value, double tol, std::string note = {}) {
    out_.push_back({suite, name, std::isfinite(value) && value <= tol, false, value, tol, std::move(note)});
  }
  void at_least(const std::string& suite, const std::string& name, double value, double tol, std::string note = {}) {
    out_.push_back({suite, name, std::isfinite(value) && value >= tol, false, value, tol, std::move(note)});
  }
  void within(const std::string& suite, const std::string& name, double value, double lo, double hi) {
    out_.push_back({suite, name, value >= lo && value <= hi, false, value, hi, fmt("range [%g, ", lo) + fmt("%g]", hi)});
  }
  void truth(const std::string& suite, const std::string& name, bool ok, std::string note = {}) {
    out_.push_back({suite, name, ok, false, ok ? 1.0 : 0.0, 1.0, std::move(note)});
  }
  void skip(const std::string& suite, const std::string& name, std::string note) {
    out_.push_back({suite, name, true, true, 0.0, 0.0, std::move(note)});
  }
  // Runs a block and records an exception as a failed check.
  template <typename F>
  void guarded(const std::string& suite, F&& block) {
    try {
      block();
    } catch (const std::exception& e) {
      out_.push_back({suite, "exception", false, false, 0.0, 0.0, e.what()});
    }
  }

 private:
  std::vector<Check>& out_;
};

std::vector<double> fem_sigmas(const geometry::Mesh& mesh, int count) {
  const fem::SteklovProblem problem(mesh);
  std::vector<double> out;
  for (const auto& s : problem.solve(count)) out.push_back(s.sigma);
  return out;
}

double max_relative(const std::vector<double>& a, const std::vector<double>& b, double factor, int from = 1) {
  double worst = 0.0;
  for (std::size_t k = from; k < a.size() && k < b.size(); ++k) {
    worst = std::max(worst, std::abs(a[k] - factor * b[k]) / std::abs(factor * b[k]));
  }
  return worst;
}

// Closed-form CV of |grad u| on t = L for u = cos(theta) cosh(t).
double subcritical_cv(double L) {
  const int n = 4096;
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) {
    const double th = 2.0 * kPi * i / n;
    g[i] = std::sqrt(analytic::subcritical_Q(th, L, 1.0, 0.0));
  }
  return diagnostics::sample_stats(g).cv;
}

void constants_suite(Recorder& rec) {
  rec.guarded("constants", [&] {
    const double L0 = analytic::critical_length();
    const double R0 = analytic::critical_band_radius();
    rec.at_most("constants", "L0 tanh L0 = 1", std::abs(L0 * std::tanh(L0) - 1.0), 1e-12);
    rec.at_most("constants", "R0 = 2 atan tanh(L0/2)", std::abs(R0 - 2.0 * std::atan(std::tanh(L0 / 2.0))), 1e-12);
    rec.at_most("constants", "L0 near 1.19968", std::abs(L0 - 1.19968), 1e-4);
    rec.at_most("constants", "R0 near 0.9857", std::abs(R0 - 0.9857), 1e-3);
  });
}

void geometry_suite(Recorder& rec) {
  rec.guarded("geometry", [&] {
    for (double R : {0.7, 1.2, 1.4}) {
      const double back = geometry::cylinder_band_map(geometry::band_cylinder_map(R));
      rec.at_most("geometry", fmt("band map round trip R=%g", R), std::abs(back - R), 1e-12);
    }
    for (const auto& spec : {DomainSpec::spherical_cap(kPi / 3), DomainSpec::hyperbolic_disk(1.0),
                             DomainSpec::spherical_band(1.2)}) {
      const auto chart = geometry::chart_for(spec);
      rec.at_most("geometry", "curvature of " + spec.describe(), geometry::curvature_residual(chart, 1e-3), 1e-4);
    }
    const auto disk = geometry::make_mesh(DomainSpec::flat_disk(1.0), 8).mesh;
    const auto cyl = geometry::make_mesh(DomainSpec::flat_cylinder(1.0), 8).mesh;
    rec.truth("geometry", "disk euler characteristic 1", geometry::topology_of(disk).euler_char == 1);
    rec.truth("geometry", "cylinder euler characteristic 0", geometry::topology_of(cyl).euler_char == 0);
  });
}

void analytic_suite(Recorder& rec) {
  rec.guarded("analytic", [&] {
    const auto s2 = analytic::sigma1_cylinder(2.0);
    rec.truth("analytic", "cylinder L=2 sigma1 = 0.5 simple", std::abs(s2.value - 0.5) <= 1e-12 && s2.multiplicity == 1);
    const auto s05 = analytic::sigma1_cylinder(0.5);
    rec.truth("analytic", "cylinder L=0.5 sigma1 = tanh 0.5 double",
              std::abs(s05.value - std::tanh(0.5)) <= 1e-12 && s05.multiplicity == 2);
    rec.truth("analytic", "cylinder L=L0 triple", analytic::sigma1_cylinder(analytic::critical_length()).multiplicity == 3);
    const double L0 = analytic::critical_length();
    rec.truth("analytic", "verdict flips at L0",
              analytic::solvability_verdict(DomainSpec::flat_cylinder(L0 + 0.05)).solvable &&
                  !analytic::solvability_verdict(DomainSpec::flat_cylinder(L0 - 0.05)).solvable);
    const auto disk = analytic::disk_spectrum(1.0, 3);
    const auto cap = *analytic::analytic_spectrum(DomainSpec::spherical_cap(kPi / 3), 3);
    rec.at_most("analytic", "cap sigma1 = 1/sin R", std::abs(cap.entries[1].value - 1.0 / std::sin(kPi / 3)), 1e-12);
    rec.truth("analytic", "disk multiplicities 1,2,2,2",
              disk.entries[0].multiplicity == 1 && disk.entries[1].multiplicity == 2 && disk.entries[3].multiplicity == 2);
  });
}

void solver_suite(Recorder& rec, const Options& opt) {
  const int n = opt.resolution;
  rec.guarded("solver", [&] {
    const auto disk = geometry::make_mesh(DomainSpec::flat_disk(1.0), n);
    const fem::SteklovProblem problem(disk.mesh);
    const auto sols = problem.solve(11);
    for (int k = 1; k <= 5; ++k) {
      const std::string name = fmt("disk sigma = %g within 1%%", static_cast<double>(k));
      if (n < kReferenceResolution) {
        rec.skip("solver", name, "resolution too low for the reference tolerance");
        continue;
      }
      // sigma_{2k-1} and sigma_{2k} both approximate k.
      const double err = std::max(std::abs(sols[2 * k - 1].sigma - k), std::abs(sols[2 * k].sigma - k));
      rec.at_most("solver", name, err, 0.01 * k);
    }
    rec.at_most("solver", "boundary orthogonality (disk)",
                diagnostics::boundary_orthogonality(sols, problem.boundary_mass()), 1e-8);

    const auto cyl = fem_sigmas(geometry::make_mesh(DomainSpec::flat_cylinder(2.0), n).mesh, 3);
    if (n < kReferenceResolution) {
      rec.skip("solver", "cylinder L=2 sigma1 = 0.5", "resolution too low for the reference tolerance");
    } else {
      rec.at_most("solver", "cylinder L=2 sigma1 = 0.5", std::abs(cyl[1] - 0.5), 0.005);
    }

    if (n < kMinConvergenceResolution) {
      rec.skip("solver", "convergence order (disk)", "resolution too low");
    } else {
      const auto coarse = fem_sigmas(geometry::make_mesh(DomainSpec::flat_disk(1.0), n / 2).mesh, 2);
      const double order = std::log2(std::abs(coarse[1] - 1.0) / std::abs(sols[1].sigma - 1.0));
      rec.within("solver", "convergence order (disk)", order, 1.5, 2.5);
    }
  });

  rec.guarded("solver", [&] {
    const auto base = geometry::make_mesh(DomainSpec::flat_disk(1.0), n).mesh;
    const double c = 2.5;
    geometry::Mesh scaled = base.with_scaled_weights(c);
    if (opt.fault == Fault::MassUnscaled) scaled.boundary_weights = base.boundary_weights;
    const auto a = fem_sigmas(base, 8);
    const auto b = fem_sigmas(scaled, 8);
    rec.at_most("solver", "conformal scaling c=2.5", max_relative(b, a, 1.0 / c), 1e-12,
                opt.fault == Fault::MassUnscaled ? "fault injected: mass-unscaled" : "");
  });

  rec.guarded("solver", [&] {
    const double R = 1.2;
    const double L = geometry::band_cylinder_map(R);
    const auto band = fem_sigmas(geometry::make_mesh(DomainSpec::spherical_band(R), n).mesh, 8);
    const auto cyl = fem_sigmas(geometry::make_mesh(DomainSpec::flat_cylinder(L), n).mesh, 8);
    rec.at_most("solver", "band = cosh L x cylinder", max_relative(band, cyl, std::cosh(L)), 1e-8);
  });
}

struct ReportJob {
  DomainSpec spec;
  std::optional<diagnostics::SolvabilityReport> report;
  std::string error;
};

std::vector<ReportJob> run_reports(std::vector<DomainSpec> specs, const Options& opt) {
  std::vector<ReportJob> jobs;
  for (auto& s : specs) jobs.push_back({s, std::nullopt, {}});
  parallel_for(
      static_cast<int>(jobs.size()),
      [&](int i) {
        try {
          jobs[i].report = diagnostics::run_full_report(jobs[i].spec, opt.resolution, opt.thresholds);
        } catch (const std::exception& e) {
          jobs[i].error = e.what();
        }
      },
      1);
  return jobs;
}

void diagnostics_suite(Recorder& rec, const Options& opt) {
  const double two_pi = 2.0 * kPi;
  const std::vector<DomainSpec> verdict_domains = {
      DomainSpec::flat_disk(1.0),          DomainSpec::spherical_cap(kPi / 3), DomainSpec::hyperbolic_disk(1.0),
      DomainSpec::flat_cylinder(0.5),      DomainSpec::flat_cylinder(0.8),     DomainSpec::flat_cylinder(1.5),
      DomainSpec::flat_cylinder(2.0),      DomainSpec::spherical_band(0.7),    DomainSpec::spherical_band(1.3),
      DomainSpec::perturbed_disk(0.1, 2),  DomainSpec::perturbed_disk(0.2, 3), DomainSpec::flat_disk(2.0),
  };
  const auto jobs = run_reports(verdict_domains, opt);
  for (const auto& job : jobs) {
    const std::string name = job.spec.describe();
    if (!job.report) {
      rec.truth("diagnostics", "report " + name, false, job.error);
      continue;
    }
    const auto& r = *job.report;
    rec.truth("diagnostics", "verdicts agree on " + name, r.verdicts_agree || r.threshold_zone,
              r.verdict_numeric ? "solvable" : "unsolvable");
    if (!job.spec.simply_connected() && r.verdict_numeric) {
      rec.at_most("diagnostics", "gauss-bonnet both sides zero on " + name, r.gauss_bonnet->max_abs_residual, 0.0);
      rec.truth("diagnostics", "constant traces c1 = -c2 on " + name, r.trace_check.consistent);
    }
    switch (job.spec.kind) {
      case geometry::DomainKind::FlatDisk:
      case geometry::DomainKind::SphericalCap:
      case geometry::DomainKind::HyperbolicDisk:
        rec.at_most("diagnostics", "gradient CV on " + name, r.scan.best_cv, opt.thresholds.tau_solv);
        rec.at_most("diagnostics", "weinstock equality on " + name, std::abs(*r.weinstock_product - two_pi),
                    0.01 * two_pi);
        rec.at_most("diagnostics", "gauss-bonnet on " + name, r.gauss_bonnet->max_abs_residual, 0.05 * two_pi);
        break;
      case geometry::DomainKind::PerturbedDisk:
        rec.truth("diagnostics", "unsolvable " + name, !r.verdict_numeric);
        break;
      case geometry::DomainKind::FlatCylinder:
        if (job.spec.half_length < analytic::critical_length()) {
          const double exact = subcritical_cv(job.spec.half_length);
          rec.at_least("diagnostics", "subcritical scan CV above tau_solv on " + name, r.scan.best_cv,
                       opt.thresholds.tau_solv);
          rec.at_most("diagnostics", "subcritical scan CV matches closed form on " + name,
                      std::abs(r.scan.best_cv - exact), 5e-3, fmt("closed form %.6f", exact));
        }
        break;
      default:
        break;
    }
    rec.at_most("diagnostics", "boundary orthogonality on " + name, r.boundary_orthogonality, 1e-8);
  }

  // Metric scaling by c^2 leaves the scale-free quantities alone.
  const auto& unit = *jobs[0].report;
  const auto& twice = *jobs.back().report;
  double drift = std::abs(*unit.weinstock_product - *twice.weinstock_product);
  for (std::size_t i = 0; i < unit.gradient_stats.size(); ++i) {
    for (std::size_t c = 0; c < unit.gradient_stats[i].size(); ++c) {
      drift = std::max(drift, std::abs(unit.gradient_stats[i][c].cv - twice.gradient_stats[i][c].cv));
    }
  }
  rec.at_most("diagnostics", "scale invariance (disk radius 1 vs 2)", drift, 1e-10);
  rec.truth("diagnostics", "scale invariance of flags and verdict",
            unit.delta_flags == twice.delta_flags && unit.verdict_numeric == twice.verdict_numeric);

  // Weinstock sweep over perturbed disks.
  std::vector<DomainSpec> sweep;
  for (double eps : {0.0, 0.05, 0.1, 0.2}) {
    for (int m : {2, 3, 4}) sweep.push_back(DomainSpec::perturbed_disk(eps, m));
  }
  rec.guarded("diagnostics", [&] {
    std::vector<double> products(sweep.size());
    parallel_for(
        static_cast<int>(sweep.size()),
        [&](int i) {
          const auto mesh = geometry::make_mesh(sweep[i], opt.resolution).mesh;
          const auto s = fem_sigmas(mesh, 2);
          products[i] = diagnostics::weinstock_product(s[1], mesh.component_lengths[0]);
        },
        1);
    for (std::size_t i = 0; i < sweep.size(); ++i) {
      const std::string name = sweep[i].describe();
      rec.at_most("diagnostics", "weinstock upper bound on " + name, products[i] - two_pi, 0.01);
      if (sweep[i].perturb_eps == 0.0) {
        rec.at_most("diagnostics", "weinstock equality on " + name, std::abs(products[i] - two_pi), 0.01 * two_pi);
      } else {
        rec.at_most("diagnostics", "weinstock strict on " + name, products[i] - two_pi, -0.01);
      }
    }
  });

  rec.guarded("diagnostics", [&] {
    using analytic::CylinderMode;
    const double h = 1.0 / 64.0;
    const auto nine = diagnostics::delta_f_harmonicity(CylinderMode::parse("k1-cosh-cos"), 1.0, h,
                                                       diagnostics::Stencil::NinePoint);
    const auto five = diagnostics::delta_f_harmonicity(CylinderMode::parse("k1-cosh-cos"), 1.0, h,
                                                       diagnostics::Stencil::FivePoint);
    rec.at_most("diagnostics", "half laplacian of log|grad u|^2, cosh mode", nine.max_abs_residual, 1e-2,
                "compact stencil; five-point gives " + fmt("%.3g", five.max_abs_residual));
    rec.at_most("diagnostics", "half laplacian of log|grad u|^2, linear mode",
                diagnostics::delta_f_harmonicity(CylinderMode::parse("linear-t"), 1.0, h,
                                                 diagnostics::Stencil::FivePoint)
                    .max_abs_residual,
                0.0);
    rec.at_most("diagnostics", "half laplacian of log|grad u|^2, disk",
                diagnostics::delta_f_disk(1.0, h, diagnostics::Stencil::FivePoint).max_abs_residual, 0.0);
    for (double a : {1.0, 2.0}) {
      rec.at_most("diagnostics", fmt("boundary identity on disk a=%g", a),
                  diagnostics::prop_boundary_check(diagnostics::DiskMode1{a}).max_abs_residual, 0.0);
    }
    rec.at_most("diagnostics", "boundary identity on cylinder",
                diagnostics::prop_boundary_check(diagnostics::CylinderLinear{1.0}).max_abs_residual, 0.0);
  });

  rec.guarded("diagnostics", [&] {
    const auto disk = geometry::make_mesh(DomainSpec::flat_disk(1.0), opt.resolution);
    const double r_cos = diagnostics::mean_value(disk.mesh, disk.chart, [](geometry::Point2 p) { return p.x; });
    const double r2_cos2 = diagnostics::mean_value(disk.mesh, disk.chart,
                                                   [](geometry::Point2 p) { return p.x * p.x - p.y * p.y; });
    const double floor = std::max(std::abs(r_cos), std::abs(r2_cos2));
    const double tol = std::max(1e-9, 10.0 * floor);
    rec.at_most("diagnostics", "mean value of r cos(theta) on disk", std::abs(r_cos), 1e-9);
    rec.at_most("diagnostics", "mean value of r^2 cos(2 theta) on disk", std::abs(r2_cos2), 1e-9);
    const fem::SteklovProblem problem(disk.mesh);
    double worst = 0.0;
    const auto sols = problem.solve(11);
    for (std::size_t k = 1; k < sols.size(); ++k) {
      worst = std::max(worst, std::abs(diagnostics::mean_value(sols[k], disk.chart)));
    }
    rec.at_most("diagnostics", "mean values of disk eigenfunctions", worst, tol);
    const auto pert = geometry::make_mesh(DomainSpec::perturbed_disk(0.1, 2), opt.resolution);
    const auto psols = fem::SteklovProblem(pert.mesh).solve(11);
    double largest = 0.0;
    for (std::size_t k = 1; k < psols.size(); ++k) {
      largest = std::max(largest, std::abs(diagnostics::mean_value(psols[k], pert.chart)));
    }
    rec.at_least("diagnostics", "nonzero mean value on perturbed disk", largest, 10.0 * tol);
  });
}

}  // namespace

Summary run(const Options& options) {
  if (options.resolution < 4) throw std::invalid_argument("verify: resolution must be at least 4");
  Summary s;
  s.resolution = options.resolution;
  s.fault = to_string(options.fault);
  Recorder rec(s.checks);
  constants_suite(rec);
  geometry_suite(rec);
  analytic_suite(rec);
  solver_suite(rec, options);
  diagnostics_suite(rec, options);
  return s;
}

nlohmann::ordered_json summary_json(const Summary& s) {
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const auto& c : s.checks) {
    nlohmann::ordered_json j{{"suite", c.suite},
                             {"name", c.name},
                             {"status", c.skipped ? "skipped" : (c.passed ? "pass" : "fail")},
                             {"value", std::isfinite(c.value) ? nlohmann::ordered_json(io::round12(c.value)) : nullptr},
                             {"tolerance", io::round12(c.tolerance)}};
    if (!c.note.empty()) j["note"] = c.note;
    checks.push_back(std::move(j));
  }
  return {{"schema", io::kSchema},
          {"resolution", s.resolution},
          {"fault", s.fault},
          {"passed", s.passed()},
          {"failed", s.failed()},
          {"skipped", s.skipped()},
          {"ok", s.ok()},
          {"checks", std::move(checks)}};
}

std::string summary_text(const Summary& s) {
  std::ostringstream os;
  for (const auto& c : s.checks) {
    const char* status = c.skipped ? "SKIP" : (c.passed ? "PASS" : "FAIL");
    os << status << "  " << c.suite << ": " << c.name;
    if (!c.skipped) os << "  [" << io::format_real(c.value) << " vs " << io::format_real(c.tolerance) << "]";
    if (!c.note.empty()) os << "  (" << c.note << ")";
    os << '\n';
  }
  os << s.passed() << " passed, " << s.failed() << " failed, " << s.skipped() << " skipped\n";
  return os.str();
}

}  // namespace steklov::verify
