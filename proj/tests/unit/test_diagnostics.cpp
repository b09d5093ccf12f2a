#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "steklov/diagnostics.hpp"

using namespace steklov;
using namespace steklov::diagnostics;
using geometry::DomainSpec;

namespace {

std::vector<fem::EigenSolution> solve(const DomainSpec& spec, int n, int count) {
  return fem::SteklovProblem(geometry::make_mesh(spec, n).mesh).solve(count);
}

}  // namespace

TEST_CASE("sample statistics") {
  const auto s = sample_stats({1.0, 2.0, 3.0});
  CHECK(s.mean == doctest::Approx(2.0));
  CHECK(s.min == 1.0);
  CHECK(s.max == 3.0);
  CHECK(s.cv == doctest::Approx(std::sqrt(2.0 / 3.0) / 2.0));
  CHECK(sample_stats({4.0, 4.0, 4.0}).cv == 0.0);
  CHECK(worst_cv({sample_stats({1, 1}), sample_stats({1, 3})}) == doctest::Approx(0.5));
}

TEST_CASE("gradient constancy of first eigenfunctions") {
  SUBCASE("unit disk") {
    const auto sols = solve(DomainSpec::flat_disk(1.0), 32, 3);
    CHECK(worst_cv(gradient_constancy(sols[1])) <= 1e-2);
    CHECK(worst_cv(gradient_constancy(sols[2])) <= 1e-2);
  }
  SUBCASE("cylinder L = 2") {
    const auto sols = solve(DomainSpec::flat_cylinder(2.0), 32, 2);
    const auto stats = gradient_constancy(sols[1]);
    REQUIRE(stats.size() == 2);
    CHECK(worst_cv(stats) <= 1e-2);
  }
  SUBCASE("zero mode is rejected") {
    const auto sols = solve(DomainSpec::flat_disk(1.0), 8, 2);
    CHECK_THROWS_AS(gradient_constancy(fem::EigenSolution{0.0, {}, {}, {}, nullptr, nullptr}), std::invalid_argument);
    fem::EigenSolution zero = sols[1];
    zero.boundary_values.setZero();
    zero.interior_values.setZero();
    CHECK_THROWS_AS(gradient_constancy(zero), fem::SolverError);
  }
}

TEST_CASE("eigenspace scan") {
  SUBCASE("cylinder L = 0.5, two-dimensional cosh space") {
    const auto sols = solve(DomainSpec::flat_cylinder(0.5), 32, 3);
    const auto scan = eigenspace_scan({sols[1], sols[2]});
    // Every combination is a rotation of cos(theta) cosh(t).
    const double tanh_l = oracle::tanh_series(0.5);
    const double lo = tanh_l;          // |grad| where cos vanishes
    const double hi = 1.0;             // relative scale where sin vanishes
    double sum = 0.0;
    double sum_sq = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
      const double th = 2.0 * oracle::kPi * (i + 0.5) / n;
      const double g = std::sqrt(hi * hi * std::cos(th) * std::cos(th) + lo * lo * std::sin(th) * std::sin(th));
      sum += g;
      sum_sq += g * g;
    }
    const double mean = sum / n;
    const double cv = std::sqrt(sum_sq / n - mean * mean) / mean;
    CHECK(cv == doctest::Approx(0.248256).epsilon(1e-5));
    CHECK(std::abs(scan.best_cv - cv) <= 5e-3);
    CHECK(scan.worst_scanned_cv >= scan.best_cv);
    CHECK(scan.coefficients.size() == 2);
    CHECK(std::hypot(scan.coefficients[0], scan.coefficients[1]) == doctest::Approx(1.0));
  }
  SUBCASE("cylinder at the critical length, three-dimensional space") {
    const double L0 = analytic::critical_length();
    const auto sols = solve(DomainSpec::flat_cylinder(L0), 32, 4);
    const auto scan = eigenspace_scan({sols[1], sols[2], sols[3]});
    CHECK(scan.best_cv <= 1e-2);
    CHECK(scan.evaluations >= 1000);
  }
  SUBCASE("cluster size above three is rejected") {
    const auto sols = solve(DomainSpec::flat_disk(1.0), 8, 5);
    CHECK_THROWS_AS(eigenspace_scan({sols[1], sols[2], sols[3], sols[4]}), std::invalid_argument);
  }
  SUBCASE("combination size mismatch") {
    const auto sols = solve(DomainSpec::flat_disk(1.0), 8, 3);
    CHECK_THROWS_AS(combine({sols[1], sols[2]}, {1.0}), std::invalid_argument);
    const auto c = combine({sols[1], sols[2]}, {0.6, 0.8});
    CHECK(c.sigma == doctest::Approx(0.36 * sols[1].sigma + 0.64 * sols[2].sigma));
  }
}

TEST_CASE("Weinstock product") {
  CHECK(weinstock_product(1.0, 2.0 * oracle::kPi) == doctest::Approx(2.0 * oracle::kPi));
  const auto disk = run_full_report(DomainSpec::flat_disk(1.0), 32);
  REQUIRE(disk.weinstock_product.has_value());
  CHECK(std::abs(*disk.weinstock_product - 2.0 * oracle::kPi) <= 0.01 * 2.0 * oracle::kPi);
  const auto cap = run_full_report(DomainSpec::spherical_cap(1.0), 32);
  REQUIRE(cap.weinstock_product.has_value());
  CHECK(std::abs(*cap.weinstock_product - 2.0 * oracle::kPi) <= 0.01 * 2.0 * oracle::kPi);
  const auto bumpy = run_full_report(DomainSpec::perturbed_disk(0.1, 2), 32);
  CHECK(*bumpy.weinstock_product < 2.0 * oracle::kPi - 0.01);
  // Two boundary components: not a simply connected domain.
  CHECK_FALSE(run_full_report(DomainSpec::flat_cylinder(2.0), 16).weinstock_product.has_value());
}

TEST_CASE("boundary bookkeeping") {
  const double two_pi = 2.0 * oracle::kPi;
  CHECK(gauss_bonnet_identity(1.0, {true}, {two_pi}, 1).max_abs_residual == doctest::Approx(0.0));
  CHECK(gauss_bonnet_identity(0.5, {false, false}, {two_pi, two_pi}, 0).max_abs_residual == 0.0);
  CHECK(gauss_bonnet_identity(0.5, {true, false}, {two_pi, two_pi}, 0).max_abs_residual ==
        doctest::Approx(oracle::kPi));
  CHECK_THROWS(gauss_bonnet_identity(1.0, {true, true}, {1.0}, 0));
}

TEST_CASE("trace constants on the cylinder L = 2") {
  const auto sols = solve(DomainSpec::flat_cylinder(2.0), 32, 2);
  const auto tc = trace_constant_values(sols[1], 1e-3, 1e-6);
  REQUIRE(tc.applicable);
  CHECK(tc.all_constant);
  REQUIRE(tc.components.size() == 2);
  const double c = 1.0 / std::sqrt(4.0 * oracle::kPi);
  CHECK(c == doctest::Approx(0.2820948).epsilon(1e-7));
  for (const auto& comp : tc.components) CHECK(std::abs(std::abs(comp.value) - c) <= 1e-9);
  CHECK(tc.components[0].value * tc.components[1].value < 0.0);
  CHECK(sols[1].sigma * c == doctest::Approx(0.141047).epsilon(1e-5));
  CHECK(tc.sum_residual <= 1e-9);
  CHECK(tc.consistent);

  const auto disk = solve(DomainSpec::flat_disk(1.0), 8, 2);
  CHECK_FALSE(trace_constant_values(disk[1], 1e-3, 1e-6).applicable);
}

TEST_CASE("log-gradient harmonicity") {
  const double h = 1.0 / 64.0;
  SUBCASE("linear mode: f is constant") {
    const auto mode = analytic::CylinderMode::parse("linear-t");
    CHECK(delta_f_harmonicity(mode, 2.0, h, Stencil::FivePoint).max_abs_residual <= 1e-10);
  }
  SUBCASE("cosh mode at L = 0.8") {
    const auto mode = analytic::CylinderMode::parse("k1-cosh-cos");
    const auto nine = delta_f_harmonicity(mode, 0.8, h, Stencil::NinePoint);
    const auto five = delta_f_harmonicity(mode, 0.8, h, Stencil::FivePoint);
    CHECK(nine.max_abs_residual <= 1e-2);
    CHECK(nine.sample_count > 1000);
    CHECK(nine.skipped > 0);
    // The five-point value is dominated by truncation error near the zeros of
    // |grad u|; it only has to be finite and larger.
    CHECK(std::isfinite(five.max_abs_residual));
    CHECK(five.max_abs_residual > nine.max_abs_residual);
    const auto half = delta_f_harmonicity(mode, 0.8, 2.0 * h, Stencil::NinePoint);
    CHECK(half.max_abs_residual > nine.max_abs_residual);
  }
  SUBCASE("disk") {
    CHECK(delta_f_disk(1.0, h, Stencil::NinePoint).max_abs_residual <= 1e-10);
    CHECK(delta_f_disk(2.0, h, Stencil::FivePoint).max_abs_residual <= 1e-10);
  }
}

TEST_CASE("boundary identities for closed forms") {
  CHECK(prop_boundary_check(DiskMode1{1.0}).max_abs_residual <= 1e-12);
  CHECK(prop_boundary_check(DiskMode1{2.0}).max_abs_residual <= 1e-12);
  const auto cyl = prop_boundary_check(CylinderLinear{1.5}, 32);
  CHECK(cyl.max_abs_residual <= 1e-12);
  CHECK(cyl.sample_count >= 32);
}

TEST_CASE("mean values") {
  const auto build = geometry::make_mesh(DomainSpec::flat_disk(1.0), 16);
  const auto area = mean_value(build.mesh, build.chart, [](geometry::Point2) { return 1.0; });
  // The polygon area converges to pi.
  CHECK(std::abs(area - oracle::kPi) <= 2e-2);
  const auto x = mean_value(build.mesh, build.chart, [](geometry::Point2 p) { return p.x; });
  CHECK(std::abs(x) <= 1e-12);

  const auto cap = geometry::make_mesh(DomainSpec::spherical_cap(1.0), 24);
  const double cap_area = mean_value(cap.mesh, cap.chart, [](geometry::Point2) { return 1.0; });
  CHECK(std::abs(cap_area - 2.0 * oracle::kPi * (1.0 - std::cos(1.0))) <= 1e-2);

  const auto sols = fem::SteklovProblem(build.mesh).solve(5);
  for (int k = 1; k < 5; ++k) CHECK(std::abs(mean_value(sols[k], build.chart)) <= 1e-9);
  CHECK(boundary_orthogonality(sols, fem::SteklovProblem(build.mesh).boundary_mass()) <= 1e-8);
}

TEST_CASE("full reports") {
  SUBCASE("unit disk") {
    const auto r = run_full_report(DomainSpec::flat_disk(1.0), 32);
    CHECK(r.eigenvalues.size() == static_cast<std::size_t>(kReportEigenCount));
    CHECK(r.sigma1_multiplicity == 2);
    CHECK(r.sigma1 == doctest::Approx(1.0).epsilon(1e-2));
    REQUIRE(r.sigma1_analytic.has_value());
    CHECK(*r.sigma1_analytic == 1.0);
    CHECK(r.verdict_numeric);
    CHECK(r.verdict_analytic.solvable);
    CHECK(r.verdicts_agree);
    CHECK(r.topology.euler_char == 1);
    CHECK(r.delta_flags == std::vector<bool>{true});
    REQUIRE(r.gauss_bonnet.has_value());
    CHECK(r.gauss_bonnet->max_abs_residual <= 0.05 * 2.0 * oracle::kPi);
    CHECK(r.boundary_orthogonality <= 1e-8);
  }
  SUBCASE("subcritical cylinder L = 0.8") {
    const auto r = run_full_report(DomainSpec::flat_cylinder(0.8), 32);
    CHECK_FALSE(r.verdict_numeric);
    CHECK_FALSE(r.verdict_analytic.solvable);
    CHECK(r.verdicts_agree);
    CHECK(r.sigma1_multiplicity == 2);
    CHECK(r.scan.best_cv > r.thresholds.tau_solv);
    CHECK(std::abs(r.scan.best_cv - 0.1408) <= 5e-3);
    CHECK_FALSE(r.gauss_bonnet.has_value());
    CHECK(r.topology.boundary_count == 2);
  }
  SUBCASE("band R = 1.3 versus the cylinder of the same conformal class") {
    const double R = 1.3;
    const double L = geometry::band_cylinder_map(R);
    const auto band = run_full_report(DomainSpec::spherical_band(R), 24);
    const auto cyl = run_full_report(DomainSpec::flat_cylinder(L), 24);
    CHECK(band.verdict_numeric);
    CHECK(band.verdicts_agree);
    CHECK(band.delta_flags == std::vector<bool>{false, false});
    REQUIRE(band.gauss_bonnet.has_value());
    CHECK(band.gauss_bonnet->max_abs_residual <= 1e-12);
    CHECK(band.trace_check.consistent);
    const double cosh_l = std::cosh(L);
    for (std::size_t k = 1; k < band.eigenvalues.size(); ++k) {
      CHECK(std::abs(band.eigenvalues[k] - cosh_l * cyl.eigenvalues[k]) <= 1e-8 * cyl.eigenvalues[k]);
    }
    CHECK(std::abs(band.scan.best_cv - cyl.scan.best_cv) <= 1e-8);
  }
  SUBCASE("perturbed disk") {
    const auto r = run_full_report(DomainSpec::perturbed_disk(0.2, 3), 24);
    CHECK_FALSE(r.verdict_numeric);
    CHECK_FALSE(r.verdict_analytic.solvable);
    CHECK_FALSE(r.sigma1_analytic.has_value());
    CHECK(r.verdicts_agree);
  }
  SUBCASE("threshold zone") {
    const auto r = run_full_report(DomainSpec::flat_cylinder(1.2), 16);
    CHECK(r.threshold_zone);
    CHECK(std::abs(1.2 - analytic::critical_length()) <= r.thresholds.threshold_blur);
  }
}
