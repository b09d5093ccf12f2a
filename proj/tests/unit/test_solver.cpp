#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "steklov/analytic.hpp"
#include "steklov/geometry.hpp"
#include "steklov/solver.hpp"

using namespace steklov;
using namespace steklov::fem;
using geometry::DomainSpec;
using geometry::kPi;
using geometry::Mesh;

namespace {

Eigen::MatrixXd dense(const SymmetricSparse& a) { return Eigen::MatrixXd(a.full); }

Mesh unit_square() {
  Mesh m;
  m.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  m.triangles = {{0, 1, 2}, {0, 2, 3}};
  m.boundary_components = {{0, 1, 2, 3}};
  m.boundary_weights = {1.0};
  m.component_lengths = {4.0};
  return m;
}

}  // namespace

TEST_CASE("local stiffness of the reference triangle") {
  const Eigen::Matrix3d k = local_stiffness({{{0, 0}, {1, 0}, {0, 1}}});
  Eigen::Matrix3d expected;
  expected << 1, -0.5, -0.5, -0.5, 0.5, 0, -0.5, 0, 0.5;
  CHECK((k - expected).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK_THROWS_AS(local_stiffness({{{0, 0}, {1, 0}, {2, 0}}}), MeshQualityError);
}

TEST_CASE("stiffness of the unit square") {
  const auto a = assemble_stiffness(unit_square());
  Eigen::VectorXd x(4);
  x << 0, 1, 1, 0;
  CHECK(a.quadratic_form(x) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(a.quadratic_form(Eigen::VectorXd::Constant(4, 3.0))) <= 1e-14);
  const Eigen::MatrixXd d = dense(a);
  CHECK((d - d.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((d * Eigen::VectorXd::Ones(4)).cwiseAbs().maxCoeff() <= 1e-15);
  for (const auto& e : a.upper_entries()) CHECK(e.i <= e.j);
}

TEST_CASE("stiffness of a disk mesh is PSD with the constants as kernel") {
  const auto mesh = geometry::make_mesh(DomainSpec::flat_disk(1.0), 6).mesh;
  const Eigen::MatrixXd d = dense(assemble_stiffness(mesh));
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d);
  CHECK(std::abs(es.eigenvalues()[0]) <= 1e-12);
  CHECK(es.eigenvalues()[1] > 1e-3);
  CHECK((d * Eigen::VectorXd::Ones(d.rows())).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("boundary mass") {
  Mesh seg = unit_square();
  const Eigen::MatrixXd m = dense(assemble_boundary_mass(seg));
  CHECK(m(0, 0) == doctest::Approx(2.0 / 3.0));
  CHECK(m(0, 1) == doctest::Approx(1.0 / 6.0));
  CHECK(m(0, 2) == 0.0);
  // Single edge element matrix.
  CHECK(m(0, 1) / m(0, 0) == doctest::Approx(0.25));
  CHECK(Eigen::VectorXd::Ones(4).dot(m * Eigen::VectorXd::Ones(4)) == doctest::Approx(4.0));

  Mesh doubled = seg;
  doubled.boundary_weights = {2.0};
  CHECK((dense(assemble_boundary_mass(doubled)) - 2.0 * m).cwiseAbs().maxCoeff() <= 1e-15);

  const auto disk = geometry::make_mesh(DomainSpec::flat_disk(1.0), 8).mesh;
  const Eigen::MatrixXd md = dense(assemble_boundary_mass(disk));
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(md.rows());
  CHECK(ones.dot(md * ones) == doctest::Approx(disk.component_lengths[0]).epsilon(1e-13));
}

TEST_CASE("edge mass for a unit edge") {
  // A triangle with one boundary edge of length 1 between nodes 0 and 1 (the
  // other two edges are boundary as well, so restrict to the pair).
  Mesh tri;
  tri.vertices = {{0, 0}, {1, 0}, {0.5, 1}};
  tri.triangles = {{0, 1, 2}};
  tri.boundary_components = {{0, 1, 2}};
  tri.boundary_weights = {1.0};
  tri.component_lengths = {1.0 + 2.0 * std::hypot(0.5, 1.0)};
  const Eigen::MatrixXd m = dense(assemble_boundary_mass(tri));
  const double side = std::hypot(0.5, 1.0);
  CHECK(m(0, 1) == doctest::Approx(1.0 / 6.0));
  CHECK(m(0, 0) == doctest::Approx(1.0 / 3.0 + side / 3.0));
}

TEST_CASE("Schur complement") {
  SUBCASE("no interior nodes") {
    const auto mesh = unit_square();
    const auto a = assemble_stiffness(mesh);
    const auto part = partition_boundary(mesh);
    CHECK(part.interior.empty());
    const Eigen::MatrixXd s = schur_dtn(a, part);
    CHECK((s - restrict_dense(a, part.boundary)).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("constants in the kernel") {
    const auto mesh = geometry::make_mesh(DomainSpec::flat_cylinder(1.0), 12).mesh;
    const auto a = assemble_stiffness(mesh);
    const auto part = partition_boundary(mesh);
    const Eigen::MatrixXd s = schur_dtn(a, part);
    CHECK((s - s.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * s.cwiseAbs().maxCoeff());
    CHECK((s * Eigen::VectorXd::Ones(s.rows())).cwiseAbs().maxCoeff() <= 1e-10 * s.cwiseAbs().maxCoeff());
  }
  SUBCASE("unit disk spectrum at n = 24") {
    const auto mesh = geometry::make_mesh(DomainSpec::flat_disk(1.0), 24).mesh;
    const SteklovProblem problem(mesh);
    const auto sols = problem.solve(5);
    const double expected[] = {0, 1, 1, 2, 2};
    CHECK(std::abs(sols[0].sigma) <= 1e-9);
    for (int i = 1; i < 5; ++i) CHECK(std::abs(sols[i].sigma - expected[i]) <= 0.02 * expected[i]);
  }
}

TEST_CASE("generalized eigenproblem") {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(2, 2);
  s(1, 1) = 2.0;
  const auto pairs = solve_pencil(s, Eigen::MatrixXd::Identity(2, 2), 2);
  CHECK(pairs[0].sigma == doctest::Approx(0.0));
  CHECK(pairs[1].sigma == doctest::Approx(2.0));

  std::mt19937 rng(99);
  std::normal_distribution<double> normal;
  const int n = 30;
  Eigen::MatrixXd b(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) b(i, j) = normal(rng);
  }
  const Eigen::MatrixXd S = b * b.transpose();
  Eigen::MatrixXd c(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) c(i, j) = normal(rng);
  }
  const Eigen::MatrixXd M = c * c.transpose() + n * Eigen::MatrixXd::Identity(n, n);
  const auto got = solve_pencil(S, M, n);
  const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ref(S, M);
  for (int i = 0; i < n; ++i) {
    CHECK(got[i].sigma == doctest::Approx(ref.eigenvalues()[i]).epsilon(1e-10));
    for (int j = 0; j < n; ++j) {
      const double g = got[i].vector.dot(M * got[j].vector);
      CHECK(std::abs(g - (i == j ? 1.0 : 0.0)) <= 1e-10);
    }
  }
  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(2, 2);
  bad(1, 1) = -1.0;
  CHECK_THROWS_AS(solve_pencil(s, bad, 2), SolverError);
  CHECK_THROWS_AS(solve_pencil(s, Eigen::MatrixXd::Identity(3, 3), 2), std::invalid_argument);
}

TEST_CASE("harmonic extension") {
  SUBCASE("constant data") {
    const auto mesh = geometry::make_mesh(DomainSpec::flat_disk(1.0), 8).mesh;
    const auto a = assemble_stiffness(mesh);
    const auto part = partition_boundary(mesh);
    const Eigen::VectorXd u = harmonic_extension(a, part, Eigen::VectorXd::Constant(part.boundary.size(), 2.5));
    CHECK((u.array() - 2.5).abs().maxCoeff() <= 1e-12);
  }
  SUBCASE("linear data on the cylinder reproduces t") {
    const double L = 1.3;
    const auto mesh = geometry::make_mesh(DomainSpec::flat_cylinder(L), 16).mesh;
    const auto a = assemble_stiffness(mesh);
    const auto part = partition_boundary(mesh);
    Eigen::VectorXd g(part.boundary.size());
    for (std::size_t i = 0; i < part.boundary.size(); ++i) g[i] = mesh.vertices[part.boundary[i]].x;
    const Eigen::VectorXd u = harmonic_extension(a, part, g);
    double err = 0.0;
    for (std::size_t i = 0; i < part.interior.size(); ++i) {
      err = std::max(err, std::abs(u[i] - mesh.vertices[part.interior[i]].x));
    }
    CHECK(err <= 1e-12);
  }
  SUBCASE("cos(theta) data on the disk gives r cos(theta)") {
    double prev = 1.0;
    for (int n : {8, 16}) {
      const auto mesh = geometry::make_mesh(DomainSpec::flat_disk(1.0), n).mesh;
      const auto a = assemble_stiffness(mesh);
      const auto part = partition_boundary(mesh);
      Eigen::VectorXd g(part.boundary.size());
      for (std::size_t i = 0; i < part.boundary.size(); ++i) g[i] = mesh.vertices[part.boundary[i]].x;
      const Eigen::VectorXd u = harmonic_extension(a, part, g);
      double err = 0.0;
      for (std::size_t i = 0; i < part.interior.size(); ++i) {
        err = std::max(err, std::abs(u[i] - mesh.vertices[part.interior[i]].x));
      }
      CHECK(err <= 1e-12);  // P1 reproduces linear functions
      prev = err;
    }
    (void)prev;
  }
}

TEST_CASE("eigen solutions") {
  const auto mesh = geometry::make_mesh(DomainSpec::flat_disk(1.0), 16).mesh;
  const SteklovProblem problem(mesh);
  const auto sols = problem.solve(7);
  const Eigen::MatrixXd& M = problem.boundary_mass();
  const Eigen::MatrixXd A = dense(problem.stiffness());
  for (const auto& s : sols) {
    CHECK(s.sigma >= -1e-9);
    CHECK(s.boundary_values.dot(M * s.boundary_values) == doctest::Approx(1.0).epsilon(1e-10));
    // Interior rows of A u vanish.
    const Eigen::VectorXd full = s.nodal_values();
    const Eigen::VectorXd r = A * full;
    for (int v : problem.partition().interior) CHECK(std::abs(r[v]) <= 1e-10);
  }
  // sigma_0: constant eigenvector.
  const Eigen::VectorXd g0 = sols[0].boundary_values;
  CHECK((g0.array() - g0[0]).abs().maxCoeff() <= 1e-9);
  for (std::size_t k = 1; k < sols.size(); ++k) {
    CHECK(std::abs(Eigen::VectorXd::Ones(M.rows()).dot(M * sols[k].boundary_values)) <= 1e-8);
  }
  CHECK(sols[0].trace(0).size() == static_cast<Eigen::Index>(mesh.boundary_components[0].size()));
}

TEST_CASE("cylinder eigenvalues and convergence") {
  const auto coarse = SteklovProblem(geometry::make_mesh(DomainSpec::flat_cylinder(2.0), 16).mesh).solve(4);
  const auto fine = SteklovProblem(geometry::make_mesh(DomainSpec::flat_cylinder(2.0), 32).mesh).solve(4);
  CHECK(std::abs(fine[1].sigma - 0.5) <= 0.005 * 0.5);
  const double exact = std::tanh(2.0);
  const double order = std::log2(std::abs(coarse[2].sigma - exact) / std::abs(fine[2].sigma - exact));
  CHECK(order >= 1.5);
  CHECK(order <= 2.5);

  const auto dc = SteklovProblem(geometry::make_mesh(DomainSpec::flat_disk(1.0), 16).mesh).solve(2);
  const auto df = SteklovProblem(geometry::make_mesh(DomainSpec::flat_disk(1.0), 32).mesh).solve(2);
  const double disk_order = std::log2(std::abs(dc[1].sigma - 1.0) / std::abs(df[1].sigma - 1.0));
  CHECK(disk_order >= 1.5);
  CHECK(disk_order <= 2.5);
}

TEST_CASE("exact conformal scaling") {
  const auto mesh = geometry::make_mesh(DomainSpec::flat_cylinder(0.9), 12).mesh;
  const auto base = SteklovProblem(mesh).solve(9);
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> scale(-2.3, 2.3);
  for (int trial = 0; trial < 5; ++trial) {
    const double c = std::exp(scale(rng));
    const auto scaled = SteklovProblem(mesh.with_scaled_weights(c)).solve(9);
    for (std::size_t k = 1; k < base.size(); ++k) {
      CHECK(std::abs(scaled[k].sigma * c - base[k].sigma) <= 1e-12 * base[k].sigma);
    }
  }
}

TEST_CASE("boundary gradient") {
  SUBCASE("disk first eigenfunction") {
    const auto sols = SteklovProblem(geometry::make_mesh(DomainSpec::flat_disk(1.0), 32).mesh).solve(3);
    for (int k : {1, 2}) {
      // Normalised so that |grad u| = 1 / sqrt(pi) for r cos(theta - phi) / sqrt(pi).
      const double target = 1.0 / std::sqrt(kPi);
      const auto grad = boundary_gradient(sols[k]);
      for (double g : grad[0]) CHECK(std::abs(g / target - 1.0) <= 0.02);
    }
  }
  SUBCASE("cylinder L = 2 linear mode") {
    const auto sols = SteklovProblem(geometry::make_mesh(DomainSpec::flat_cylinder(2.0), 16).mesh).solve(2);
    const auto g = boundary_gradient(sols[1]);
    REQUIRE(g.size() == 2);
    // M-normalised u = t / (L sqrt(4 pi)), so |grad u| is that constant.
    const double norm = 1.0 / (2.0 * std::sqrt(4.0 * kPi));
    for (const auto& comp : g) {
      for (double v : comp) CHECK(v == doctest::Approx(norm).epsilon(1e-10));
    }
  }
  SUBCASE("cylinder L = 0.5 cosh mode tracks the closed-form ratio") {
    const auto sols = SteklovProblem(geometry::make_mesh(DomainSpec::flat_cylinder(0.5), 32).mesh).solve(3);
    const auto g = boundary_gradient(sols[1]);
    double lo = 1e300;
    double hi = 0.0;
    for (double v : g[0]) {
      lo = std::min(lo, v * v);
      hi = std::max(hi, v * v);
    }
    const double ratio = std::pow(1.0 / std::tanh(0.5), 2);
    CHECK(std::abs(hi / lo - ratio) <= 0.05 * ratio);
  }
}

TEST_CASE("clustering") {
  const auto groups = cluster_indices({0.0, 1.0, 1.0005, 2.0, 2.001, 2.0015, 3.0}, 1e-3);
  REQUIRE(groups.size() == 4);
  CHECK(groups[1].size() == 2);
  CHECK(groups[2].size() == 3);
  CHECK(groups[3].size() == 1);
  // Spread is measured from the first value of the group, not chained.
  CHECK(cluster_indices({1.0, 1.0008, 1.0016}, 1e-3).size() == 2);
  const auto sols = SteklovProblem(geometry::make_mesh(DomainSpec::flat_disk(1.0), 32).mesh).solve(9);
  const auto spec = numeric_spectrum(sols, 1e-3, DomainSpec::flat_disk(1.0));
  CHECK(spec.source == analytic::SpectrumSource::Numeric);
  REQUIRE(spec.entries.size() == 5);
  CHECK(spec.entries[0].label == "const");
  for (int i = 1; i < 5; ++i) CHECK(spec.entries[i].multiplicity == 2);
  const auto cyl = SteklovProblem(geometry::make_mesh(DomainSpec::flat_cylinder(0.5), 32).mesh).solve(4);
  CHECK(numeric_spectrum(cyl, 1e-3, DomainSpec::flat_cylinder(0.5)).entries[1].multiplicity == 2);
}

TEST_CASE("degenerate meshes are rejected") {
  Mesh bad = unit_square();
  bad.vertices[2] = {1, 0};
  CHECK_THROWS_AS(assemble_stiffness(bad), MeshQualityError);
  Mesh zero_edge = unit_square();
  zero_edge.vertices[1] = zero_edge.vertices[0];
  CHECK_THROWS_AS(assemble_boundary_mass(zero_edge), MeshQualityError);
}
