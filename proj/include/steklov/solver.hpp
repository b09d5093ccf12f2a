#pragma once

#include <array>
#include <memory>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "steklov/analytic.hpp"
#include "steklov/geometry.hpp"

namespace steklov::fem {

using geometry::Mesh;
using geometry::Point2;

struct SolverConfig {
  double rtol_eig = 1e-10;    // accepted relative eigen-residual
  double cluster_gap = 1e-3;  // relative gap below which eigenvalues form one cluster
  int resolution = 32;
};

class MeshQualityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Symmetric matrix stored in full; upper_entries() gives the (i <= j) view.
struct SymmetricSparse {
  Eigen::SparseMatrix<double> full;

  struct Entry {
    int i;
    int j;
    double value;
  };

  int dimension() const { return static_cast<int>(full.rows()); }
  double quadratic_form(const Eigen::VectorXd& v) const { return v.dot(full * v); }
  std::vector<Entry> upper_entries() const;
};

inline constexpr double kMinTriangleArea = 1e-14;

// P1 stiffness of one triangle in the flat metric.
Eigen::Matrix3d local_stiffness(const std::array<Point2, 3>& corners);

SymmetricSparse assemble_stiffness(const Mesh& mesh);
// Weighted P1 mass of the boundary edges: (rho_0 |e| / 6) [[2, 1], [1, 2]] per edge.
SymmetricSparse assemble_boundary_mass(const Mesh& mesh);

struct BoundaryPartition {
  std::vector<int> boundary;          // boundary cycles concatenated in component order
  std::vector<int> interior;          // remaining vertices, ascending
  std::vector<int> component_offset;  // component c occupies [offset[c], offset[c+1])
};

BoundaryPartition partition_boundary(const Mesh& mesh);

// Dense principal submatrix on `index`.
Eigen::MatrixXd restrict_dense(const SymmetricSparse& a, const std::vector<int>& index);

// Factorization of the interior block A_II, shared by the Schur complement and
// harmonic extension.
class InteriorSolve {
 public:
  InteriorSolve(const SymmetricSparse& stiffness, const BoundaryPartition& partition);

  // S = A_BB - A_BI A_II^{-1} A_IB.
  const Eigen::MatrixXd& dtn() const { return dtn_; }
  // Interior values solving A_II u_I = -A_IB g.
  Eigen::VectorXd extend(const Eigen::VectorXd& boundary_values) const;

 private:
  Eigen::MatrixXd transfer_;  // A_II^{-1} A_IB
  Eigen::MatrixXd dtn_;
};

Eigen::MatrixXd schur_dtn(const SymmetricSparse& stiffness, const BoundaryPartition& partition);
Eigen::VectorXd harmonic_extension(const SymmetricSparse& stiffness, const BoundaryPartition& partition,
                                   const Eigen::VectorXd& boundary_values);

struct EigenPair {
  double sigma = 0.0;
  Eigen::VectorXd vector;
};

// Smallest `count` eigenpairs of S g = sigma M g: Cholesky of M, symmetric
// reduction, dense symmetric eigensolve. Vectors are M-orthonormal with their
// first significant coordinate positive.
std::vector<EigenPair> solve_pencil(const Eigen::MatrixXd& S, const Eigen::MatrixXd& M, int count,
                                    double rtol_eig = 1e-10);

struct EigenSolution {
  double sigma = 0.0;
  Eigen::VectorXd boundary_values;  // partition order
  Eigen::VectorXd interior_values;  // partition order
  std::vector<double> weight_used;  // rho_0 per component
  std::shared_ptr<const Mesh> mesh;
  std::shared_ptr<const BoundaryPartition> partition;

  int component_count() const { return static_cast<int>(partition->component_offset.size()) - 1; }
  Eigen::VectorXd trace(int component) const;
  // Nodal values indexed by mesh vertex.
  Eigen::VectorXd nodal_values() const;
};

// Assembled and reduced Steklov problem for one mesh.
class SteklovProblem {
 public:
  explicit SteklovProblem(Mesh mesh);

  std::vector<EigenSolution> solve(int count, const SolverConfig& config = {}) const;

  const Mesh& mesh() const { return *mesh_; }
  const BoundaryPartition& partition() const { return *partition_; }
  const SymmetricSparse& stiffness() const { return stiffness_; }
  const Eigen::MatrixXd& dtn() const { return interior_.dtn(); }
  const Eigen::MatrixXd& boundary_mass() const { return mass_; }

 private:
  std::shared_ptr<const Mesh> mesh_;
  std::shared_ptr<const BoundaryPartition> partition_;
  SymmetricSparse stiffness_;
  InteriorSolve interior_;
  Eigen::MatrixXd mass_;
};

// |grad u|_g at every boundary node, per component: sqrt((sigma u)^2 + (du/ds_g)^2)
// with du/ds_g a centred difference in weighted arclength.
std::vector<std::vector<double>> boundary_gradient(const EigenSolution& eig);

// Consecutive index groups whose relative spread from the group's first value is below gap.
std::vector<std::vector<int>> cluster_indices(const std::vector<double>& sigmas, double gap);

analytic::Spectrum numeric_spectrum(const std::vector<EigenSolution>& solutions, double gap,
                                    const geometry::DomainSpec& domain);

}  // namespace steklov::fem
