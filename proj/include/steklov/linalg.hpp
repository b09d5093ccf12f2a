#pragma once

#include <Eigen/Dense>

namespace steklov::linalg {

struct SymmetricEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // orthonormal columns
};

// Dense symmetric eigendecomposition: Householder reduction to tridiagonal
// form followed by implicit-shift QL iteration. Only the lower triangle of
// `a` is read. Throws std::runtime_error if QL fails to converge.
SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& a);

}  // namespace steklov::linalg
