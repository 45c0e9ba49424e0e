#pragma once

#include <Eigen/Dense>

namespace cocert {

struct SymmetricEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns are orthonormal eigenvectors
  int sweeps = 0;
};

/// Cyclic Jacobi rotations in fixed row-major sweep order; deterministic for a given
/// input. Stops when the off-diagonal Frobenius norm falls below tol times the norm
/// of the input.
SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& a, int max_sweeps = 60, double tol = 1e-15);

}  // namespace cocert
