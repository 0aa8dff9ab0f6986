#pragma once

#include <Eigen/Dense>

namespace tvvar::linalg {

/// Systems whose reciprocal condition estimate falls below this are singular.
inline constexpr double kMinReciprocalCondition = 1e-12;

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m);

/// Solve A X = B for symmetric A using an LDLT factorization. Throws
/// NumericalError when A is numerically singular.
Eigen::MatrixXd symmetric_solve(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Inverse of a symmetric matrix through symmetric_solve, symmetrized.
Eigen::MatrixXd symmetric_inverse(const Eigen::MatrixXd& a);

/// Cholesky factor of a symmetric positive definite matrix; throws
/// NumericalError if the factorization fails.
Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& a);

/// Log-determinant and inverse of a symmetric positive definite matrix.
struct PdFactor
{
  double log_det;
  Eigen::MatrixXd inverse;
};
PdFactor pd_factor(const Eigen::MatrixXd& a);

double min_eigenvalue(const Eigen::MatrixXd& symmetric);

/// Raise every eigenvalue of a symmetric matrix to at least `floor`.
/// Returns the input unchanged when it already satisfies the floor.
Eigen::MatrixXd floor_eigenvalues(const Eigen::MatrixXd& symmetric, double floor);

/// Kronecker product a ⊗ b.
Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Column-stacking vec operator.
Eigen::VectorXd vec(const Eigen::MatrixXd& m);

} // namespace tvvar::linalg
