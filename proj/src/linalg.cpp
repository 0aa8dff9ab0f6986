#include "tvvar/linalg.hpp"

#include "tvvar/error.hpp"

#include <cmath>
#include <string>

namespace tvvar::linalg {

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m)
{
  return 0.5 * (m + m.transpose());
}

Eigen::MatrixXd symmetric_solve(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
  if (a.rows() != a.cols() || a.rows() != b.rows()) {
    throw std::invalid_argument("symmetric_solve: dimension mismatch");
  }
  if (a.rows() == 0) {
    return Eigen::MatrixXd(0, b.cols());
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
  if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > kMinReciprocalCondition)) {
    throw NumericalError("singular system (reciprocal condition " +
                         std::to_string(ldlt.rcond()) + ")");
  }
  return ldlt.solve(b);
}

Eigen::MatrixXd symmetric_inverse(const Eigen::MatrixXd& a)
{
  return symmetrize(symmetric_solve(a, Eigen::MatrixXd::Identity(a.rows(), a.cols())));
}

Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& a)
{
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("matrix is not positive definite");
  }
  return llt.matrixL();
}

PdFactor pd_factor(const Eigen::MatrixXd& a)
{
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success || !(llt.rcond() > kMinReciprocalCondition)) {
    throw NumericalError("covariance matrix is not positive definite");
  }
  const Eigen::MatrixXd l = llt.matrixL();
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    log_det += 2.0 * std::log(l(i, i));
  }
  Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(a.rows(), a.cols()));
  return {log_det, symmetrize(inv)};
}

double min_eigenvalue(const Eigen::MatrixXd& symmetric)
{
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetric, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Eigen::MatrixXd floor_eigenvalues(const Eigen::MatrixXd& symmetric, double floor)
{
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetric);
  const Eigen::VectorXd& ev = es.eigenvalues();
  if (ev.minCoeff() >= floor) {
    return symmetric;
  }
  const Eigen::VectorXd clipped = ev.cwiseMax(floor);
  return symmetrize(es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose());
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Eigen::VectorXd vec(const Eigen::MatrixXd& m)
{
  return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

} // namespace tvvar::linalg
