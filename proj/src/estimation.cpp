#include "tvvar/estimation.hpp"

#include "tvvar/error.hpp"
#include "tvvar/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tvvar {

Eigen::MatrixXd Design::gram() const
{
  return regressors * regressors.transpose() / static_cast<double>(size());
}

Design build_design(const TimeSeries& ts, int p)
{
  if (p < 0) {
    throw std::invalid_argument("build_design: order must be non-negative");
  }
  if (ts.presample() < p) {
    throw std::invalid_argument("build_design: presample of " + std::to_string(ts.presample()) +
                                " values is shorter than the order " + std::to_string(p));
  }
  const int d = ts.dim();
  const int n = ts.size();
  const int offset = ts.presample();
  Design design;
  design.dim = d;
  design.order = p;
  design.responses = ts.values().middleCols(offset, n);
  design.regressors.resize(static_cast<Eigen::Index>(d) * p, n);
  for (int t = 0; t < n; ++t) {
    for (int lag = 1; lag <= p; ++lag) {
      design.regressors.block((lag - 1) * d, t, d, 1) = ts.values().col(offset + t - lag);
    }
  }
  return design;
}

std::string to_string(Method method)
{
  switch (method) {
    case Method::OLS:
      return "ols";
    case Method::GLS:
      return "gls";
    case Method::ALS:
      return "als";
  }
  return "?";
}

std::vector<Eigen::MatrixXd> EstimationResult::coeff_matrices() const
{
  return model().coeffs();
}

Eigen::MatrixXd residuals_at(const Design& design, const Eigen::VectorXd& theta)
{
  const int d = design.dim;
  const Eigen::Index k = design.regressors.rows();
  if (theta.size() != k * d) {
    throw std::invalid_argument("residuals_at: theta has the wrong length");
  }
  if (k == 0) {
    return design.responses;
  }
  const Eigen::Map<const Eigen::MatrixXd> a(theta.data(), d, k);
  return design.responses - a * design.regressors;
}

namespace {

void require_sample(const Design& design)
{
  if (design.size() < 1) {
    throw std::invalid_argument("estimation: empty sample");
  }
}

} // namespace

EstimationResult ols_estimate(const Design& design)
{
  require_sample(design);
  const int d = design.dim;
  const double n = design.size();
  EstimationResult res;
  res.method = Method::OLS;
  res.dim = d;
  res.order = design.order;
  if (design.order == 0) {
    res.theta.resize(0);
    res.normal_matrix.resize(0, 0);
  } else {
    const Eigen::MatrixXd gram = design.gram();
    const Eigen::MatrixXd cross = design.responses * design.regressors.transpose() / n;
    const Eigen::MatrixXd at = linalg::symmetric_solve(gram, cross.transpose());
    const Eigen::MatrixXd a = at.transpose();
    res.theta = linalg::vec(a);
    res.normal_matrix = linalg::kron(gram, Eigen::MatrixXd::Identity(d, d));
  }
  res.residuals = residuals_at(design, res.theta);
  res.sigma_u_hat = linalg::symmetrize(res.residuals * res.residuals.transpose() / n);
  return res;
}

EstimationResult ols_estimate(const TimeSeries& ts, int p)
{
  return ols_estimate(build_design(ts, p));
}

namespace {

std::vector<Eigen::MatrixXd> inverses(std::span<const Eigen::MatrixXd> sigmas)
{
  std::vector<Eigen::MatrixXd> out;
  out.reserve(sigmas.size());
  for (const auto& s : sigmas) {
    out.push_back(linalg::pd_factor(s).inverse);
  }
  return out;
}

Eigen::MatrixXd weighted_normal_from_inverses(const Design& design,
                                              const std::vector<Eigen::MatrixXd>& inv)
{
  const int d = design.dim;
  const Eigen::Index k = design.regressors.rows();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(k * d, k * d);
  for (int t = 0; t < design.size(); ++t) {
    const auto x = design.regressors.col(t);
    for (Eigen::Index j = 0; j < k; ++j) {
      for (Eigen::Index i = 0; i < k; ++i) {
        out.block(i * d, j * d, d, d).noalias() += (x(i) * x(j)) * inv[t];
      }
    }
  }
  return linalg::symmetrize(out / static_cast<double>(design.size()));
}

EstimationResult weighted_estimate(const Design& design, std::span<const Eigen::MatrixXd> sigmas,
                                   Method method)
{
  require_sample(design);
  if (static_cast<int>(sigmas.size()) != design.size()) {
    throw std::invalid_argument("weighted estimation: need one covariance matrix per observation");
  }
  const int d = design.dim;
  const double n = design.size();
  for (const auto& s : sigmas) {
    if (s.rows() != d || s.cols() != d) {
      throw std::invalid_argument("weighted estimation: covariance matrices must be d x d");
    }
  }
  const std::vector<Eigen::MatrixXd> inv = inverses(sigmas);

  EstimationResult res;
  res.method = method;
  res.dim = d;
  res.order = design.order;
  if (design.order == 0) {
    res.theta.resize(0);
    res.normal_matrix.resize(0, 0);
  } else {
    res.normal_matrix = weighted_normal_from_inverses(design, inv);
    Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(d, design.regressors.rows());
    for (int t = 0; t < design.size(); ++t) {
      cross.noalias() +=
        (inv[t] * design.responses.col(t)) * design.regressors.col(t).transpose();
    }
    cross /= n;
    res.theta = linalg::symmetric_solve(res.normal_matrix, linalg::vec(cross));
  }
  res.residuals = residuals_at(design, res.theta);
  return res;
}

} // namespace

Eigen::MatrixXd weighted_normal_matrix(const Design& design,
                                       std::span<const Eigen::MatrixXd> sigmas)
{
  if (static_cast<int>(sigmas.size()) != design.size()) {
    throw std::invalid_argument("weighted_normal_matrix: need one matrix per observation");
  }
  return weighted_normal_from_inverses(design, inverses(sigmas));
}

EstimationResult gls_estimate(const Design& design, std::span<const Eigen::MatrixXd> sigmas)
{
  return weighted_estimate(design, sigmas, Method::GLS);
}

std::vector<Eigen::MatrixXd> sample_variance_path(const VariancePath& path, int n)
{
  std::vector<Eigen::MatrixXd> out;
  out.reserve(n);
  for (int t = 1; t <= n; ++t) {
    out.push_back(path.at(static_cast<double>(t) / n));
  }
  return out;
}

EstimationResult gls_estimate(const Design& design, const VariancePath& path)
{
  const auto sigmas = sample_variance_path(path, design.size());
  return gls_estimate(design, sigmas);
}

EstimationResult als_estimate(const Design& design, const VariancePathEstimate& estimate)
{
  return weighted_estimate(design, estimate.matrices, Method::ALS);
}

LambdaEstimates lambda_estimates(const Design& design, const Eigen::MatrixXd& ols_residuals,
                                 const VariancePathEstimate& path_estimate,
                                 const Eigen::MatrixXd& sigma_u_hat)
{
  const int d = design.dim;
  const int n = design.size();
  if (ols_residuals.rows() != d || ols_residuals.cols() != n ||
      path_estimate.size() != n || sigma_u_hat.rows() != d || sigma_u_hat.cols() != d) {
    throw std::invalid_argument("lambda_estimates: inconsistent dimensions");
  }
  const Eigen::Index k = design.regressors.rows();
  const Eigen::MatrixXd gram = design.gram();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);

  LambdaEstimates out;
  out.lambda3 = linalg::kron(gram, id);
  out.lambda4 = linalg::kron(gram, linalg::pd_factor(sigma_u_hat).inverse);
  out.lambda1 = weighted_normal_matrix(design, path_estimate.matrices);

  out.lambda2 = Eigen::MatrixXd::Zero(k * d, k * d);
  for (int t = 0; t < n; ++t) {
    const Eigen::MatrixXd uu = ols_residuals.col(t) * ols_residuals.col(t).transpose();
    const auto x = design.regressors.col(t);
    for (Eigen::Index j = 0; j < k; ++j) {
      for (Eigen::Index i = 0; i < k; ++i) {
        out.lambda2.block(i * d, j * d, d, d).noalias() += (x(i) * x(j)) * uu;
      }
    }
  }
  out.lambda2 = linalg::symmetrize(out.lambda2 / static_cast<double>(n));

  // Λ̂₃⁻¹ = G⁻¹ ⊗ I, so the sandwich only needs the dp×dp Gram inverse.
  const Eigen::MatrixXd lambda3_inv = linalg::kron(linalg::symmetric_inverse(gram), id);
  out.avar_ols = linalg::symmetrize(lambda3_inv * out.lambda2 * lambda3_inv);
  out.avar_als = linalg::symmetric_inverse(out.lambda1);
  out.avar_std = linalg::symmetric_inverse(out.lambda4);
  return out;
}

Quadrature midpoint_rule(int grid_size, const std::vector<double>& breakpoints)
{
  if (grid_size < 1) {
    throw std::invalid_argument("midpoint_rule: grid size must be positive");
  }
  std::vector<double> edges{0.0};
  std::vector<double> sorted = breakpoints;
  std::sort(sorted.begin(), sorted.end());
  for (double b : sorted) {
    if (b > edges.back() && b < 1.0) {
      edges.push_back(b);
    }
  }
  edges.push_back(1.0);

  Quadrature q;
  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    const double lo = edges[s];
    const double len = edges[s + 1] - lo;
    const int cells = std::max(1, static_cast<int>(std::lround(grid_size * len)));
    const double h = len / cells;
    for (int c = 0; c < cells; ++c) {
      q.nodes.push_back(lo + (c + 0.5) * h);
      q.weights.push_back(h);
    }
  }
  return q;
}

namespace {

// Σ_i Δ^i (e₁e₁' ⊗ S) Δ^i'.
Eigen::MatrixXd stacked_second_moment(const Eigen::MatrixXd& companion, const Eigen::MatrixXd& s,
                                      double tail_tol)
{
  const Eigen::Index dp = companion.rows();
  const Eigen::Index d = s.rows();
  Eigen::MatrixXd term = Eigen::MatrixXd::Zero(dp, dp);
  term.topLeftCorner(d, d) = s;
  Eigen::MatrixXd sum = term;
  constexpr int kMaxIterations = 100000;
  for (int i = 0; i < kMaxIterations; ++i) {
    term = companion * term * companion.transpose();
    sum += term;
    if (term.norm() < tail_tol) {
      return linalg::symmetrize(sum);
    }
    if (!term.allFinite()) {
      break;
    }
  }
  throw NumericalError("theoretical_lambdas: second-moment series does not converge");
}

} // namespace

TheoreticalLambdas theoretical_lambdas(const VarModel& model, const VariancePath& path, int p,
                                       int grid_size, double tail_tol)
{
  if (p < 1 || p < model.order()) {
    throw std::invalid_argument("theoretical_lambdas: fitted order must be >= max(1, p0)");
  }
  if (model.dim() != path.dim()) {
    throw std::invalid_argument("theoretical_lambdas: model and path dimensions differ");
  }
  if (!is_stable(model).stable) {
    throw NumericalError("theoretical_lambdas: model is not stable, series does not converge");
  }
  const int d = model.dim();
  const Eigen::MatrixXd companion = companion_matrix(model.padded(p));
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
  const Quadrature q = midpoint_rule(grid_size, path.breakpoints());

  const Eigen::Index k = static_cast<Eigen::Index>(p) * d * d;
  TheoreticalLambdas out{Eigen::MatrixXd::Zero(k, k), Eigen::MatrixXd::Zero(k, k),
                         Eigen::MatrixXd::Zero(k, k), Eigen::MatrixXd::Zero(k, k)};
  Eigen::MatrixXd sigma_mean = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t j = 0; j < q.nodes.size(); ++j) {
    const Eigen::MatrixXd s = path.at(q.nodes[j]);
    const Eigen::MatrixXd m = stacked_second_moment(companion, s, tail_tol);
    const double w = q.weights[j];
    out.lambda1 += w * linalg::kron(m, linalg::pd_factor(s).inverse);
    out.lambda2 += w * linalg::kron(m, s);
    out.lambda3 += w * linalg::kron(m, id);
    sigma_mean += w * s;
  }
  sigma_mean = linalg::symmetrize(sigma_mean);
  const Eigen::MatrixXd m_mean = stacked_second_moment(companion, sigma_mean, tail_tol);
  out.lambda4 = linalg::kron(m_mean, linalg::pd_factor(sigma_mean).inverse);
  out.lambda1 = linalg::symmetrize(out.lambda1);
  out.lambda2 = linalg::symmetrize(out.lambda2);
  out.lambda3 = linalg::symmetrize(out.lambda3);
  return out;
}

} // namespace tvvar
