#pragma once

#include "tvvar/variance_kernel.hpp"
#include "tvvar/varproc.hpp"

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace tvvar {

/// Responses X_1..X_n and stacked regressors X̃_{t−1} = (X_{t−1}', ..., X_{t−p}')'.
/// Responses always start at t = 1, so designs of different orders built on
/// one series share the same estimation sample.
struct Design
{
  int dim = 0;
  int order = 0;
  Eigen::MatrixXd responses;  ///< d × n
  Eigen::MatrixXd regressors; ///< dp × n

  int size() const { return static_cast<int>(responses.cols()); }
  /// n⁻¹ Σ X̃_{t−1} X̃_{t−1}'.
  Eigen::MatrixXd gram() const;
};

/// Throws std::invalid_argument when the presample is shorter than p.
Design build_design(const TimeSeries& ts, int p);

enum class Method { OLS, GLS, ALS };

std::string to_string(Method method);

struct EstimationResult
{
  Method method = Method::OLS;
  int dim = 0;
  int order = 0;
  /// θ̂ = (vec(Â_1)', ..., vec(Â_p)')'.
  Eigen::VectorXd theta;
  /// û_1..û_n as columns.
  Eigen::MatrixXd residuals;
  /// n⁻¹ Σ û_t û_t' (filled for OLS only).
  Eigen::MatrixXd sigma_u_hat;
  /// Matrix inverted to obtain θ̂: Σ̂_X̃ for OLS, the Σ_t⁻¹-weighted
  /// n⁻¹ Σ X̃X̃' ⊗ Σ_t⁻¹ for GLS and ALS.
  Eigen::MatrixXd normal_matrix;

  std::vector<Eigen::MatrixXd> coeff_matrices() const;
  VarModel model() const { return VarModel::from_theta(dim, theta); }
};

/// u_t(θ) = X_t − (X̃_{t−1}' ⊗ I_d) θ for every t.
Eigen::MatrixXd residuals_at(const Design& design, const Eigen::VectorXd& theta);

EstimationResult ols_estimate(const Design& design);
EstimationResult ols_estimate(const TimeSeries& ts, int p);

/// Σ_t-weighted least squares; `sigmas` holds Σ_1..Σ_n.
EstimationResult gls_estimate(const Design& design, std::span<const Eigen::MatrixXd> sigmas);

/// Σ(t/n) for t = 1..n.
std::vector<Eigen::MatrixXd> sample_variance_path(const VariancePath& path, int n);

EstimationResult gls_estimate(const Design& design, const VariancePath& path);

/// Adaptive least squares: GLS with the kernel estimates Σ̌_t.
EstimationResult als_estimate(const Design& design, const VariancePathEstimate& estimate);

/// n⁻¹ Σ X̃X̃' ⊗ Σ_t⁻¹ (pd² × pd²).
Eigen::MatrixXd weighted_normal_matrix(const Design& design,
                                       std::span<const Eigen::MatrixXd> sigmas);

/// Sample covariance estimators and the implied asymptotic variances of
/// √n(θ̂ − θ₀).
struct LambdaEstimates
{
  Eigen::MatrixXd lambda1; ///< n⁻¹ Σ X̃X̃' ⊗ Σ̌_t⁻¹
  Eigen::MatrixXd lambda2; ///< n⁻¹ Σ X̃X̃' ⊗ û_t û_t'
  Eigen::MatrixXd lambda3; ///< n⁻¹ Σ X̃X̃' ⊗ I_d
  Eigen::MatrixXd lambda4; ///< n⁻¹ Σ X̃X̃' ⊗ Σ̂_u⁻¹
  Eigen::MatrixXd avar_ols; ///< Λ̂₃⁻¹ Λ̂₂ Λ̂₃⁻¹
  Eigen::MatrixXd avar_als; ///< Λ̂₁⁻¹
  Eigen::MatrixXd avar_std; ///< Λ̂₄⁻¹
};

LambdaEstimates lambda_estimates(const Design& design, const Eigen::MatrixXd& ols_residuals,
                                 const VariancePathEstimate& path_estimate,
                                 const Eigen::MatrixXd& sigma_u_hat);

struct TheoreticalLambdas
{
  Eigen::MatrixXd lambda1;
  Eigen::MatrixXd lambda2;
  Eigen::MatrixXd lambda3;
  Eigen::MatrixXd lambda4;
};

/// Population Λ₁..Λ₄ for `model` fitted at order p ≥ model.order(). The inner
/// series Σ_i Δ^i (e₁e₁' ⊗ Σ(r)) Δ^i' is summed until the increment's
/// Frobenius norm drops below `tail_tol`; the integral over r uses the
/// midpoint rule with the path's breakpoints as cell boundaries. Λ₄ is built
/// from the constant variance ∫Σ(r)dr.
TheoreticalLambdas theoretical_lambdas(const VarModel& model, const VariancePath& path, int p,
                                       int grid_size = 2000, double tail_tol = 1e-13);

/// Midpoint nodes and weights on (0, 1] with `breakpoints` as cell edges.
struct Quadrature
{
  std::vector<double> nodes;
  std::vector<double> weights;
};
Quadrature midpoint_rule(int grid_size, const std::vector<double>& breakpoints);

} // namespace tvvar
