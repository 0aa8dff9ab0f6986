#pragma once

#include "tvvar/estimation.hpp"
#include "tvvar/variance_kernel.hpp"
#include "tvvar/varproc.hpp"

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tvvar {

/// Symmetric positive definite square root via the spectral decomposition.
/// Throws NumericalError for a non-PD input.
Eigen::MatrixXd matrix_sqrt_pd(const Eigen::MatrixXd& m);

/// Inverse of matrix_sqrt_pd(m).
Eigen::MatrixXd matrix_inv_sqrt_pd(const Eigen::MatrixXd& m);

/// How the asymptotic variance behind a confidence bound is obtained.
///  - Standard: Λ̂₄⁻¹ with the OLS estimate (constant-variance theory)
///  - OLS:      Λ̂₃⁻¹Λ̂₂Λ̂₃⁻¹ with the OLS estimate
///  - ALS:      Λ̂₁⁻¹ with the ALS estimate
///  - GLS:      inverse true-Σ_t weighted normal matrix with the GLS estimate
enum class BoundsMethod { Standard, OLS, ALS, GLS };

std::string to_string(BoundsMethod method);
BoundsMethod bounds_method_from_name(const std::string& name);

/// Two-sided 95% normal quantile used for every bound.
inline constexpr double kBoundQuantile = 1.96;

struct PartialOptions
{
  /// Largest lag examined; also the order whose OLS residuals drive the
  /// bandwidth cross-validation.
  int p_max = 5;
  std::vector<BoundsMethod> methods{BoundsMethod::Standard, BoundsMethod::OLS,
                                    BoundsMethod::ALS};
  Kernel kernel;
  std::optional<double> bandwidth;
  std::optional<BandwidthGrid> grid;
  /// Required for BoundsMethod::GLS.
  const VariancePath* true_path = nullptr;
};

/// Estimate and 1.96·υ̂ half-widths of one lag's d×d block for one method.
struct BoundedMatrix
{
  Eigen::MatrixXd estimate;
  Eigen::MatrixXd half_width;
};

struct PamLag
{
  int lag = 0;
  std::map<BoundsMethod, BoundedMatrix> by_method;
};

/// Partial autoregressive matrices Â_h, h = 1..p_max: the last coefficient
/// block of the order-h fit.
struct PamSequence
{
  int dim = 0;
  double bandwidth = 0.0;
  std::vector<PamLag> lags;
};

PamSequence pam_sequence(const TimeSeries& ts, const PartialOptions& options);

/// Long-run covariances normalizing the partial cross-correlations at lag p.
struct LongRunCovariances
{
  Eigen::MatrixXd sigma_w; ///< backward regression of X_{t−p} on X_{t−p+1..t−1}
  Eigen::MatrixXd sigma_u; ///< forward regression of X_t on X_{t−1..t−p+1}
};

/// Both come from order p − 1 regressions on the sample t = 1..n; at p = 1
/// both equal n⁻¹ Σ X_t X_t'.
LongRunCovariances long_run_covariances(const TimeSeries& ts, int p);

struct BoundedVector
{
  Eigen::VectorXd estimate;   ///< P̂(p), length d²
  Eigen::MatrixXd covariance; ///< asymptotic covariance of √n P̂(p)
  Eigen::VectorXd half_width;
};

/// P̂(p) = (Σ̲̂_u^{−1/2} ⊗ Σ̲̂_w^{1/2}) vec(Â_p) for each requested method.
struct PcmVector
{
  int lag = 0;
  int dim = 0;
  std::map<BoundsMethod, BoundedVector> by_method;
};

PcmVector pcm(const TimeSeries& ts, int p, const PartialOptions& options);

/// PAM and PCM for every lag 1..p_max sharing the fits and the bandwidth.
struct PartialAnalysis
{
  PamSequence pam;
  std::vector<PcmVector> pcm;
};

PartialAnalysis partial_analysis(const TimeSeries& ts, const PartialOptions& options);

} // namespace tvvar
