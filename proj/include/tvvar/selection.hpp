#pragma once

#include "tvvar/estimation.hpp"
#include "tvvar/variance_kernel.hpp"
#include "tvvar/varproc.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tvvar {

/// n⁻¹ Σ_t [ln det Σ_t + u_t' Σ_t⁻¹ u_t] for residuals stored d×n. The
/// d·ln 2π constant is left out.
double gaussian_neg2ll(const Eigen::MatrixXd& residuals, std::span<const Eigen::MatrixXd> sigmas);

/// Constant-covariance form ln det Σ + n⁻¹ Σ_t u_t' Σ⁻¹ u_t.
double gaussian_neg2ll(const Eigen::MatrixXd& residuals, const Eigen::MatrixXd& sigma);

/// Same, evaluated at u_t(θ) on `design`.
double gaussian_neg2ll(const Design& design, const Eigen::VectorXd& theta,
                       std::span<const Eigen::MatrixXd> sigmas);

/// The 2pd²/n penalty shared by every criterion.
double aic_penalty(int p, int d, int n);

enum class Criterion { AIC, AIC_ALS, AIC_GLS };

std::string to_string(Criterion criterion);

/// Criterion values at one candidate order.
struct CriterionTrace
{
  int order = 0;
  double neg2ll_ols = 0.0;
  double neg2ll_als = 0.0;
  std::optional<double> neg2ll_gls;
  double aic = 0.0;
  double aic_als = 0.0;
  std::optional<double> aic_gls;

  std::optional<double> value(Criterion criterion) const;
};

/// Inputs to an order scan beyond the series itself.
struct SelectionOptions
{
  int p_max = 5;
  /// Orders above `cap` are not trusted.
  int cap = 5;
  Kernel kernel;
  /// Fixed bandwidth; cross-validated on the order-p_max OLS residuals when unset.
  std::optional<double> bandwidth;
  /// Cross-validation grid; BandwidthGrid::for_sample_size(n) when unset.
  std::optional<BandwidthGrid> grid;
  /// True variance path, enabling AIC_GLS (simulation only).
  const VariancePath* true_path = nullptr;
};

/// What a criterion needs beyond the series: Σ̌_t for AIC_ALS, the true path
/// for AIC_GLS.
struct CriterionContext
{
  const VariancePathEstimate* variance_estimate = nullptr;
  const VariancePath* true_path = nullptr;
};

/// −2·loglik + 2pd²/n at order p. AIC uses (θ̂_OLS, Σ̂_u), AIC_ALS uses
/// (θ̂_ALS, Σ̌_t) and AIC_GLS uses (θ̂_GLS, Σ(t/n)).
double criterion(const TimeSeries& ts, int p, Criterion which, const CriterionContext& context);

struct SelectionReport
{
  int dim = 0;
  int sample_size = 0;
  int p_max = 0;
  int cap = 0;
  double bandwidth = 0.0;
  std::vector<CriterionTrace> traces;
  int selected_aic = 0;
  int selected_als = 0;
  std::optional<int> selected_gls;

  std::optional<int> selected(Criterion criterion) const;

  /// Set when the choice is not trustworthy: the selected order exceeds the
  /// cap, or it sits on the scan boundary p_max ≤ cap and so may be censored.
  bool unreliable(Criterion criterion) const;
};

/// Scan p = 1..p_max on the common sample X_1..X_n (the series must carry at
/// least p_max presample values). Σ̌_t is re-estimated from each order's OLS
/// residuals with one bandwidth shared across orders. Ties go to the
/// smaller order.
SelectionReport select_order(const TimeSeries& ts, const SelectionOptions& options);

/// Index of the smallest value, first one on ties.
int argmin_first(std::span<const double> values);

} // namespace tvvar
