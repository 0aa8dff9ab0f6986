#include "tvvar/selection.hpp"

#include "tvvar/linalg.hpp"

#include <stdexcept>

namespace tvvar {

double gaussian_neg2ll(const Eigen::MatrixXd& residuals, std::span<const Eigen::MatrixXd> sigmas)
{
  const Eigen::Index n = residuals.cols();
  if (static_cast<Eigen::Index>(sigmas.size()) != n || n == 0) {
    throw std::invalid_argument("gaussian_neg2ll: need one covariance per residual");
  }
  double total = 0.0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const linalg::PdFactor f = linalg::pd_factor(sigmas[t]);
    const auto u = residuals.col(t);
    total += f.log_det + u.dot(f.inverse * u);
  }
  return total / static_cast<double>(n);
}

double gaussian_neg2ll(const Eigen::MatrixXd& residuals, const Eigen::MatrixXd& sigma)
{
  const Eigen::Index n = residuals.cols();
  if (n == 0) {
    throw std::invalid_argument("gaussian_neg2ll: no residuals");
  }
  const linalg::PdFactor f = linalg::pd_factor(sigma);
  const double quad = (residuals.transpose() * f.inverse).cwiseProduct(residuals.transpose()).sum();
  return f.log_det + quad / static_cast<double>(n);
}

double gaussian_neg2ll(const Design& design, const Eigen::VectorXd& theta,
                       std::span<const Eigen::MatrixXd> sigmas)
{
  return gaussian_neg2ll(residuals_at(design, theta), sigmas);
}

double aic_penalty(int p, int d, int n)
{
  return 2.0 * p * d * d / static_cast<double>(n);
}

std::string to_string(Criterion criterion)
{
  switch (criterion) {
    case Criterion::AIC:
      return "aic";
    case Criterion::AIC_ALS:
      return "aic_als";
    case Criterion::AIC_GLS:
      return "aic_gls";
  }
  return "?";
}

std::optional<double> CriterionTrace::value(Criterion criterion) const
{
  switch (criterion) {
    case Criterion::AIC:
      return aic;
    case Criterion::AIC_ALS:
      return aic_als;
    case Criterion::AIC_GLS:
      return aic_gls;
  }
  return std::nullopt;
}

double criterion(const TimeSeries& ts, int p, Criterion which, const CriterionContext& context)
{
  const Design design = build_design(ts, p);
  const double penalty = aic_penalty(p, design.dim, design.size());
  switch (which) {
    case Criterion::AIC: {
      const EstimationResult ols = ols_estimate(design);
      return gaussian_neg2ll(ols.residuals, ols.sigma_u_hat) + penalty;
    }
    case Criterion::AIC_ALS: {
      if (context.variance_estimate == nullptr) {
        throw std::invalid_argument("criterion: AIC_ALS needs a variance path estimate");
      }
      const EstimationResult als = als_estimate(design, *context.variance_estimate);
      return gaussian_neg2ll(als.residuals, context.variance_estimate->matrices) + penalty;
    }
    case Criterion::AIC_GLS: {
      if (context.true_path == nullptr) {
        throw std::invalid_argument("criterion: AIC_GLS needs the true variance path");
      }
      const auto sigmas = sample_variance_path(*context.true_path, design.size());
      const EstimationResult gls = gls_estimate(design, sigmas);
      return gaussian_neg2ll(gls.residuals, sigmas) + penalty;
    }
  }
  throw std::logic_error("criterion: unknown kind");
}

int argmin_first(std::span<const double> values)
{
  if (values.empty()) {
    throw std::invalid_argument("argmin_first: empty range");
  }
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i) {
    if (values[i] < values[best]) {
      best = i;
    }
  }
  return best;
}

std::optional<int> SelectionReport::selected(Criterion criterion) const
{
  switch (criterion) {
    case Criterion::AIC:
      return selected_aic;
    case Criterion::AIC_ALS:
      return selected_als;
    case Criterion::AIC_GLS:
      return selected_gls;
  }
  return std::nullopt;
}

bool SelectionReport::unreliable(Criterion criterion) const
{
  const auto p = selected(criterion);
  if (!p) {
    return false;
  }
  return *p > cap || (*p == p_max && p_max <= cap);
}

SelectionReport select_order(const TimeSeries& ts, const SelectionOptions& options)
{
  if (options.p_max < 1) {
    throw std::invalid_argument("select_order: p_max must be at least 1");
  }
  if (ts.presample() < options.p_max) {
    throw std::invalid_argument("select_order: series needs at least p_max presample values");
  }
  if (options.true_path != nullptr && options.true_path->dim() != ts.dim()) {
    throw std::invalid_argument("select_order: true variance path has the wrong dimension");
  }
  const int n = ts.size();
  const int d = ts.dim();

  SelectionReport report;
  report.dim = d;
  report.sample_size = n;
  report.p_max = options.p_max;
  report.cap = options.cap;

  if (options.bandwidth) {
    report.bandwidth = *options.bandwidth;
  } else {
    const EstimationResult top = ols_estimate(build_design(ts, options.p_max));
    const BandwidthGrid grid = options.grid.value_or(BandwidthGrid::for_sample_size(n));
    report.bandwidth = cross_validate_bandwidth(top.residuals, grid, options.kernel).bandwidth;
  }

  std::vector<Eigen::MatrixXd> true_sigmas;
  if (options.true_path != nullptr) {
    true_sigmas = sample_variance_path(*options.true_path, n);
  }

  std::vector<double> aic;
  std::vector<double> als;
  std::vector<double> gls;
  for (int p = 1; p <= options.p_max; ++p) {
    const Design design = build_design(ts, p);
    const double penalty = aic_penalty(p, d, n);
    CriterionTrace trace;
    trace.order = p;

    const EstimationResult ols = ols_estimate(design);
    trace.neg2ll_ols = gaussian_neg2ll(ols.residuals, ols.sigma_u_hat);
    trace.aic = trace.neg2ll_ols + penalty;

    const VariancePathEstimate est =
      estimate_variance_path(ols.residuals, report.bandwidth, options.kernel);
    const EstimationResult adaptive = als_estimate(design, est);
    trace.neg2ll_als = gaussian_neg2ll(adaptive.residuals, est.matrices);
    trace.aic_als = trace.neg2ll_als + penalty;

    if (!true_sigmas.empty()) {
      const EstimationResult g = gls_estimate(design, true_sigmas);
      trace.neg2ll_gls = gaussian_neg2ll(g.residuals, true_sigmas);
      trace.aic_gls = *trace.neg2ll_gls + penalty;
      gls.push_back(*trace.aic_gls);
    }
    aic.push_back(trace.aic);
    als.push_back(trace.aic_als);
    report.traces.push_back(trace);
  }
  report.selected_aic = argmin_first(aic) + 1;
  report.selected_als = argmin_first(als) + 1;
  if (!gls.empty()) {
    report.selected_gls = argmin_first(gls) + 1;
  }
  return report;
}

} // namespace tvvar
