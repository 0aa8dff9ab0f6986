#include "tvvar/partial.hpp"

#include "tvvar/error.hpp"
#include "tvvar/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tvvar {

namespace {

Eigen::MatrixXd spectral_power(const Eigen::MatrixXd& m, double power)
{
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("matrix square root: matrix must be square");
  }
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
    throw NumericalError("matrix square root: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(linalg::symmetrize(m));
  const Eigen::VectorXd& ev = es.eigenvalues();
  if (!(ev.minCoeff() > 0.0)) {
    throw NumericalError("matrix square root: matrix is not positive definite");
  }
  const Eigen::VectorXd scaled = ev.array().pow(power).matrix();
  return linalg::symmetrize(es.eigenvectors() * scaled.asDiagonal() *
                            es.eigenvectors().transpose());
}

} // namespace

Eigen::MatrixXd matrix_sqrt_pd(const Eigen::MatrixXd& m)
{
  return spectral_power(m, 0.5);
}

Eigen::MatrixXd matrix_inv_sqrt_pd(const Eigen::MatrixXd& m)
{
  return spectral_power(m, -0.5);
}

std::string to_string(BoundsMethod method)
{
  switch (method) {
    case BoundsMethod::Standard:
      return "standard";
    case BoundsMethod::OLS:
      return "ols";
    case BoundsMethod::ALS:
      return "als";
    case BoundsMethod::GLS:
      return "gls";
  }
  return "?";
}

BoundsMethod bounds_method_from_name(const std::string& name)
{
  if (name == "standard" || name == "s") {
    return BoundsMethod::Standard;
  }
  if (name == "ols") {
    return BoundsMethod::OLS;
  }
  if (name == "als") {
    return BoundsMethod::ALS;
  }
  if (name == "gls") {
    return BoundsMethod::GLS;
  }
  throw std::invalid_argument("unknown bounds method '" + name +
                              "' (expected standard, ols, als or gls)");
}

LongRunCovariances long_run_covariances(const TimeSeries& ts, int p)
{
  if (p < 1) {
    throw std::invalid_argument("long_run_covariances: lag must be at least 1");
  }
  if (ts.presample() < p) {
    throw std::invalid_argument("long_run_covariances: presample is shorter than the lag");
  }
  const int n = ts.size();
  const int d = ts.dim();
  const Eigen::MatrixXd x = ts.values().middleCols(ts.presample(), n);
  if (p == 1) {
    const Eigen::MatrixXd s = linalg::symmetrize(x * x.transpose() / static_cast<double>(n));
    return {s, s};
  }

  LongRunCovariances out;
  out.sigma_u = ols_estimate(build_design(ts, p - 1)).sigma_u_hat;

  // Backward regression: X_{t−p} on (X_{t−p+1}', ..., X_{t−1}')'.
  const int offset = ts.presample();
  Eigen::MatrixXd y(d, n);
  Eigen::MatrixXd z(static_cast<Eigen::Index>(d) * (p - 1), n);
  for (int t = 0; t < n; ++t) {
    y.col(t) = ts.values().col(offset + t - p);
    for (int j = 1; j < p; ++j) {
      z.block((j - 1) * d, t, d, 1) = ts.values().col(offset + t - p + j);
    }
  }
  const double nn = n;
  const Eigen::MatrixXd syy = y * y.transpose() / nn;
  const Eigen::MatrixXd syz = y * z.transpose() / nn;
  const Eigen::MatrixXd szz = z * z.transpose() / nn;
  out.sigma_w = linalg::symmetrize(syy - syz * linalg::symmetric_solve(szz, syz.transpose()));
  return out;
}

namespace {

double resolve_bandwidth(const TimeSeries& ts, const PartialOptions& options)
{
  if (options.bandwidth) {
    return *options.bandwidth;
  }
  const EstimationResult top = ols_estimate(build_design(ts, options.p_max));
  const BandwidthGrid grid = options.grid.value_or(BandwidthGrid::for_sample_size(ts.size()));
  return cross_validate_bandwidth(top.residuals, grid, options.kernel).bandwidth;
}

// θ̂ and asymptotic covariance of √n θ̂ for each requested method at one lag.
struct LagFit
{
  std::map<BoundsMethod, std::pair<Eigen::VectorXd, Eigen::MatrixXd>> by_method;
};

LagFit fit_lag(const TimeSeries& ts, int h, double bandwidth, const PartialOptions& options,
               const std::vector<Eigen::MatrixXd>& true_sigmas)
{
  const Design design = build_design(ts, h);
  const EstimationResult ols = ols_estimate(design);
  const VariancePathEstimate est =
    estimate_variance_path(ols.residuals, bandwidth, options.kernel);
  const LambdaEstimates lam = lambda_estimates(design, ols.residuals, est, ols.sigma_u_hat);

  LagFit fit;
  for (BoundsMethod m : options.methods) {
    switch (m) {
      case BoundsMethod::Standard:
        fit.by_method[m] = {ols.theta, lam.avar_std};
        break;
      case BoundsMethod::OLS:
        fit.by_method[m] = {ols.theta, lam.avar_ols};
        break;
      case BoundsMethod::ALS:
        fit.by_method[m] = {als_estimate(design, est).theta, lam.avar_als};
        break;
      case BoundsMethod::GLS: {
        if (true_sigmas.empty()) {
          throw std::invalid_argument("GLS bounds need the true variance path");
        }
        const EstimationResult gls = gls_estimate(design, true_sigmas);
        fit.by_method[m] = {gls.theta, linalg::symmetric_inverse(gls.normal_matrix)};
        break;
      }
    }
  }
  return fit;
}

Eigen::VectorXd half_widths(const Eigen::MatrixXd& covariance, int n)
{
  return kBoundQuantile *
         (covariance.diagonal().cwiseMax(0.0) / static_cast<double>(n)).cwiseSqrt();
}

void validate(const TimeSeries& ts, const PartialOptions& options, int max_lag)
{
  if (max_lag < 1) {
    throw std::invalid_argument("partial: lag must be at least 1");
  }
  if (ts.presample() < std::max(max_lag, options.bandwidth ? 0 : options.p_max)) {
    throw std::invalid_argument("partial: series needs a presample at least as long as p_max");
  }
  if (options.methods.empty()) {
    throw std::invalid_argument("partial: no bounds method requested");
  }
  if (options.true_path != nullptr && options.true_path->dim() != ts.dim()) {
    throw std::invalid_argument("partial: true variance path has the wrong dimension");
  }
}

std::vector<Eigen::MatrixXd> true_sigmas_for(const TimeSeries& ts, const PartialOptions& options)
{
  if (options.true_path == nullptr) {
    return {};
  }
  return sample_variance_path(*options.true_path, ts.size());
}

PamLag pam_from_fit(const LagFit& fit, int h, int d, int n)
{
  const Eigen::Index block = static_cast<Eigen::Index>(d) * d;
  const Eigen::Index start = (h - 1) * block;
  PamLag lag;
  lag.lag = h;
  for (const auto& [method, pair] : fit.by_method) {
    const auto& [theta, avar] = pair;
    const Eigen::VectorXd est = theta.segment(start, block);
    const Eigen::VectorXd hw = half_widths(avar.block(start, start, block, block), n);
    lag.by_method[method] = {Eigen::Map<const Eigen::MatrixXd>(est.data(), d, d),
                             Eigen::Map<const Eigen::MatrixXd>(hw.data(), d, d)};
  }
  return lag;
}

PcmVector pcm_from_fit(const LagFit& fit, const LongRunCovariances& lr, int h, int d, int n)
{
  const Eigen::Index block = static_cast<Eigen::Index>(d) * d;
  const Eigen::Index start = (h - 1) * block;
  const Eigen::MatrixXd k =
    linalg::kron(matrix_inv_sqrt_pd(lr.sigma_u), matrix_sqrt_pd(lr.sigma_w));
  PcmVector out;
  out.lag = h;
  out.dim = d;
  for (const auto& [method, pair] : fit.by_method) {
    const auto& [theta, avar] = pair;
    BoundedVector v;
    v.estimate = k * theta.segment(start, block);
    v.covariance = linalg::symmetrize(k * avar.block(start, start, block, block) * k);
    v.half_width = half_widths(v.covariance, n);
    out.by_method[method] = std::move(v);
  }
  return out;
}

} // namespace

PartialAnalysis partial_analysis(const TimeSeries& ts, const PartialOptions& options)
{
  validate(ts, options, options.p_max);
  const double bandwidth = resolve_bandwidth(ts, options);
  const auto sigmas = true_sigmas_for(ts, options);
  const int d = ts.dim();
  const int n = ts.size();

  PartialAnalysis out;
  out.pam.dim = d;
  out.pam.bandwidth = bandwidth;
  for (int h = 1; h <= options.p_max; ++h) {
    const LagFit fit = fit_lag(ts, h, bandwidth, options, sigmas);
    out.pam.lags.push_back(pam_from_fit(fit, h, d, n));
    out.pcm.push_back(pcm_from_fit(fit, long_run_covariances(ts, h), h, d, n));
  }
  return out;
}

PamSequence pam_sequence(const TimeSeries& ts, const PartialOptions& options)
{
  validate(ts, options, options.p_max);
  const double bandwidth = resolve_bandwidth(ts, options);
  const auto sigmas = true_sigmas_for(ts, options);
  PamSequence out;
  out.dim = ts.dim();
  out.bandwidth = bandwidth;
  for (int h = 1; h <= options.p_max; ++h) {
    out.lags.push_back(
      pam_from_fit(fit_lag(ts, h, bandwidth, options, sigmas), h, ts.dim(), ts.size()));
  }
  return out;
}

PcmVector pcm(const TimeSeries& ts, int p, const PartialOptions& options)
{
  PartialOptions opts = options;
  opts.p_max = std::max(options.p_max, p);
  validate(ts, opts, p);
  const double bandwidth = resolve_bandwidth(ts, opts);
  const LagFit fit = fit_lag(ts, p, bandwidth, opts, true_sigmas_for(ts, opts));
  return pcm_from_fit(fit, long_run_covariances(ts, p), p, ts.dim(), ts.size());
}

} // namespace tvvar
