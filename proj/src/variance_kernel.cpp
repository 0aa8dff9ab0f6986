#include "tvvar/variance_kernel.hpp"

#include "tvvar/error.hpp"
#include "tvvar/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace tvvar {

Kernel Kernel::from_name(const std::string& name)
{
  if (name == "gaussian") {
    return Kernel(Type::Gaussian);
  }
  if (name == "epanechnikov") {
    return Kernel(Type::Epanechnikov);
  }
  throw std::invalid_argument("unknown kernel '" + name + "' (expected gaussian or epanechnikov)");
}

std::string Kernel::name() const
{
  return type_ == Type::Gaussian ? "gaussian" : "epanechnikov";
}

double Kernel::operator()(double z) const
{
  switch (type_) {
    case Type::Gaussian:
      return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    case Type::Epanechnikov:
      return std::abs(z) < 1.0 ? 0.75 * (1.0 - z * z) : 0.0;
  }
  return 0.0;
}

namespace {

// Raw kernel values K(m/(nb)) indexed by the lag m = |t − i|.
Eigen::VectorXd lag_profile(int n, double b, const Kernel& kernel)
{
  if (!(b > 0.0) || n < 1) {
    throw std::invalid_argument("kernel smoothing: need n >= 1 and b > 0");
  }
  Eigen::VectorXd k(n);
  const double scale = static_cast<double>(n) * b;
  k(0) = 0.0;
  for (int m = 1; m < n; ++m) {
    k(m) = kernel(m / scale);
  }
  return k;
}

// Un-normalized weight column for time index t (0-based).
void fill_weights(const Eigen::VectorXd& profile, int t, Eigen::VectorXd& w)
{
  const int n = static_cast<int>(profile.size());
  for (int i = 0; i < n; ++i) {
    w(i) = profile(std::abs(t - i));
  }
}

// Column i holds vec(û_i û_iᵀ).
Eigen::MatrixXd outer_products(const Eigen::MatrixXd& residuals)
{
  const Eigen::Index d = residuals.rows();
  Eigen::MatrixXd out(d * d, residuals.cols());
  for (Eigen::Index i = 0; i < residuals.cols(); ++i) {
    Eigen::Map<Eigen::MatrixXd>(out.col(i).data(), d, d) =
      residuals.col(i) * residuals.col(i).transpose();
  }
  return out;
}

// Unfloored smoothed covariances, one vec(Σ̌_t) per column.
Eigen::MatrixXd smooth(const Eigen::MatrixXd& outer, double b, const Kernel& kernel)
{
  const int n = static_cast<int>(outer.cols());
  const Eigen::VectorXd profile = lag_profile(n, b, kernel);
  Eigen::MatrixXd out(outer.rows(), n);
  Eigen::VectorXd w(n);
  for (int t = 0; t < n; ++t) {
    fill_weights(profile, t, w);
    const double total = w.sum();
    if (!(total > 0.0)) {
      throw NumericalError("degenerate kernel weights: bandwidth too small for the kernel");
    }
    out.col(t) = outer * w / total;
  }
  return out;
}

} // namespace

Eigen::VectorXd kernel_weights(int t, int n, double b, const Kernel& kernel)
{
  if (t < 1 || t > n) {
    throw std::invalid_argument("kernel_weights: t must lie in [1, n]");
  }
  const Eigen::VectorXd profile = lag_profile(n, b, kernel);
  Eigen::VectorXd w(n);
  fill_weights(profile, t - 1, w);
  const double total = w.sum();
  if (!(total > 0.0)) {
    throw NumericalError("degenerate kernel weights: bandwidth too small for the kernel");
  }
  return w / total;
}

BandwidthGrid BandwidthGrid::for_sample_size(int n)
{
  if (n < 1) {
    throw std::invalid_argument("BandwidthGrid: n must be positive");
  }
  return BandwidthGrid{std::pow(static_cast<double>(n), -0.2)};
}

std::vector<double> BandwidthGrid::values() const
{
  if (!(base > 0.0) || !(c_min > 0.0) || points < 1 || !(c_max > c_min || (points == 1 && c_max == c_min))) {
    throw std::invalid_argument("BandwidthGrid: need base > 0, 0 < c_min < c_max, points >= 1");
  }
  std::vector<double> out;
  if (points == 1) {
    out.push_back(c_min * base);
    return out;
  }
  const double lo = std::log(c_min * base);
  const double hi = std::log(c_max * base);
  for (int k = 0; k < points; ++k) {
    out.push_back(std::exp(lo + (hi - lo) * k / (points - 1)));
  }
  out.front() = c_min * base;
  out.back() = c_max * base;
  return out;
}

double default_variance_floor(const Eigen::MatrixXd& residuals)
{
  const double n = static_cast<double>(residuals.cols());
  const double trace = residuals.squaredNorm() / n;
  return 1e-6 * trace / static_cast<double>(residuals.rows());
}

VariancePathEstimate estimate_variance_path(const Eigen::MatrixXd& residuals, double b,
                                            const Kernel& kernel, double floor)
{
  const Eigen::Index d = residuals.rows();
  if (residuals.cols() < d + 1) {
    throw std::invalid_argument("estimate_variance_path: need at least d + 1 residuals");
  }
  if (!(floor >= 0.0)) {
    throw std::invalid_argument("estimate_variance_path: floor must be nonnegative");
  }
  const Eigen::MatrixXd smoothed = smooth(outer_products(residuals), b, kernel);
  VariancePathEstimate est;
  est.bandwidth = b;
  est.floor = floor;
  est.matrices.reserve(smoothed.cols());
  for (Eigen::Index t = 0; t < smoothed.cols(); ++t) {
    const Eigen::MatrixXd s =
      linalg::symmetrize(Eigen::Map<const Eigen::MatrixXd>(smoothed.col(t).data(), d, d));
    est.matrices.push_back(linalg::floor_eigenvalues(s, floor));
  }
  return est;
}

VariancePathEstimate estimate_variance_path(const Eigen::MatrixXd& residuals, double b,
                                            const Kernel& kernel)
{
  return estimate_variance_path(residuals, b, kernel, default_variance_floor(residuals));
}

double cv_score(const Eigen::MatrixXd& residuals, double b, const Kernel& kernel)
{
  const Eigen::MatrixXd outer = outer_products(residuals);
  return (outer - smooth(outer, b, kernel)).squaredNorm();
}

BandwidthChoice cross_validate_bandwidth(const Eigen::MatrixXd& residuals,
                                         const BandwidthGrid& grid, const Kernel& kernel)
{
  BandwidthChoice choice;
  choice.candidates = grid.values();
  const Eigen::MatrixXd outer = outer_products(residuals);
  double best = std::numeric_limits<double>::infinity();
  choice.bandwidth = choice.candidates.front();
  for (double b : choice.candidates) {
    double score = std::numeric_limits<double>::infinity();
    try {
      score = (outer - smooth(outer, b, kernel)).squaredNorm();
    } catch (const NumericalError&) {
      // compact kernel with no neighbours inside the window
    }
    choice.scores.push_back(score);
    if (score < best) {
      best = score;
      choice.bandwidth = b;
    }
  }
  if (!std::isfinite(best)) {
    throw NumericalError("cross_validate_bandwidth: every grid bandwidth is degenerate");
  }
  return choice;
}

} // namespace tvvar
