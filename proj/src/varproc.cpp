#include "tvvar/varproc.hpp"

#include "tvvar/error.hpp"
#include "tvvar/linalg.hpp"
#include "tvvar/rng.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace tvvar {

VarModel::VarModel(int dim)
  : dim_(dim)
{
  if (dim < 1) {
    throw std::invalid_argument("VarModel: dimension must be positive");
  }
}

namespace {

int leading_dim(const std::vector<Eigen::MatrixXd>& coeffs)
{
  return coeffs.empty() ? 0 : static_cast<int>(coeffs.front().rows());
}

} // namespace

VarModel::VarModel(std::vector<Eigen::MatrixXd> coeffs)
  : dim_(leading_dim(coeffs))
  , coeffs_(std::move(coeffs))
{
  *this = VarModel(dim_, std::move(coeffs_));
}

VarModel::VarModel(int dim, std::vector<Eigen::MatrixXd> coeffs)
  : dim_(dim)
  , coeffs_(std::move(coeffs))
{
  if (dim < 1) {
    throw std::invalid_argument("VarModel: dimension must be positive");
  }
  for (const auto& a : coeffs_) {
    if (a.rows() != dim || a.cols() != dim) {
      throw std::invalid_argument("VarModel: coefficient matrices must be d x d");
    }
    if (!a.allFinite()) {
      throw std::invalid_argument("VarModel: non-finite coefficient");
    }
  }
}

VarModel VarModel::from_theta(int dim, const Eigen::VectorXd& theta)
{
  const Eigen::Index block = static_cast<Eigen::Index>(dim) * dim;
  if (dim < 1 || theta.size() % block != 0) {
    throw std::invalid_argument("VarModel::from_theta: length is not a multiple of d^2");
  }
  std::vector<Eigen::MatrixXd> coeffs;
  for (Eigen::Index k = 0; k < theta.size() / block; ++k) {
    coeffs.emplace_back(Eigen::Map<const Eigen::MatrixXd>(theta.data() + k * block, dim, dim));
  }
  return VarModel(dim, std::move(coeffs));
}

Eigen::VectorXd VarModel::theta() const
{
  const Eigen::Index block = static_cast<Eigen::Index>(dim_) * dim_;
  Eigen::VectorXd out(block * order());
  for (int k = 0; k < order(); ++k) {
    out.segment(k * block, block) = linalg::vec(coeffs_[k]);
  }
  return out;
}

VarModel VarModel::padded(int p) const
{
  if (p < order()) {
    throw std::invalid_argument("VarModel::padded: cannot shrink the order");
  }
  std::vector<Eigen::MatrixXd> coeffs = coeffs_;
  coeffs.resize(p, Eigen::MatrixXd::Zero(dim_, dim_));
  return VarModel(dim_, std::move(coeffs));
}

Eigen::MatrixXd companion_matrix(const VarModel& model)
{
  const int d = model.dim();
  const int p = model.order();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(d * p, d * p);
  for (int k = 0; k < p; ++k) {
    c.block(0, k * d, d, d) = model.coeffs()[k];
  }
  if (p > 1) {
    c.block(d, 0, d * (p - 1), d * (p - 1)).setIdentity();
  }
  return c;
}

Stability is_stable(const VarModel& model, double tol)
{
  if (model.order() == 0) {
    return {true, 0.0};
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion_matrix(model), false);
  const double radius = es.eigenvalues().cwiseAbs().maxCoeff();
  return {radius <= 1.0 - tol, radius};
}

namespace {

void require_pd_on_grid(const VariancePath& path)
{
  constexpr int kGrid = 1000;
  for (int i = 1; i <= kGrid; ++i) {
    const double r = static_cast<double>(i) / kGrid;
    const Eigen::MatrixXd s = path.at(r);
    if (!s.allFinite() || linalg::min_eigenvalue(linalg::symmetrize(s)) <= 0.0) {
      throw std::invalid_argument("VariancePath: Sigma(r) is not positive definite at r = " +
                                  std::to_string(r));
    }
  }
}

Eigen::MatrixXd bivariate(double v1, double v2, double rho, bool inflate_second)
{
  Eigen::MatrixXd s(2, 2);
  const double rho2 = 1.0 + rho * rho;
  s(0, 0) = v1 * rho2;
  s(1, 1) = inflate_second ? v2 * rho2 : v2;
  s(0, 1) = s(1, 0) = rho * std::sqrt(v1) * std::sqrt(v2);
  return s;
}

} // namespace

VariancePath VariancePath::constant(const Eigen::MatrixXd& sigma)
{
  if (sigma.rows() != sigma.cols() || sigma.rows() < 1) {
    throw std::invalid_argument("VariancePath::constant: matrix must be square");
  }
  VariancePath path;
  path.kind_ = Kind::Constant;
  path.dim_ = static_cast<int>(sigma.rows());
  path.constant_ = sigma;
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("VariancePath::constant: matrix must be symmetric");
  }
  require_pd_on_grid(path);
  return path;
}

VariancePath VariancePath::smooth_trend(double gamma1, double gamma2, double rho)
{
  VariancePath path;
  path.kind_ = Kind::SmoothTrend;
  path.dim_ = 2;
  path.gamma1_ = gamma1;
  path.gamma2_ = gamma2;
  path.rho_ = rho;
  require_pd_on_grid(path);
  return path;
}

VariancePath VariancePath::abrupt_break(double gamma1, double gamma2, double rho,
                                        double break_fraction)
{
  if (!(break_fraction > 0.0 && break_fraction < 1.0)) {
    throw std::invalid_argument("VariancePath::abrupt_break: break must lie in (0, 1)");
  }
  VariancePath path;
  path.kind_ = Kind::AbruptBreak;
  path.dim_ = 2;
  path.gamma1_ = gamma1;
  path.gamma2_ = gamma2;
  path.rho_ = rho;
  path.break_ = break_fraction;
  require_pd_on_grid(path);
  return path;
}

VariancePath VariancePath::piecewise(int dim, std::vector<Segment> segments)
{
  if (dim < 1 || segments.empty()) {
    throw std::invalid_argument("VariancePath::piecewise: need a dimension and segments");
  }
  double prev = 0.0;
  for (const auto& seg : segments) {
    if (!(seg.end > prev) || !seg.sigma) {
      throw std::invalid_argument("VariancePath::piecewise: segment ends must increase");
    }
    prev = seg.end;
  }
  if (prev != 1.0) {
    throw std::invalid_argument("VariancePath::piecewise: last segment must end at 1");
  }
  VariancePath path;
  path.kind_ = Kind::PiecewiseCustom;
  path.dim_ = dim;
  path.segments_ = std::move(segments);
  for (int i = 1; i <= 1000; ++i) {
    const Eigen::MatrixXd s = path.at(i / 1000.0);
    if (s.rows() != dim || s.cols() != dim ||
        (s - s.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
      throw std::invalid_argument("VariancePath::piecewise: segment returned a non-symmetric "
                                  "or wrongly sized matrix");
    }
  }
  require_pd_on_grid(path);
  return path;
}

VariancePath VariancePath::scalar(int dim, std::function<double(double)> sigma2)
{
  return piecewise(dim, {{1.0, [dim, f = std::move(sigma2)](double r) {
                            return Eigen::MatrixXd(f(r) * Eigen::MatrixXd::Identity(dim, dim));
                          }}});
}

Eigen::MatrixXd VariancePath::at(double r) const
{
  if (!(r > 0.0 && r <= 1.0)) {
    throw std::invalid_argument("VariancePath::at: r must lie in (0, 1]");
  }
  switch (kind_) {
    case Kind::Constant:
      return constant_;
    case Kind::SmoothTrend:
      return bivariate(1.0 + gamma1_ * r, 1.0 + gamma2_ * r, rho_, false);
    case Kind::AbruptBreak: {
      const bool after = r >= break_;
      const double f1 = after ? gamma1_ - 1.0 : 0.0;
      const double f2 = after ? gamma2_ - 1.0 : 0.0;
      return bivariate(1.0 + f1, 1.0 + f2, rho_, true);
    }
    case Kind::PiecewiseCustom:
      for (const auto& seg : segments_) {
        if (r <= seg.end) {
          return seg.sigma(r);
        }
      }
      return segments_.back().sigma(r);
  }
  throw std::logic_error("VariancePath: unknown kind");
}

std::vector<double> VariancePath::breakpoints() const
{
  std::vector<double> out;
  if (kind_ == Kind::AbruptBreak) {
    out.push_back(break_);
  } else if (kind_ == Kind::PiecewiseCustom) {
    for (std::size_t i = 0; i + 1 < segments_.size(); ++i) {
      out.push_back(segments_[i].end);
    }
  }
  return out;
}

TimeSeries::TimeSeries(Eigen::MatrixXd values, int presample)
  : values_(std::move(values))
  , presample_(presample)
{
  if (presample < 0 || presample > values_.cols()) {
    throw std::invalid_argument("TimeSeries: presample length out of range");
  }
  if (values_.rows() < 1) {
    throw std::invalid_argument("TimeSeries: dimension must be positive");
  }
  if (!values_.allFinite()) {
    throw std::invalid_argument("TimeSeries: non-finite value");
  }
}

TimeSeries TimeSeries::with_presample(int presample) const
{
  return TimeSeries(values_, presample);
}

TimeSeries simulate(const VarModel& model, const VariancePath& path, int n, std::uint64_t seed,
                    int presample, int burn_in)
{
  if (n < 1 || presample < 0 || burn_in < 0) {
    throw std::invalid_argument("simulate: n must be positive and presample/burn-in non-negative");
  }
  if (model.dim() != path.dim()) {
    throw std::invalid_argument("simulate: model and variance path dimensions differ");
  }
  const Stability st = is_stable(model);
  if (!st.stable) {
    throw std::invalid_argument("simulate: model is not stable (spectral radius " +
                                std::to_string(st.spectral_radius) + ")");
  }

  const int d = model.dim();
  const int p = model.order();
  const int warmup = burn_in + presample;
  const int total = warmup + n;

  std::mt19937_64 engine = make_engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  const Eigen::MatrixXd h0 = linalg::cholesky_lower(path.at(1.0 / n));
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(d, total);
  Eigen::VectorXd eps(d);
  Eigen::MatrixXd h;
  for (int s = 0; s < total; ++s) {
    const bool retained = s >= warmup;
    const Eigen::MatrixXd* factor = &h0;
    if (retained) {
      h = linalg::cholesky_lower(path.at(static_cast<double>(s - warmup + 1) / n));
      factor = &h;
    }
    for (int k = 0; k < d; ++k) {
      eps(k) = normal(engine);
    }
    Eigen::VectorXd xt = *factor * eps;
    for (int lag = 1; lag <= p && s - lag >= 0; ++lag) {
      xt.noalias() += model.coeffs()[lag - 1] * x.col(s - lag);
    }
    x.col(s) = xt;
  }
  return TimeSeries(x.rightCols(presample + n), presample);
}

} // namespace tvvar
