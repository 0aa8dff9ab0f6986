#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

namespace tvvar {

/// Vector autoregression X_t = A_1 X_{t-1} + ... + A_p X_{t-p} + u_t.
class VarModel
{
public:
  /// Order-0 model (white noise) of dimension `dim`.
  explicit VarModel(int dim);
  /// Model with the given d×d coefficient matrices; `dim` is inferred.
  explicit VarModel(std::vector<Eigen::MatrixXd> coeffs);
  VarModel(int dim, std::vector<Eigen::MatrixXd> coeffs);

  /// Rebuild a model from θ = (vec(A_1)', ..., vec(A_p)')'.
  static VarModel from_theta(int dim, const Eigen::VectorXd& theta);

  int dim() const { return dim_; }
  int order() const { return static_cast<int>(coeffs_.size()); }
  const std::vector<Eigen::MatrixXd>& coeffs() const { return coeffs_; }
  const Eigen::MatrixXd& coeff(int lag) const { return coeffs_.at(lag - 1); }

  /// Column-stacked coefficient vector of length p·d².
  Eigen::VectorXd theta() const;

  /// Same process written as an order-`p` model (p ≥ order()), padding
  /// with zero coefficient matrices.
  VarModel padded(int p) const;

private:
  int dim_;
  std::vector<Eigen::MatrixXd> coeffs_;
};

/// dp×dp companion matrix: top block row A_1..A_p, identity sub-diagonal.
Eigen::MatrixXd companion_matrix(const VarModel& model);

struct Stability
{
  bool stable;
  double spectral_radius;
};

Stability is_stable(const VarModel& model, double tol = 1e-10);

/// Deterministic innovation covariance path r ↦ Σ(r) on (0, 1].
class VariancePath
{
public:
  enum class Kind { Constant, SmoothTrend, AbruptBreak, PiecewiseCustom };

  /// A piece of a custom path, valid on (previous end, end].
  struct Segment
  {
    double end;
    std::function<Eigen::MatrixXd(double)> sigma;
  };

  static VariancePath constant(const Eigen::MatrixXd& sigma);

  /// Bivariate smooth trend:
  ///   Σ11 = (1+γ1 r)(1+ρ²), Σ22 = 1+γ2 r, Σ12 = ρ (1+γ1 r)^½ (1+γ2 r)^½.
  static VariancePath smooth_trend(double gamma1, double gamma2, double rho);

  /// Bivariate common break at r = break_fraction, with f_i = (γ_i − 1)·1{r ≥ break}:
  ///   Σ_ii = (1+f_i)(1+ρ²), Σ12 = ρ (1+f1)^½ (1+f2)^½.
  static VariancePath abrupt_break(double gamma1, double gamma2, double rho,
                                   double break_fraction = 0.5);

  /// Piecewise path; segment ends must be strictly increasing and the last
  /// one must equal 1. Each piece must be Lipschitz on its sub-interval.
  static VariancePath piecewise(int dim, std::vector<Segment> segments);

  /// Scalar-times-identity path σ(r)² I_d.
  static VariancePath scalar(int dim, std::function<double(double)> sigma2);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }

  /// Σ(r). Throws std::invalid_argument outside (0, 1].
  Eigen::MatrixXd at(double r) const;

  /// Interior points of (0,1) where the path may be discontinuous.
  std::vector<double> breakpoints() const;

private:
  VariancePath() = default;

  Kind kind_ = Kind::Constant;
  int dim_ = 0;
  Eigen::MatrixXd constant_;
  double gamma1_ = 0.0;
  double gamma2_ = 0.0;
  double rho_ = 0.0;
  double break_ = 0.5;
  std::vector<Segment> segments_;
};

/// Observed sample: `presample` initial vectors followed by n vectors X_1..X_n,
/// stored column-wise.
class TimeSeries
{
public:
  TimeSeries(Eigen::MatrixXd values, int presample);

  int dim() const { return static_cast<int>(values_.rows()); }
  int presample() const { return presample_; }
  /// Effective sample size n.
  int size() const { return static_cast<int>(values_.cols()) - presample_; }
  int total_size() const { return static_cast<int>(values_.cols()); }

  /// X_t for t in [1 − presample, n].
  Eigen::VectorXd at(int t) const { return values_.col(presample_ + t - 1); }

  const Eigen::MatrixXd& values() const { return values_; }

  /// Same observations with a different split between presample and sample.
  TimeSeries with_presample(int presample) const;

private:
  Eigen::MatrixXd values_;
  int presample_;
};

/// Number of start-up draws discarded by simulate() unless overridden.
inline constexpr int kDefaultBurnIn = 200;

/// Simulate X_t with u_t = H_t ε_t, H_t the lower Cholesky factor of Σ(t/n)
/// and ε_t iid standard Gaussian. Burn-in and presample draws use Σ(1/n).
/// Output is a deterministic function of the arguments.
TimeSeries simulate(const VarModel& model, const VariancePath& path, int n, std::uint64_t seed,
                    int presample = 0, int burn_in = kDefaultBurnIn);

} // namespace tvvar
