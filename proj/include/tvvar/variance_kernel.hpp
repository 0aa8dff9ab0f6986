#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace tvvar {

/// Symmetric smoothing kernel: a bounded density, nondecreasing on (−∞, 0]
/// and decreasing on [0, ∞).
class Kernel
{
public:
  enum class Type { Gaussian, Epanechnikov };

  explicit Kernel(Type type = Type::Gaussian)
    : type_(type)
  {
  }

  static Kernel from_name(const std::string& name);

  Type type() const { return type_; }
  std::string name() const;
  double operator()(double z) const;

private:
  Type type_;
};

/// Normalized weights w_t1..w_tn for smoothing at time t (1-based) with
/// bandwidth b: w_ti ∝ K((t − i)/(n b)) for i ≠ t and w_tt = 0.
/// Throws NumericalError when every raw kernel value vanishes.
Eigen::VectorXd kernel_weights(int t, int n, double b, const Kernel& kernel);

/// Candidate bandwidths: `points` log-spaced values on [c_min b_n, c_max b_n].
struct BandwidthGrid
{
  double base;
  double c_min = 0.5;
  double c_max = 3.0;
  int points = 12;

  /// b_n = n^{-1/5} with the default constants.
  static BandwidthGrid for_sample_size(int n);

  std::vector<double> values() const;
};

/// Kernel estimate Σ̌_1..Σ̌_n of the innovation covariance path.
struct VariancePathEstimate
{
  std::vector<Eigen::MatrixXd> matrices;
  double bandwidth = 0.0;
  double floor = 0.0;

  int size() const { return static_cast<int>(matrices.size()); }
};

/// Default eigenvalue floor 10⁻⁶ tr(Σ̂_u)/d for residuals stored d×n.
double default_variance_floor(const Eigen::MatrixXd& residuals);

/// Σ̌_t = Σ_i w_ti û_i û_iᵀ with every eigenvalue raised to at least `floor` (0 leaves
/// negative round-off at zero).
/// `residuals` holds û_1..û_n as columns.
VariancePathEstimate estimate_variance_path(const Eigen::MatrixXd& residuals, double b,
                                            const Kernel& kernel, double floor);

/// Overload using default_variance_floor().
VariancePathEstimate estimate_variance_path(const Eigen::MatrixXd& residuals, double b,
                                            const Kernel& kernel = Kernel());

/// Leave-one-out loss Σ_t ‖û_t û_tᵀ − Σ̌_t(b)‖_F² (unfloored Σ̌_t).
double cv_score(const Eigen::MatrixXd& residuals, double b, const Kernel& kernel);

struct BandwidthChoice
{
  double bandwidth;
  std::vector<double> candidates;
  std::vector<double> scores;
};

/// Minimizer of cv_score over the grid; ties go to the smaller bandwidth.
BandwidthChoice cross_validate_bandwidth(const Eigen::MatrixXd& residuals,
                                         const BandwidthGrid& grid,
                                         const Kernel& kernel = Kernel());

} // namespace tvvar
