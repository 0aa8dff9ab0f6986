#include "support.hpp"

#include "tvvar/montecarlo.hpp"
#include "tvvar/rng.hpp"
#include "tvvar/varproc.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace tvvar;

TEST_CASE("companion matrix of small models")
{
  const VarModel ar1(std::vector<Eigen::MatrixXd>{Eigen::MatrixXd::Constant(1, 1, 0.5)});
  CHECK(companion_matrix(ar1)(0, 0) == 0.5);
  CHECK(companion_matrix(ar1).rows() == 1);

  const VarModel nil(std::vector<Eigen::MatrixXd>{Eigen::MatrixXd::Zero(1, 1),
                                                  Eigen::MatrixXd::Zero(1, 1)});
  Eigen::MatrixXd expected(2, 2);
  expected << 0, 0, 1, 0;
  CHECK(companion_matrix(nil) == expected);
  CHECK(is_stable(nil).spectral_radius == doctest::Approx(0.0));
}

TEST_CASE("reference DGP companion structure and stability")
{
  const VarModel dgp = reference_dgp();
  const Eigen::MatrixXd c = companion_matrix(dgp);
  REQUIRE(c.rows() == 4);
  CHECK(c.block(0, 0, 2, 2) == dgp.coeff(1));
  CHECK(c.block(0, 2, 2, 2) == dgp.coeff(2));
  CHECK(c.block(2, 0, 2, 2) == Eigen::MatrixXd::Identity(2, 2));
  CHECK(c.block(2, 2, 2, 2) == Eigen::MatrixXd::Zero(2, 2));

  // Roots of det(A(z)) for the block-triangular DGP: the moduli of the
  // companion eigenvalues are max over the two scalar quadratics.
  double radius = 0.0;
  for (const auto& z : oracle::roots(oracle::reverse_characteristic(dgp.coeffs()))) {
    radius = std::max(radius, 1.0 / std::abs(z));
  }
  const Stability s = is_stable(dgp);
  CHECK(s.stable);
  CHECK(s.spectral_radius == doctest::Approx(radius).epsilon(1e-10));
  CHECK(s.spectral_radius < 1.0);
}

TEST_CASE("unit root and zero model")
{
  const VarModel unit(std::vector<Eigen::MatrixXd>{Eigen::MatrixXd::Ones(1, 1)});
  const Stability s = is_stable(unit);
  CHECK_FALSE(s.stable);
  CHECK(s.spectral_radius == doctest::Approx(1.0));

  const VarModel zero(2, {Eigen::MatrixXd::Zero(2, 2)});
  CHECK(is_stable(zero).stable);
  CHECK(is_stable(zero).spectral_radius == 0.0);
}

TEST_CASE("companion eigenvalues are reciprocal roots of det(A(z))")
{
  std::mt19937_64 rng = make_engine(2024);
  std::uniform_real_distribution<double> coef(-0.6, 0.6);
  int checked = 0;
  while (checked < 40) {
    const int d = 1 + static_cast<int>(rng() % 2);
    const int p = 1 + static_cast<int>(rng() % 3);
    std::vector<Eigen::MatrixXd> a;
    for (int i = 0; i < p; ++i) {
      Eigen::MatrixXd m(d, d);
      for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) {
          m(r, c) = coef(rng) / p;
        }
      }
      a.push_back(m);
    }
    const VarModel model(d, a);
    if (!is_stable(model).stable) {
      continue;
    }
    ++checked;
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion_matrix(model));
    std::vector<std::complex<double>> eig(es.eigenvalues().data(),
                                          es.eigenvalues().data() + es.eigenvalues().size());
    const auto z = oracle::roots(oracle::reverse_characteristic(a));
    // Every nonzero eigenvalue must match one reciprocal root.
    int nonzero = 0;
    for (const auto& lambda : eig) {
      if (std::abs(lambda) < 1e-6) {
        continue;
      }
      ++nonzero;
      double best = 1e300;
      for (const auto& root : z) {
        best = std::min(best, std::abs(lambda - 1.0 / root));
      }
      CHECK(best < 1e-8);
    }
    CHECK(nonzero <= static_cast<int>(z.size()));
  }
}

TEST_CASE("variance path values")
{
  const VariancePath smooth = VariancePath::smooth_trend(20.0, 20.0 / 3.0, 0.2);
  CHECK(smooth.at(1e-12)(0, 0) == doctest::Approx(1.04));
  CHECK(smooth.at(1e-12)(1, 1) == doctest::Approx(1.0));
  CHECK(smooth.at(1.0)(0, 0) == doctest::Approx(21.0 * 1.04));

  const VariancePath brk = VariancePath::abrupt_break(20.0, 20.0 / 3.0, 0.2);
  Eigen::MatrixXd base(2, 2);
  base << 1.04, 0.2, 0.2, 1.04;
  CHECK((brk.at(0.25) - base).norm() < 1e-14);
  CHECK(brk.at(0.75)(0, 0) == doctest::Approx(20.0 * 1.04));
  CHECK(brk.at(0.75)(0, 1) == doctest::Approx(0.2 * std::sqrt(20.0 * 20.0 / 3.0)));
  CHECK(brk.at(0.75)(0, 1) == brk.at(0.75)(1, 0));

  CHECK_THROWS_AS(smooth.at(0.0), std::invalid_argument);
  CHECK_THROWS_AS(smooth.at(1.5), std::invalid_argument);
}

TEST_CASE("every path kind is symmetric PD on a dense grid")
{
  std::vector<VariancePath> paths{
    VariancePath::constant(Eigen::MatrixXd::Identity(2, 2)),
    VariancePath::smooth_trend(20.0, 20.0 / 3.0, 0.2),
    VariancePath::abrupt_break(20.0, 20.0 / 3.0, 0.2),
    VariancePath::scalar(1, [](double r) { return 1.0 + 19.0 * r; }),
    VariancePath::piecewise(
      2, {{0.3, [](double) { return Eigen::MatrixXd::Identity(2, 2); }},
          {1.0, [](double r) { return Eigen::MatrixXd::Identity(2, 2) * (1.0 + r); }}}),
  };
  for (const auto& path : paths) {
    for (int k = 1; k <= 1000; ++k) {
      const Eigen::MatrixXd s = path.at(k / 1000.0);
      CHECK((s - s.transpose()).cwiseAbs().maxCoeff() < 1e-12);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
      CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
  }
}

TEST_CASE("non-PD paths are rejected")
{
  CHECK_THROWS(VariancePath::smooth_trend(-3.0, 20.0 / 3.0, 0.2));
  CHECK_THROWS(VariancePath::scalar(1, [](double r) { return 0.5 - r; }));
  CHECK_THROWS(VariancePath::constant(-Eigen::MatrixXd::Identity(2, 2)));
}

TEST_CASE("white noise sample covariance")
{
  const VarModel zero(2, {Eigen::MatrixXd::Zero(2, 2)});
  const TimeSeries ts =
    simulate(zero, VariancePath::constant(Eigen::MatrixXd::Identity(2, 2)), 10000, 11);
  const Eigen::MatrixXd x = ts.values();
  const Eigen::MatrixXd cov = x * x.transpose() / 10000.0;
  CHECK((cov - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("AR(1) stationary variance")
{
  const VarModel ar(std::vector<Eigen::MatrixXd>{Eigen::MatrixXd::Constant(1, 1, 0.5)});
  const TimeSeries ts =
    simulate(ar, VariancePath::constant(Eigen::MatrixXd::Identity(1, 1)), 10000, 5);
  const Eigen::RowVectorXd x = ts.values().row(0);
  const double var = x.squaredNorm() / x.size() - std::pow(x.mean(), 2);
  CHECK(var == doctest::Approx(4.0 / 3.0).epsilon(0.07 / (4.0 / 3.0)));
}

TEST_CASE("simulation is deterministic in the seed")
{
  const VariancePath path = VariancePath::smooth_trend(20.0, 20.0 / 3.0, 0.2);
  const TimeSeries a = simulate(reference_dgp(), path, 300, 99, 5);
  const TimeSeries b = simulate(reference_dgp(), path, 300, 99, 5);
  const TimeSeries c = simulate(reference_dgp(), path, 300, 100, 5);
  CHECK(a.values() == b.values());
  CHECK(a.values() != c.values());
  CHECK(a.size() == 300);
  CHECK(a.presample() == 5);
}

TEST_CASE("abrupt break scales the innovation variance by gamma1")
{
  const int n = 4000;
  const VarModel dgp = reference_dgp();
  const TimeSeries ts = simulate(dgp, VariancePath::abrupt_break(20.0, 20.0 / 3.0, 0.2), n, 3, 2);
  double before = 0.0;
  double after = 0.0;
  for (int t = 1; t <= n; ++t) {
    const Eigen::VectorXd u = ts.at(t) - dgp.coeff(1) * ts.at(t - 1) - dgp.coeff(2) * ts.at(t - 2);
    (t <= n / 2 ? before : after) += u(0) * u(0);
  }
  CHECK(after / before == doctest::Approx(20.0).epsilon(0.15));
}

TEST_CASE("theta round trip")
{
  const VarModel dgp = reference_dgp();
  const VarModel back = VarModel::from_theta(2, dgp.theta());
  CHECK(back.coeff(1) == dgp.coeff(1));
  CHECK(back.coeff(2) == dgp.coeff(2));
  CHECK(dgp.theta()(1) == dgp.coeff(1)(1, 0)); // column stacking
  CHECK(dgp.padded(4).order() == 4);
  CHECK(dgp.padded(4).coeff(4) == Eigen::MatrixXd::Zero(2, 2));
}
