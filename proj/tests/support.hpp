// Independent oracles shared by the tests. Nothing here calls into the
// library except for data generation.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

using Poly = std::vector<double>; // coefficients, lowest degree first

inline Poly poly_mul(const Poly& a, const Poly& b)
{
  Poly out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      out[i + j] += a[i] * b[j];
    }
  }
  return out;
}

inline Poly poly_sub(Poly a, const Poly& b)
{
  if (b.size() > a.size()) {
    a.resize(b.size(), 0.0);
  }
  for (std::size_t i = 0; i < b.size(); ++i) {
    a[i] -= b[i];
  }
  return a;
}

/// det(I − A_1 z − ... − A_p z^p) for d ∈ {1, 2}.
inline Poly reverse_characteristic(const std::vector<Eigen::MatrixXd>& coeffs)
{
  const int d = static_cast<int>(coeffs.front().rows());
  auto entry = [&](int r, int c) {
    Poly q(coeffs.size() + 1, 0.0);
    q[0] = r == c ? 1.0 : 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      q[i + 1] = -coeffs[i](r, c);
    }
    return q;
  };
  if (d == 1) {
    return entry(0, 0);
  }
  return poly_sub(poly_mul(entry(0, 0), entry(1, 1)), poly_mul(entry(0, 1), entry(1, 0)));
}

/// All complex roots by Durand–Kerner iteration.
inline std::vector<std::complex<double>> roots(Poly p)
{
  while (p.size() > 1 && std::abs(p.back()) < 1e-300) {
    p.pop_back();
  }
  const std::size_t deg = p.size() - 1;
  std::vector<std::complex<double>> z(deg);
  const std::complex<double> seed(0.4, 0.9);
  for (std::size_t k = 0; k < deg; ++k) {
    z[k] = std::pow(seed, static_cast<double>(k));
  }
  auto eval = [&](std::complex<double> x) {
    std::complex<double> acc = 0.0;
    for (std::size_t i = p.size(); i-- > 0;) {
      acc = acc * x + p[i];
    }
    return acc / p.back();
  };
  for (int iter = 0; iter < 2000; ++iter) {
    double change = 0.0;
    for (std::size_t k = 0; k < deg; ++k) {
      std::complex<double> denom = 1.0;
      for (std::size_t j = 0; j < deg; ++j) {
        if (j != k) {
          denom *= z[k] - z[j];
        }
      }
      const std::complex<double> step = eval(z[k]) / denom;
      z[k] -= step;
      change = std::max(change, std::abs(step));
    }
    if (change < 1e-15) {
      break;
    }
  }
  return z;
}

inline double gaussian(double z)
{
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

inline double relative_frobenius(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
  return (a - b).norm() / b.norm();
}

} // namespace oracle
