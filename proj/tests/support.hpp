// SPDX-License-Identifier: Apache-2.0
//
// Shared test helpers. Everything here is written against plain Eigen so
// it can serve as an oracle for the library code.
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <Eigen/Dense>

namespace testsupport {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline CVector gaussian_vector(Eigen::Index m, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  CVector v(m);
  for (Eigen::Index i = 0; i < m; ++i) v(i) = Complex(n(rng), n(rng));
  return v;
}

// G G^H / cols with complex Gaussian G; full rank when cols >= m.
inline CMatrix random_psd(Eigen::Index m, Eigen::Index cols, std::mt19937_64& rng) {
  CMatrix g(m, cols);
  for (Eigen::Index c = 0; c < cols; ++c) g.col(c) = gaussian_vector(m, rng);
  CMatrix a = g * g.adjoint() / static_cast<double>(cols);
  return 0.5 * (a + a.adjoint());
}

// Direct formula for the exponential-correlation entry, row m, column n.
inline CMatrix exp_corr_oracle(Eigen::Index m, double beta, double r, double theta) {
  CMatrix out(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const double d = static_cast<double>(j - i);
      out(i, j) = beta * std::pow(r, std::abs(d)) * std::polar(1.0, d * theta);
    }
  }
  return out;
}

// Composite Simpson rule for (1/2D) int_{-D}^{D} exp(i pi k sin(theta + t)) dt.
inline Complex one_ring_simpson(int k, double theta, double delta, int intervals) {
  const double h = 2.0 * delta / intervals;
  Complex acc = 0.0;
  for (int i = 0; i <= intervals; ++i) {
    const double t = -delta + i * h;
    const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * std::polar(1.0, std::numbers::pi * k * std::sin(theta + t));
  }
  return acc * h / 3.0 / (2.0 * delta);
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace testsupport
