// SPDX-License-Identifier: Apache-2.0
#include "mimolab/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "mimolab/errors.hpp"
#include "mimolab/rng.hpp"

namespace mimolab {

namespace {

constexpr double kHermitianTolerance = 1e-12;
constexpr int kPanelOrder = 16;

void require_dim(Index m) {
  if (m < 1) {
    throw InvalidParameter("covariance dimension must be at least 1");
  }
}

void require_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw InvalidParameter("beta must be positive and finite");
  }
}

void check_psd(const RVector& eigenvalues_desc, double scale) {
  const double smallest = eigenvalues_desc(eigenvalues_desc.size() - 1);
  if (smallest < -kPsdTolerance * scale) {
    throw ContractViolation("covariance matrix is not positive semidefinite (smallest eigenvalue " +
                            std::to_string(smallest) + ")");
  }
}

}  // namespace

std::string_view to_string(CovarianceModel model) {
  switch (model) {
    case CovarianceModel::one_ring: return "one_ring";
    case CovarianceModel::exp_corr: return "exp_corr";
    case CovarianceModel::lognormal_diag: return "lognormal_diag";
    case CovarianceModel::scaled_identity: return "scaled_identity";
    case CovarianceModel::custom: return "custom";
  }
  return "custom";
}

CovarianceModel parse_covariance_model(std::string_view name) {
  if (name == "one_ring") return CovarianceModel::one_ring;
  if (name == "exp_corr") return CovarianceModel::exp_corr;
  if (name == "lognormal_diag") return CovarianceModel::lognormal_diag;
  if (name == "scaled_identity") return CovarianceModel::scaled_identity;
  if (name == "custom") return CovarianceModel::custom;
  throw InvalidParameter("unknown covariance model '" + std::string(name) + "'");
}

CovarianceMatrix CovarianceMatrix::from_dense(const CMatrix& entries, CovarianceModel model,
                                              ModelParams params) {
  if (entries.rows() != entries.cols()) {
    throw DimensionMismatch("covariance matrix must be square");
  }
  require_dim(entries.rows());
  if (!entries.allFinite()) {
    throw InvalidParameter("covariance matrix has non-finite entries");
  }
  if (!is_hermitian(entries, kHermitianTolerance)) {
    throw ContractViolation("covariance matrix is not Hermitian");
  }
  CovarianceMatrix out;
  out.dim_ = entries.rows();
  out.model_ = model;
  out.params_ = params;
  out.dense_ = entries;
  // Mirror the upper triangle so entry(m,n) == conj(entry(n,m)) holds exactly.
  for (Index n = 0; n < out.dim_; ++n) {
    out.dense_(n, n) = Complex(out.dense_(n, n).real(), 0.0);
    for (Index m = n + 1; m < out.dim_; ++m) {
      out.dense_(m, n) = std::conj(out.dense_(n, m));
    }
  }
  const RVector ev = hermitian_eigenvalues_desc(out.dense_);
  check_psd(ev, std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1))));
  if (!(out.trace() > 0.0)) {
    throw InvalidParameter("covariance matrix must have positive trace");
  }
  return out;
}

CovarianceMatrix CovarianceMatrix::from_diagonal(const RVector& diagonal, CovarianceModel model,
                                                 ModelParams params) {
  require_dim(diagonal.size());
  if (!diagonal.allFinite()) {
    throw InvalidParameter("covariance diagonal has non-finite entries");
  }
  const double top = diagonal.cwiseAbs().maxCoeff();
  if (diagonal.minCoeff() < -kPsdTolerance * top) {
    throw ContractViolation("covariance diagonal has negative entries");
  }
  CovarianceMatrix out;
  out.dim_ = diagonal.size();
  out.diagonal_storage_ = true;
  out.diag_ = diagonal;
  out.model_ = model;
  out.params_ = params;
  if (!(out.trace() > 0.0)) {
    throw InvalidParameter("covariance matrix must have positive trace");
  }
  return out;
}

CMatrix CovarianceMatrix::dense() const {
  if (!diagonal_storage_) {
    return dense_;
  }
  return diag_.cast<Complex>().asDiagonal();
}

RVector CovarianceMatrix::diagonal() const {
  if (diagonal_storage_) {
    return diag_;
  }
  return dense_.diagonal().real();
}

Complex CovarianceMatrix::entry(Index m, Index n) const {
  if (diagonal_storage_) {
    return m == n ? Complex(diag_(m), 0.0) : Complex(0.0, 0.0);
  }
  return dense_(m, n);
}

double CovarianceMatrix::trace() const {
  return diagonal_storage_ ? diag_.sum() : dense_.diagonal().real().sum();
}

double CovarianceMatrix::frobenius_norm_squared() const {
  return diagonal_storage_ ? diag_.squaredNorm() : dense_.squaredNorm();
}

CovarianceMatrix CovarianceMatrix::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw InvalidParameter("covariance scale factor must be positive");
  }
  CovarianceMatrix out = *this;
  if (diagonal_storage_) {
    out.diag_ *= factor;
  } else {
    out.dense_ *= factor;
  }
  out.params_.beta *= factor;
  return out;
}

void gauss_legendre(int n, RVector& nodes, RVector& weights) {
  if (n < 1) {
    throw InvalidParameter("Gauss-Legendre order must be positive");
  }
  nodes.resize(n);
  weights.resize(n);
  // P_n(x) and P_n'(x) by the three-term recurrence.
  auto legendre = [n](double x, double& derivative) {
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    derivative = n * (x * p1 - p0) / (x * x - 1.0);
    return p1;
  };
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      const double dx = legendre(x, dp) / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) {
        break;
      }
    }
    legendre(x, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes(i) = -x;
    nodes(n - 1 - i) = x;
    weights(i) = w;
    weights(n - 1 - i) = w;
  }
}

CovarianceMatrix one_ring_cov(Index m, double beta, double theta, double delta) {
  require_dim(m);
  require_beta(beta);
  if (!(delta > 0.0) || delta > std::numbers::pi) {
    throw InvalidParameter("one-ring angular spread must lie in (0, pi]");
  }
  if (!std::isfinite(theta)) {
    throw InvalidParameter("one-ring angle must be finite");
  }

  RVector gl_x;
  RVector gl_w;
  gauss_legendre(kPanelOrder, gl_x, gl_w);
  const Index min_nodes = std::max<Index>(64, 8 * m);
  const Index panels = (min_nodes + kPanelOrder - 1) / kPanelOrder;
  const double width = 2.0 * delta / static_cast<double>(panels);

  // sin(theta + phi) at every node, weights already divided by 2*delta.
  RVector s(panels * kPanelOrder);
  RVector w(panels * kPanelOrder);
  for (Index p = 0; p < panels; ++p) {
    const double mid = -delta + (static_cast<double>(p) + 0.5) * width;
    for (int q = 0; q < kPanelOrder; ++q) {
      const Index j = p * kPanelOrder + q;
      s(j) = std::sin(theta + mid + 0.5 * width * gl_x(q));
      w(j) = 0.5 * width * gl_w(q) / (2.0 * delta);
    }
  }

  // Toeplitz: entry depends on n - m only.
  CVector first_row(m);
  first_row(0) = Complex(beta, 0.0);
  for (Index d = 1; d < m; ++d) {
    double re = 0.0;
    double im = 0.0;
    const double freq = std::numbers::pi * static_cast<double>(d);
    for (Index j = 0; j < s.size(); ++j) {
      const double arg = freq * s(j);
      re += w(j) * std::cos(arg);
      im += w(j) * std::sin(arg);
    }
    first_row(d) = beta * Complex(re, im);
  }

  CMatrix r(m, m);
  for (Index row = 0; row < m; ++row) {
    for (Index col = 0; col < m; ++col) {
      r(row, col) = col >= row ? first_row(col - row) : std::conj(first_row(row - col));
    }
  }
  ModelParams params;
  params.beta = beta;
  params.theta = theta;
  params.delta = delta;
  return CovarianceMatrix::from_dense(r, CovarianceModel::one_ring, params);
}

CovarianceMatrix exp_corr_cov(Index m, double beta, double r, double theta) {
  require_dim(m);
  require_beta(beta);
  if (!(r >= 0.0 && r <= 1.0)) {
    throw InvalidParameter("correlation factor r must lie in [0, 1]");
  }
  if (!std::isfinite(theta)) {
    throw InvalidParameter("exponential-correlation angle must be finite");
  }
  CMatrix out(m, m);
  for (Index row = 0; row < m; ++row) {
    out(row, row) = Complex(beta, 0.0);
    for (Index col = row + 1; col < m; ++col) {
      const double d = static_cast<double>(col - row);
      const Complex v = beta * std::pow(r, d) * std::polar(1.0, d * theta);
      out(row, col) = v;
      out(col, row) = std::conj(v);
    }
  }
  ModelParams params;
  params.beta = beta;
  params.r = r;
  params.theta = theta;
  return CovarianceMatrix::from_dense(out, CovarianceModel::exp_corr, params);
}

CovarianceMatrix lognormal_diag_cov(Index m, double beta, double sigma, std::uint64_t seed) {
  require_dim(m);
  require_beta(beta);
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw InvalidParameter("log-normal standard deviation must be nonnegative");
  }
  RVector d(m);
  if (sigma == 0.0) {
    d.setConstant(beta);
  } else {
    Rng rng(derive_seed(seed, {}));
    std::normal_distribution<double> normal(0.0, sigma);
    for (Index i = 0; i < m; ++i) {
      d(i) = beta * std::pow(10.0, normal(rng) / 10.0);
    }
  }
  ModelParams params;
  params.beta = beta;
  params.sigma = sigma;
  params.seed = seed;
  return CovarianceMatrix::from_diagonal(d, CovarianceModel::lognormal_diag, params);
}

CovarianceMatrix scaled_identity_cov(Index m, double beta) {
  require_dim(m);
  require_beta(beta);
  ModelParams params;
  params.beta = beta;
  return CovarianceMatrix::from_diagonal(RVector::Constant(m, beta), CovarianceModel::scaled_identity,
                                         params);
}

EigenSpectrum eigen_spectrum(const CovarianceMatrix& r, bool normalize) {
  EigenSpectrum out;
  if (r.is_diagonal()) {
    RVector d = r.diagonal();
    std::sort(d.data(), d.data() + d.size(), std::greater<>());
    out.values = d;
  } else {
    out.values = hermitian_eigenvalues_desc(r.dense());
  }
  if (normalize) {
    out.values /= r.average_gain();
    out.normalized = true;
  }
  return out;
}

EigenSpectrum eigen_spectrum(const CMatrix& r) {
  if (!is_hermitian(r, kHermitianTolerance)) {
    throw ContractViolation("eigen_spectrum: matrix is not Hermitian");
  }
  EigenSpectrum out;
  out.values = hermitian_eigenvalues_desc(hermitian_part(r));
  return out;
}

}  // namespace mimolab
