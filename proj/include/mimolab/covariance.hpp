// SPDX-License-Identifier: Apache-2.0
//
// Channel covariance models for a half-wavelength uniform linear array and
// their eigenstructure. All angles are in radians.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "mimolab/linalg.hpp"

namespace mimolab {

enum class CovarianceModel { one_ring, exp_corr, lognormal_diag, scaled_identity, custom };

std::string_view to_string(CovarianceModel model);
CovarianceModel parse_covariance_model(std::string_view name);

// Parameters a generator was called with; unused fields stay empty.
struct ModelParams {
  double beta = 1.0;
  std::optional<double> theta;
  std::optional<double> delta;
  std::optional<double> r;
  std::optional<double> sigma;
  std::optional<std::uint64_t> seed;
};

// Immutable Hermitian PSD covariance matrix with tr(R) > 0.
//
// Diagonal models are stored as their diagonal so that statistics on very
// large arrays (M ~ 1e5) stay O(M) in memory.
class CovarianceMatrix {
 public:
  // Validates Hermitian symmetry (relative 1e-12), PSD within kPsdTolerance
  // and a positive trace. The stored matrix is made exactly Hermitian.
  static CovarianceMatrix from_dense(const CMatrix& entries,
                                     CovarianceModel model = CovarianceModel::custom,
                                     ModelParams params = {});
  static CovarianceMatrix from_diagonal(const RVector& diagonal,
                                        CovarianceModel model = CovarianceModel::custom,
                                        ModelParams params = {});

  Index dim() const { return dim_; }
  bool is_diagonal() const { return diagonal_storage_; }
  CovarianceModel model() const { return model_; }
  const ModelParams& params() const { return params_; }

  CMatrix dense() const;
  // Diagonal entries (real); valid for both storage kinds.
  RVector diagonal() const;
  Complex entry(Index m, Index n) const;
  double trace() const;
  // beta = tr(R) / M.
  double average_gain() const { return trace() / static_cast<double>(dim_); }
  double frobenius_norm_squared() const;

  CovarianceMatrix scaled(double factor) const;

 private:
  CovarianceMatrix() = default;

  Index dim_ = 0;
  bool diagonal_storage_ = false;
  CMatrix dense_;
  RVector diag_;
  CovarianceModel model_ = CovarianceModel::custom;
  ModelParams params_;
};

struct EigenSpectrum {
  RVector values;  // descending
  bool normalized = false;
};

// [R]_{m,n} = beta/(2 delta) * int_{-delta}^{delta} exp(i pi (n-m) sin(theta + phi)) dphi,
// evaluated with composite Gauss-Legendre using max(64, 8M) nodes per entry.
CovarianceMatrix one_ring_cov(Index m, double beta, double theta, double delta);

// [R]_{m,n} = beta r^{|n-m|} exp(i (n-m) theta).
CovarianceMatrix exp_corr_cov(Index m, double beta, double r, double theta);

// beta * diag(10^{f_1/10}, ..., 10^{f_M/10}) with f_m ~ N(0, sigma^2) in dB.
CovarianceMatrix lognormal_diag_cov(Index m, double beta, double sigma, std::uint64_t seed);

CovarianceMatrix scaled_identity_cov(Index m, double beta);

// Descending eigenvalues; divided by beta = tr(R)/M when normalize is set.
EigenSpectrum eigen_spectrum(const CovarianceMatrix& r, bool normalize = false);
// Raw-matrix overload; throws ContractViolation for non-Hermitian input.
EigenSpectrum eigen_spectrum(const CMatrix& r);

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
void gauss_legendre(int n, RVector& nodes, RVector& weights);

}  // namespace mimolab
