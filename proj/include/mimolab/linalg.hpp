// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

namespace mimolab {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Relative PSD tolerance: eigenvalues down to -kPsdTolerance * ||R||_2 are accepted.
inline constexpr double kPsdTolerance = 1e-10;

// Factorization of a Hermitian positive-definite matrix, used for every
// A^{-1} x product in the library. No explicit inverses are formed.
class HermitianSolver {
 public:
  HermitianSolver() = default;
  explicit HermitianSolver(const CMatrix& a);

  Index dim() const { return matrix_.rows(); }
  const CMatrix& matrix() const { return matrix_; }

  // Solves A x = b. Runs one refinement pass when the relative residual
  // exceeds 1e-8.
  CVector solve(const CVector& b) const;
  CMatrix solve(const CMatrix& b) const;

  // b^H A^{-1} b, real for Hermitian A.
  double inverse_quadratic_form(const CVector& b) const;

 private:
  CMatrix matrix_;
  Eigen::LLT<CMatrix> llt_;
};

bool is_hermitian(const CMatrix& a, double rel_tol = 0.0);

// Returns (A + A^H)/2 with an exactly real diagonal.
CMatrix hermitian_part(const CMatrix& a);

// Largest absolute eigenvalue of a Hermitian matrix.
double spectral_norm_hermitian(const CMatrix& a);

// Largest singular value of a general matrix.
double spectral_norm(const CMatrix& a);

// Eigenvalues of a Hermitian matrix in descending order.
RVector hermitian_eigenvalues_desc(const CMatrix& a);

// Hermitian square root through the eigendecomposition; eigenvalues in
// [-kPsdTolerance * ||A||_2, 0) are clamped to zero, anything more negative
// throws ContractViolation. Exactly-diagonal inputs take an entrywise path.
CMatrix psd_sqrt(const CMatrix& a);

// Real part of a trace, asserting the imaginary residue is below
// 1e-10 * max(1, |trace|).
double real_trace(const Complex& trace, const char* what);

// tr(A B) without forming the product.
Complex trace_of_product(const CMatrix& a, const CMatrix& b);

// Neumaier-compensated sum in index order.
double compensated_sum(std::span<const double> values);

}  // namespace mimolab
