// SPDX-License-Identifier: Apache-2.0
#include "mimolab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "mimolab/errors.hpp"

namespace mimolab {

namespace {

constexpr double kRefineThreshold = 1e-8;

template <typename Rhs>
Rhs solve_refined(const CMatrix& a, const Eigen::LLT<CMatrix>& llt, const Rhs& b) {
  Rhs x = llt.solve(b);
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    return x;
  }
  Rhs residual = b - a * x;
  if (residual.norm() > kRefineThreshold * bnorm) {
    x += llt.solve(residual);
  }
  return x;
}

}  // namespace

HermitianSolver::HermitianSolver(const CMatrix& a) : matrix_(a), llt_(a) {
  if (a.rows() != a.cols()) {
    throw DimensionMismatch("HermitianSolver: matrix is not square");
  }
  if (llt_.info() != Eigen::Success) {
    throw NumericalFailure("HermitianSolver: Cholesky factorization failed (matrix not positive definite)");
  }
}

CVector HermitianSolver::solve(const CVector& b) const {
  if (b.size() != dim()) {
    throw DimensionMismatch("HermitianSolver::solve: rhs length mismatch");
  }
  return solve_refined(matrix_, llt_, b);
}

CMatrix HermitianSolver::solve(const CMatrix& b) const {
  if (b.rows() != dim()) {
    throw DimensionMismatch("HermitianSolver::solve: rhs rows mismatch");
  }
  return solve_refined(matrix_, llt_, b);
}

double HermitianSolver::inverse_quadratic_form(const CVector& b) const {
  // ||L^{-1} b||^2 is real and nonnegative by construction.
  const CVector w = llt_.matrixL().solve(b);
  return w.squaredNorm();
}

bool is_hermitian(const CMatrix& a, double rel_tol) {
  if (a.rows() != a.cols()) {
    return false;
  }
  const double scale = rel_tol > 0.0 ? rel_tol * std::max(1.0, a.cwiseAbs().maxCoeff()) : 0.0;
  for (Index n = 0; n < a.cols(); ++n) {
    for (Index m = n; m < a.rows(); ++m) {
      if (std::abs(a(m, n) - std::conj(a(n, m))) > scale) {
        return false;
      }
    }
  }
  return true;
}

CMatrix hermitian_part(const CMatrix& a) {
  CMatrix h = (a + a.adjoint()) * 0.5;
  for (Index i = 0; i < h.rows(); ++i) {
    h(i, i) = Complex(h(i, i).real(), 0.0);
  }
  return h;
}

double spectral_norm_hermitian(const CMatrix& a) {
  if (a.size() == 0) {
    return 0.0;
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a, Eigen::EigenvaluesOnly);
  const RVector& ev = es.eigenvalues();
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

double spectral_norm(const CMatrix& a) {
  if (a.size() == 0) {
    return 0.0;
  }
  Eigen::JacobiSVD<CMatrix> svd(a);
  return svd.singularValues()(0);
}

RVector hermitian_eigenvalues_desc(const CMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().reverse();
}

CMatrix psd_sqrt(const CMatrix& a) {
  const Index m = a.rows();
  if (a.isDiagonal(0.0)) {
    CMatrix s = CMatrix::Zero(m, m);
    const double top = a.diagonal().real().cwiseAbs().maxCoeff();
    for (Index i = 0; i < m; ++i) {
      double v = a(i, i).real();
      if (v < -kPsdTolerance * top) {
        throw ContractViolation("psd_sqrt: matrix is not positive semidefinite");
      }
      s(i, i) = std::sqrt(std::max(v, 0.0));
    }
    return s;
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a);
  if (es.info() != Eigen::Success) {
    throw NumericalFailure("psd_sqrt: eigendecomposition failed");
  }
  RVector ev = es.eigenvalues();
  const double top = ev.cwiseAbs().maxCoeff();
  for (Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -kPsdTolerance * top) {
      throw ContractViolation("psd_sqrt: matrix is not positive semidefinite");
    }
    ev(i) = std::sqrt(std::max(ev(i), 0.0));
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

double real_trace(const Complex& trace, const char* what) {
  if (std::abs(trace.imag()) > 1e-10 * std::max(1.0, std::abs(trace))) {
    throw NumericalFailure(std::string(what) + ": trace has a non-negligible imaginary part");
  }
  return trace.real();
}

Complex trace_of_product(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows() || a.rows() != b.cols()) {
    throw DimensionMismatch("trace_of_product: incompatible shapes");
  }
  // tr(AB) = sum_{i,k} A(i,k) B(k,i)
  return a.cwiseProduct(b.transpose()).sum();
}

double compensated_sum(std::span<const double> values) {
  double sum = 0.0;
  double c = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      c += (sum - t) + v;
    } else {
      c += (v - t) + sum;
    }
    sum = t;
  }
  return sum + c;
}

}  // namespace mimolab
