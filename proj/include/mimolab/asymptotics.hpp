// SPDX-License-Identifier: Apache-2.0
//
// Deterministic large-M quantities of the two-user shared-pilot model:
// the beta coefficients, the SINR slope delta, the linear-independence
// statistics and finite-M diagnostics built from them.
#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mimolab/covariance.hpp"
#include "mimolab/linalg.hpp"

namespace mimolab {

// Q, Z, Phi_k and Upsilon_12 for two users sharing one pilot at one BS.
class TwoUserStatistics {
 public:
  TwoUserStatistics(CMatrix r1, CMatrix r2, double rho_tr, double rho);

  Index dim() const { return r1_.rows(); }
  double rho_tr() const { return rho_tr_; }
  double rho() const { return rho_; }
  const CMatrix& r1() const { return r1_; }
  const CMatrix& r2() const { return r2_; }
  const HermitianSolver& q() const { return q_; }
  const HermitianSolver& z() const { return z_; }
  const CMatrix& phi1() const { return phi1_; }
  const CMatrix& phi2() const { return phi2_; }
  const CMatrix& upsilon12() const { return upsilon12_; }

 private:
  CMatrix r1_;
  CMatrix r2_;
  double rho_tr_;
  double rho_;
  HermitianSolver q_;
  CMatrix phi1_;
  CMatrix phi2_;
  CMatrix upsilon12_;
  HermitianSolver z_;
};

struct AsymptoticCoefficients {
  double beta11 = 0.0;
  double beta22 = 0.0;
  double beta12 = 0.0;       // real part of (1/M) tr(Upsilon_12 Z^{-1})
  double beta12_imag = 0.0;  // zero for real-symmetric, diagonal or Toeplitz pairs
  double delta = 0.0;        // beta11 - |beta12|^2 / beta22 (0 when beta22 == 0)
  Index m = 0;
};

// beta11 = tr(Phi_1 Z^{-1})/M, beta22 = tr(Phi_2 Z^{-1})/M, beta12 = tr(Upsilon_12 Z^{-1})/M.
AsymptoticCoefficients beta_coefficients(const TwoUserStatistics& stats);

// Throws DegenerateScenario when beta22 <= 0.
double asymptotic_delta(const AsymptoticCoefficients& coeffs);

// (1/M) tr(Q^{-1} (R1 - lambda R2) Z^{-1} (R1 - lambda R2)).
double weighted_independence_objective(const TwoUserStatistics& stats, double lambda);

struct QuadraticMinimum {
  double value = 0.0;
  double lambda_star = 0.0;
};

// Minimum over real lambda of weighted_independence_objective, in closed
// form. Equals delta whenever beta12 is real.
QuadraticMinimum weighted_independence_statistic(const TwoUserStatistics& stats);

// min_lambda (1/M) ||R1 - lambda R2||_F^2 with lambda* = tr(R1 R2) / ||R2||_F^2.
// Throws DegenerateScenario when R2 = 0.
QuadraticMinimum frobenius_independence_statistic(const CMatrix& r1, const CMatrix& r2);
QuadraticMinimum frobenius_independence_statistic(const CovarianceMatrix& r1,
                                                  const CovarianceMatrix& r2);

enum class BoundConvention {
  rho,          // denominator (rho_tr + ||R1+R2||_2)(rho + ||sum(R-Phi)||_2)
  inverse_rho,  // denominator (1/rho_tr + ||R1+R2||_2)(1/rho + ||sum(R-Phi)||_2)
};

struct FrobeniusTraceBound {
  double lhs = 0.0;
  double rhs_rho = 0.0;
  double rhs_inverse_rho = 0.0;

  double rhs(BoundConvention convention) const {
    return convention == BoundConvention::rho ? rhs_rho : rhs_inverse_rho;
  }
};

// Lower bound of the weighted objective by the normalized Frobenius norm,
// evaluated under both denominator conventions. Only inverse_rho is a
// bound for every SNR; rho needs rho, rho_tr >= 1.
FrobeniusTraceBound frobenius_trace_bound(const TwoUserStatistics& stats, double lambda);

// Finite-M SINR limit eta^2 for R1 = eta R2.
double linear_dependence_limit(double eta);

enum class GrowthVerdict { unbounded_growth_consistent, contamination_limited, insufficient_grid };

std::string_view to_string(GrowthVerdict verdict);

struct GrowthRule {
  // A statistic "vanishes" when it drops by at least this factor on each of
  // the last two doublings.
  double decay_factor = 1.8;
  // Values at or below zero_tolerance * reference count as exactly zero.
  double zero_tolerance = 1e-10;
};

// stats are ordered by increasing M on a doubling grid; reference sets the
// scale for the zero test (typically beta11).
GrowthVerdict classify_growth(std::span<const double> stats, double reference,
                              const GrowthRule& rule = {});

struct AsymptoticRecord {
  Index m = 0;
  AsymptoticCoefficients coeffs;
  double frob_stat = 0.0;
  double lambda_star = 0.0;
  GrowthVerdict verdict = GrowthVerdict::insufficient_grid;
};

// One record per covariance pair; pairs must be ordered by increasing M.
// Each record's verdict uses the grid points up to and including it.
std::vector<AsymptoticRecord> asymptotic_diagnostics(
    std::span<const std::pair<CovarianceMatrix, CovarianceMatrix>> pairs, double rho_tr, double rho,
    const GrowthRule& rule = {});

}  // namespace mimolab
