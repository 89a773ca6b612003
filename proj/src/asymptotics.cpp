// SPDX-License-Identifier: Apache-2.0
#include "mimolab/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "mimolab/errors.hpp"
#include "mimolab/estimation.hpp"

namespace mimolab {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidParameter(std::string(name) + " must be positive and finite");
  }
}

HermitianSolver make_q(const CMatrix& r1, const CMatrix& r2, double rho_tr) {
  if (r1.rows() != r2.rows() || r1.cols() != r2.cols()) {
    throw DimensionMismatch("two-user covariances differ in dimension");
  }
  const CMatrix group[] = {r1, r2};
  return HermitianSolver(pilot_gram(group, rho_tr));
}

double trace_over_m(const CMatrix& a, const CMatrix& b, const char* what) {
  return real_trace(trace_of_product(a, b), what) / static_cast<double>(a.rows());
}

}  // namespace

TwoUserStatistics::TwoUserStatistics(CMatrix r1, CMatrix r2, double rho_tr, double rho)
    : r1_(std::move(r1)), r2_(std::move(r2)), rho_tr_(rho_tr), rho_(rho), q_(make_q(r1_, r2_, rho_tr)) {
  require_positive(rho, "rho");
  phi1_ = estimate_cov(r1_, q_).phi;
  phi2_ = estimate_cov(r2_, q_).phi;
  upsilon12_ = cross_cov(r1_, r2_, q_);
  const Index m = r1_.rows();
  CMatrix z = r1_ - phi1_ + r2_ - phi2_ + CMatrix::Identity(m, m) / rho;
  z_ = HermitianSolver(hermitian_part(z));
}

AsymptoticCoefficients beta_coefficients(const TwoUserStatistics& stats) {
  const CMatrix z_inv_phi1 = stats.z().solve(stats.phi1());
  const CMatrix z_inv_phi2 = stats.z().solve(stats.phi2());
  const double m = static_cast<double>(stats.dim());
  AsymptoticCoefficients out;
  out.m = stats.dim();
  // tr(Phi Z^{-1}) = tr(Z^{-1} Phi)
  out.beta11 = real_trace(z_inv_phi1.trace(), "beta11") / m;
  out.beta22 = real_trace(z_inv_phi2.trace(), "beta22") / m;
  const Complex b12 = stats.z().solve(stats.upsilon12()).trace() / m;
  out.beta12 = b12.real();
  out.beta12_imag = b12.imag();
  out.delta = out.beta22 > 0.0 ? out.beta11 - std::norm(b12) / out.beta22 : 0.0;
  return out;
}

double asymptotic_delta(const AsymptoticCoefficients& coeffs) {
  if (!(coeffs.beta22 > 0.0)) {
    throw DegenerateScenario("asymptotic_delta: beta22 must be positive (interfering user absent)");
  }
  const double b12_sq = coeffs.beta12 * coeffs.beta12 + coeffs.beta12_imag * coeffs.beta12_imag;
  return coeffs.beta11 - b12_sq / coeffs.beta22;
}

double weighted_independence_objective(const TwoUserStatistics& stats, double lambda) {
  const CMatrix x = stats.r1() - lambda * stats.r2();
  // tr(Q^{-1} X Z^{-1} X)
  const CMatrix qx = stats.q().solve(x);
  const CMatrix zx = stats.z().solve(x);
  return trace_over_m(qx, zx, "weighted_independence_objective");
}

QuadraticMinimum weighted_independence_statistic(const TwoUserStatistics& stats) {
  // (1/M) tr(Q^{-1}(R1 - l R2) Z^{-1}(R1 - l R2)) = a - 2 l b + l^2 c
  const CMatrix q_r1 = stats.q().solve(stats.r1());
  const CMatrix q_r2 = stats.q().solve(stats.r2());
  const CMatrix z_r1 = stats.z().solve(stats.r1());
  const CMatrix z_r2 = stats.z().solve(stats.r2());
  const double a = trace_over_m(q_r1, z_r1, "weighted statistic a");
  const double c = trace_over_m(q_r2, z_r2, "weighted statistic c");
  const double b = 0.5 * (trace_of_product(q_r1, z_r2) + trace_of_product(q_r2, z_r1)).real() /
                   static_cast<double>(stats.dim());
  if (!(c > 0.0)) {
    throw DegenerateScenario("weighted_independence_statistic: R2 contributes nothing (beta22 = 0)");
  }
  QuadraticMinimum out;
  out.lambda_star = b / c;
  out.value = a - b * b / c;
  return out;
}

QuadraticMinimum frobenius_independence_statistic(const CMatrix& r1, const CMatrix& r2) {
  if (r1.rows() != r2.rows() || r1.cols() != r2.cols()) {
    throw DimensionMismatch("frobenius_independence_statistic: dimension mismatch");
  }
  const double r2_sq = r2.squaredNorm();
  if (!(r2_sq > 0.0)) {
    throw DegenerateScenario("frobenius_independence_statistic: R2 is zero");
  }
  QuadraticMinimum out;
  out.lambda_star = real_trace(trace_of_product(r1, r2), "tr(R1 R2)") / r2_sq;
  out.value = (r1 - out.lambda_star * r2).squaredNorm() / static_cast<double>(r1.rows());
  return out;
}

QuadraticMinimum frobenius_independence_statistic(const CovarianceMatrix& r1,
                                                  const CovarianceMatrix& r2) {
  if (r1.dim() != r2.dim()) {
    throw DimensionMismatch("frobenius_independence_statistic: dimension mismatch");
  }
  if (!r1.is_diagonal() || !r2.is_diagonal()) {
    return frobenius_independence_statistic(r1.dense(), r2.dense());
  }
  const RVector d1 = r1.diagonal();
  const RVector d2 = r2.diagonal();
  const double r2_sq = d2.squaredNorm();
  if (!(r2_sq > 0.0)) {
    throw DegenerateScenario("frobenius_independence_statistic: R2 is zero");
  }
  QuadraticMinimum out;
  out.lambda_star = d1.dot(d2) / r2_sq;
  out.value = (d1 - out.lambda_star * d2).squaredNorm() / static_cast<double>(d1.size());
  return out;
}

FrobeniusTraceBound frobenius_trace_bound(const TwoUserStatistics& stats, double lambda) {
  const Index m = stats.dim();
  const CMatrix x = stats.r1() - lambda * stats.r2();
  FrobeniusTraceBound out;
  out.lhs = weighted_independence_objective(stats, lambda);
  const double numerator = x.squaredNorm() / static_cast<double>(m);
  const double q_norm = spectral_norm_hermitian(stats.r1() + stats.r2());
  const CMatrix err = stats.r1() - stats.phi1() + stats.r2() - stats.phi2();
  const double z_norm = spectral_norm_hermitian(hermitian_part(err));
  out.rhs_rho = numerator / ((stats.rho_tr() + q_norm) * (stats.rho() + z_norm));
  out.rhs_inverse_rho = numerator / ((1.0 / stats.rho_tr() + q_norm) * (1.0 / stats.rho() + z_norm));
  return out;
}

double linear_dependence_limit(double eta) {
  require_positive(eta, "eta");
  return eta * eta;
}

std::string_view to_string(GrowthVerdict verdict) {
  switch (verdict) {
    case GrowthVerdict::unbounded_growth_consistent: return "unbounded-growth-consistent";
    case GrowthVerdict::contamination_limited: return "contamination-limited";
    case GrowthVerdict::insufficient_grid: return "insufficient-grid";
  }
  return "insufficient-grid";
}

GrowthVerdict classify_growth(std::span<const double> stats, double reference, const GrowthRule& rule) {
  if (stats.empty()) {
    return GrowthVerdict::insufficient_grid;
  }
  const double floor = rule.zero_tolerance * std::max(std::abs(reference), 1e-300);
  if (stats.back() <= floor) {
    return GrowthVerdict::contamination_limited;
  }
  if (stats.size() < 3) {
    return GrowthVerdict::insufficient_grid;
  }
  const std::size_t n = stats.size();
  const double s1 = stats[n - 3];
  const double s2 = stats[n - 2];
  const double s3 = stats[n - 1];
  const bool vanishing = s1 >= rule.decay_factor * s2 && s2 >= rule.decay_factor * s3;
  return vanishing ? GrowthVerdict::contamination_limited : GrowthVerdict::unbounded_growth_consistent;
}

std::vector<AsymptoticRecord> asymptotic_diagnostics(
    std::span<const std::pair<CovarianceMatrix, CovarianceMatrix>> pairs, double rho_tr, double rho,
    const GrowthRule& rule) {
  std::vector<AsymptoticRecord> out;
  std::vector<double> deltas;
  Index previous_m = 0;
  for (const auto& [r1, r2] : pairs) {
    if (r1.dim() <= previous_m) {
      throw InvalidParameter("asymptotic_diagnostics: M grid must be strictly increasing");
    }
    previous_m = r1.dim();
    const TwoUserStatistics stats(r1.dense(), r2.dense(), rho_tr, rho);
    AsymptoticRecord rec;
    rec.m = r1.dim();
    rec.coeffs = beta_coefficients(stats);
    rec.coeffs.delta = asymptotic_delta(rec.coeffs);
    const QuadraticMinimum frob = frobenius_independence_statistic(r1, r2);
    rec.frob_stat = frob.value;
    rec.lambda_star = frob.lambda_star;
    deltas.push_back(rec.coeffs.delta);
    rec.verdict = classify_growth(deltas, rec.coeffs.beta11, rule);
    out.push_back(rec);
  }
  return out;
}

}  // namespace mimolab
