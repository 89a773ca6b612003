// SPDX-License-Identifier: Apache-2.0
#include "mimolab/combining.hpp"

#include <cmath>
#include <string>

#include "mimolab/errors.hpp"

namespace mimolab {

namespace {

CVector regularized_solve(std::span<const CVector> estimates, const CMatrix& z, const CVector& rhs) {
  CMatrix a = z;
  for (const CVector& h : estimates) {
    if (h.size() != z.rows()) {
      throw DimensionMismatch("combiner: estimate length differs from Z");
    }
    a.noalias() += h * h.adjoint();
  }
  return HermitianSolver(a).solve(rhs);
}

CombinerWeights solve_combiner(Scheme scheme, std::span<const CVector> estimates, const InterferenceCore& core,
                               std::size_t target_index, UserId target) {
  if (target_index >= estimates.size()) {
    throw DimensionMismatch("combiner: target index out of range");
  }
  CombinerWeights out;
  out.scheme = scheme;
  out.target = target;
  const CVector& ht = estimates[target_index];
  if (ht.isZero(0.0)) {
    out.vector = CVector::Zero(ht.size());
    out.degenerate = true;
    return out;
  }
  out.vector = regularized_solve(estimates, core.z, ht);
  return out;
}

}  // namespace

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::MRC: return "MRC";
    case Scheme::S_MMSE: return "S-MMSE";
    case Scheme::M_MMSE: return "M-MMSE";
  }
  return "MRC";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "MRC" || name == "mrc") return Scheme::MRC;
  if (name == "S-MMSE" || name == "S_MMSE" || name == "smmse") return Scheme::S_MMSE;
  if (name == "M-MMSE" || name == "M_MMSE" || name == "mmmse") return Scheme::M_MMSE;
  throw InvalidParameter("unknown combining scheme '" + std::string(name) + "'");
}

InterferenceCore build_interference_core(std::span<const CMatrix> r_all,
                                         std::span<const CMatrix> phi_all, double rho,
                                         CoreVariant variant, std::span<const int> cells) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw InvalidParameter("data SNR rho must be positive and finite");
  }
  if (r_all.empty() || r_all.size() != phi_all.size()) {
    throw DimensionMismatch("build_interference_core: R and Phi lists differ in length");
  }
  if (variant.kind == CoreVariant::Kind::smmse && cells.size() != r_all.size()) {
    throw DimensionMismatch("build_interference_core: smmse needs a cell index per user");
  }
  if (variant.kind == CoreVariant::Kind::two_user && r_all.size() != 2) {
    throw DimensionMismatch("build_interference_core: two_user variant needs exactly two users");
  }
  const Index m = r_all.front().rows();
  InterferenceCore core;
  core.rho = rho;
  core.z = CMatrix::Identity(m, m) / rho;
  for (std::size_t u = 0; u < r_all.size(); ++u) {
    if (r_all[u].rows() != m || r_all[u].cols() != m || phi_all[u].rows() != m ||
        phi_all[u].cols() != m) {
      throw DimensionMismatch("build_interference_core: inconsistent matrix dimensions");
    }
    const bool own = variant.kind != CoreVariant::Kind::smmse || cells[u] == variant.serving_cell;
    if (own) {
      core.z += r_all[u] - phi_all[u];
    } else {
      core.z += r_all[u];
    }
  }
  core.z = hermitian_part(core.z);
  return core;
}

CombinerWeights mrc_combiner(const CVector& h_hat_target, UserId target) {
  CombinerWeights out;
  out.scheme = Scheme::MRC;
  out.target = target;
  out.vector = h_hat_target;
  out.degenerate = h_hat_target.isZero(0.0);
  return out;
}

CombinerWeights mmse_combiner(std::span<const CVector> estimates, const InterferenceCore& core,
                              std::size_t target_index, UserId target) {
  return solve_combiner(Scheme::M_MMSE, estimates, core, target_index, target);
}

CombinerWeights smmse_combiner(std::span<const CVector> own_cell_estimates,
                               const InterferenceCore& zbar, std::size_t target_index, UserId target) {
  return solve_combiner(Scheme::S_MMSE, own_cell_estimates, zbar, target_index, target);
}

double instantaneous_sinr(const CVector& v, std::span<const CVector> estimates,
                          const InterferenceCore& core, std::size_t target_index) {
  if (target_index >= estimates.size()) {
    throw DimensionMismatch("instantaneous_sinr: target index out of range");
  }
  if (v.size() != core.z.rows()) {
    throw DimensionMismatch("instantaneous_sinr: combiner length differs from Z");
  }
  if (v.isZero(0.0)) {
    throw DegenerateScenario("instantaneous_sinr: zero combining vector");
  }
  const double signal = std::norm(v.dot(estimates[target_index]));
  double interference = v.dot(core.z * v).real();
  for (std::size_t u = 0; u < estimates.size(); ++u) {
    if (u != target_index) {
      interference += std::norm(v.dot(estimates[u]));
    }
  }
  return signal / interference;
}

SinrForms mmse_sinr_two_forms(const CVector& h1_hat, const CVector& h2_hat, const CMatrix& z) {
  if (h1_hat.size() != z.rows() || h2_hat.size() != z.rows()) {
    throw DimensionMismatch("mmse_sinr_two_forms: dimension mismatch");
  }
  SinrForms out;
  {
    CMatrix a = z;
    a.noalias() += h2_hat * h2_hat.adjoint();
    out.direct = HermitianSolver(a).solve(h1_hat).dot(h1_hat).real();
  }
  {
    const HermitianSolver zs(z);
    const double m = static_cast<double>(z.rows());
    const CVector z_h2 = zs.solve(h2_hat);
    const double a11 = zs.inverse_quadratic_form(h1_hat) / m;
    const double a22 = h2_hat.dot(z_h2).real() / m;
    const Complex a12 = h1_hat.dot(z_h2) / m;
    out.rank1 = m * (a11 - std::norm(a12) / (1.0 / m + a22));
  }
  return out;
}

}  // namespace mimolab
