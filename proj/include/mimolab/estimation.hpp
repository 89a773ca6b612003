// SPDX-License-Identifier: Apache-2.0
//
// MMSE channel estimation from a pilot shared by a group of users.
//
// All estimators work on the despread observation
//   y = Y^p phi^* / sqrt(rho_tr) = sum_group h + n / sqrt(rho_tr),  n ~ CN(0, I_M),
// which carries all information in Y^p because ||phi||^2 = 1.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mimolab/linalg.hpp"
#include "mimolab/rng.hpp"

namespace mimolab {

struct PilotModel {
  double rho_tr = 1.0;
  // Users sharing a pilot; must partition {0, ..., user_count - 1}.
  std::vector<std::vector<int>> sharing_groups;

  void validate(int user_count) const;
};

// Q = sum_group R + I / rho_tr.
CMatrix pilot_gram(std::span<const CMatrix> group, double rho_tr);

// h = R^{1/2} w with w ~ CN(0, I); one independent draw per covariance.
std::vector<CVector> draw_channels(std::span<const CMatrix> covariances, std::uint64_t seed);
// Same, with a precomputed R^{1/2} (see psd_sqrt).
CVector draw_channel(const CMatrix& sqrt_covariance, Rng& rng);

// sum_group h + n / sqrt(rho_tr).
CVector simulate_pilot_obs(std::span<const CVector> h_group, double rho_tr, Rng& rng);
CVector simulate_pilot_obs(std::span<const CVector> h_group, double rho_tr, std::uint64_t seed);

// h_hat = R_k Q^{-1} y.
CVector mmse_estimate(const CMatrix& r_k, const HermitianSolver& q, const CVector& despread_obs);

struct EstimateCovariance {
  CMatrix phi;    // R Q^{-1} R
  CMatrix error;  // R - Phi
};

EstimateCovariance estimate_cov(const CMatrix& r_k, const HermitianSolver& q);

// E{h_hat_i h_hat_k^H} = R_i Q^{-1} R_k.
CMatrix cross_cov(const CMatrix& r_i, const CMatrix& r_k, const HermitianSolver& q);

struct ChannelSet {
  std::vector<CVector> true_channels;
  std::vector<CVector> estimates;
  std::vector<CMatrix> est_covs;
  std::vector<CMatrix> err_covs;
  CMatrix gram;
};

// Deterministic statistics of one pilot group, computed once and shared
// read-only by Monte Carlo trials.
class PilotGroupEstimator {
 public:
  PilotGroupEstimator(std::vector<CMatrix> covariances, double rho_tr);

  std::size_t size() const { return covariances_.size(); }
  Index dim() const { return gram_.dim(); }
  double rho_tr() const { return rho_tr_; }
  const CMatrix& covariance(std::size_t k) const { return covariances_[k]; }
  const HermitianSolver& gram() const { return gram_; }
  const CMatrix& phi(std::size_t k) const { return stats_[k].phi; }
  const CMatrix& error_cov(std::size_t k) const { return stats_[k].error; }

  // Draws channels, the pilot observation and the estimates for one
  // coherence block. Consumes rng in a fixed order.
  void sample(Rng& rng, std::vector<CVector>& channels, std::vector<CVector>& estimates) const;

  ChannelSet sample(Rng& rng) const;

 private:
  std::vector<CMatrix> covariances_;
  std::vector<CMatrix> sqrt_covariances_;
  std::vector<EstimateCovariance> stats_;
  HermitianSolver gram_;
  double rho_tr_;
};

}  // namespace mimolab
