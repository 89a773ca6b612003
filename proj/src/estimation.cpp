// SPDX-License-Identifier: Apache-2.0
#include "mimolab/estimation.hpp"

#include <cmath>
#include <string>

#include "mimolab/errors.hpp"

namespace mimolab {

namespace {

void require_rho(double rho_tr) {
  if (!(rho_tr > 0.0) || !std::isfinite(rho_tr)) {
    throw InvalidParameter("pilot SNR rho_tr must be positive and finite");
  }
}

}  // namespace

void PilotModel::validate(int user_count) const {
  require_rho(rho_tr);
  std::vector<int> hits(static_cast<std::size_t>(user_count), 0);
  for (const auto& group : sharing_groups) {
    if (group.empty()) {
      throw InvalidParameter("pilot sharing group is empty");
    }
    for (int u : group) {
      if (u < 0 || u >= user_count) {
        throw InvalidParameter("pilot sharing group references unknown user " + std::to_string(u));
      }
      ++hits[static_cast<std::size_t>(u)];
    }
  }
  for (int h : hits) {
    if (h != 1) {
      throw InvalidParameter("pilot sharing groups must partition the user set");
    }
  }
}

CMatrix pilot_gram(std::span<const CMatrix> group, double rho_tr) {
  require_rho(rho_tr);
  if (group.empty()) {
    throw DimensionMismatch("pilot_gram: empty group");
  }
  const Index m = group.front().rows();
  CMatrix q = CMatrix::Identity(m, m) / rho_tr;
  for (const CMatrix& r : group) {
    if (r.rows() != m || r.cols() != m) {
      throw DimensionMismatch("pilot_gram: covariance dimensions differ");
    }
    q += r;
  }
  return q;
}

CVector draw_channel(const CMatrix& sqrt_covariance, Rng& rng) {
  const CVector w = standard_complex_normal(sqrt_covariance.rows(), rng);
  return sqrt_covariance * w;
}

std::vector<CVector> draw_channels(std::span<const CMatrix> covariances, std::uint64_t seed) {
  Rng rng(derive_seed(seed, {}));
  std::vector<CVector> out;
  out.reserve(covariances.size());
  for (const CMatrix& r : covariances) {
    out.push_back(draw_channel(psd_sqrt(r), rng));
  }
  return out;
}

CVector simulate_pilot_obs(std::span<const CVector> h_group, double rho_tr, Rng& rng) {
  require_rho(rho_tr);
  if (h_group.empty()) {
    throw DimensionMismatch("simulate_pilot_obs: empty group");
  }
  const Index m = h_group.front().size();
  CVector y = standard_complex_normal(m, rng) / std::sqrt(rho_tr);
  for (const CVector& h : h_group) {
    if (h.size() != m) {
      throw DimensionMismatch("simulate_pilot_obs: channel lengths differ");
    }
    y += h;
  }
  return y;
}

CVector simulate_pilot_obs(std::span<const CVector> h_group, double rho_tr, std::uint64_t seed) {
  Rng rng(derive_seed(seed, {}));
  return simulate_pilot_obs(h_group, rho_tr, rng);
}

CVector mmse_estimate(const CMatrix& r_k, const HermitianSolver& q, const CVector& despread_obs) {
  if (r_k.rows() != q.dim() || despread_obs.size() != q.dim()) {
    throw DimensionMismatch("mmse_estimate: dimension mismatch");
  }
  return r_k * q.solve(despread_obs);
}

EstimateCovariance estimate_cov(const CMatrix& r_k, const HermitianSolver& q) {
  if (r_k.rows() != q.dim()) {
    throw DimensionMismatch("estimate_cov: dimension mismatch");
  }
  EstimateCovariance out;
  out.phi = hermitian_part(r_k * q.solve(r_k));
  out.error = hermitian_part(r_k - out.phi);
  return out;
}

CMatrix cross_cov(const CMatrix& r_i, const CMatrix& r_k, const HermitianSolver& q) {
  if (r_i.rows() != q.dim() || r_k.rows() != q.dim()) {
    throw DimensionMismatch("cross_cov: dimension mismatch");
  }
  return r_i * q.solve(r_k);
}

PilotGroupEstimator::PilotGroupEstimator(std::vector<CMatrix> covariances, double rho_tr)
    : covariances_(std::move(covariances)),
      gram_(pilot_gram(covariances_, rho_tr)),
      rho_tr_(rho_tr) {
  sqrt_covariances_.reserve(covariances_.size());
  stats_.reserve(covariances_.size());
  for (const CMatrix& r : covariances_) {
    sqrt_covariances_.push_back(psd_sqrt(r));
    stats_.push_back(estimate_cov(r, gram_));
  }
}

void PilotGroupEstimator::sample(Rng& rng, std::vector<CVector>& channels,
                                 std::vector<CVector>& estimates) const {
  channels.resize(covariances_.size());
  estimates.resize(covariances_.size());
  for (std::size_t k = 0; k < covariances_.size(); ++k) {
    channels[k] = draw_channel(sqrt_covariances_[k], rng);
  }
  const CVector y = simulate_pilot_obs(channels, rho_tr_, rng);
  const CVector qy = gram_.solve(y);
  for (std::size_t k = 0; k < covariances_.size(); ++k) {
    estimates[k] = covariances_[k] * qy;
  }
}

ChannelSet PilotGroupEstimator::sample(Rng& rng) const {
  ChannelSet out;
  sample(rng, out.true_channels, out.estimates);
  for (const auto& s : stats_) {
    out.est_covs.push_back(s.phi);
    out.err_covs.push_back(s.error);
  }
  out.gram = gram_.matrix();
  return out;
}

}  // namespace mimolab
