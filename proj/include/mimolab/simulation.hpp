// SPDX-License-Identifier: Apache-2.0
//
// Monte Carlo evaluation of the uplink SE of the serving cell's users.
//
// Trial t at grid point g draws from the stream keyed by (seed, g, t), and
// per-trial values are reduced in trial order, so results are bit-identical
// for any number of worker threads.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mimolab/combining.hpp"
#include "mimolab/estimation.hpp"
#include "mimolab/scenario.hpp"
#include "mimolab/se_curve.hpp"

namespace mimolab {

// Per-M deterministic statistics of a scenario at the serving BS: one pilot
// group per pilot index, Z for M-MMSE and Z-bar for S-MMSE.
class UplinkSimulator {
 public:
  explicit UplinkSimulator(const ScenarioInstance& instance);

  Index dim() const { return dim_; }
  int cells() const { return cells_; }
  int users_per_cell() const { return users_; }
  int serving_cell() const { return serving_; }
  const InterferenceCore& core() const { return core_; }
  const InterferenceCore& smmse_core() const { return smmse_core_; }
  const PilotGroupEstimator& pilot_group(int user) const { return groups_[static_cast<std::size_t>(user)]; }

  // Draws one coherence block and returns gamma[k * schemes.size() + s] for
  // every serving-cell user k. A zero target estimate yields gamma = 0.
  std::vector<double> trial(Rng& rng, std::span<const Scheme> schemes) const;

 private:
  Index dim_;
  int cells_;
  int users_;
  int serving_;
  std::vector<PilotGroupEstimator> groups_;  // indexed by pilot (= user index)
  InterferenceCore core_;
  InterferenceCore smmse_core_;
};

struct TrialTable {
  std::vector<Scheme> schemes;
  int targets = 1;
  std::size_t trials = 0;
  std::vector<double> gamma;

  double at(std::size_t trial, int target, std::size_t scheme) const {
    return gamma[(trial * static_cast<std::size_t>(targets) + static_cast<std::size_t>(target)) *
                     schemes.size() +
                 scheme];
  }
  // Per-trial SE log2(1 + gamma) averaged over the serving-cell users.
  std::vector<double> trial_se(std::size_t scheme) const;
};

struct RunOptions {
  std::size_t trials = 500;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

TrialTable run_trials(const UplinkSimulator& sim, std::span<const Scheme> schemes,
                      const RunOptions& options, std::uint64_t grid_index = 0);

// Mean, sample variance and 95% half-width of per-trial values.
SEPoint summarize_se(std::span<const double> per_trial_se, double sweep_value, Scheme scheme,
                     std::uint64_t seed);

std::vector<SEPoint> run_uplink_se(const Scenario& scenario, Index m, std::span<const Scheme> schemes,
                                   const RunOptions& options, std::uint64_t grid_index = 0);

// Same, on an explicit instance (custom or degenerate statistics).
std::vector<SEPoint> run_uplink_se(const ScenarioInstance& instance, std::span<const Scheme> schemes,
                                   const RunOptions& options, double sweep_value,
                                   std::uint64_t grid_index = 0);

SECurve sweep_antennas(const Scenario& scenario, std::span<const Index> m_grid,
                       std::span<const Scheme> schemes, const RunOptions& options);

SECurve sweep_sigma(const Scenario& scenario, std::span<const double> sigma_grid, Index m,
                    std::span<const Scheme> schemes, const RunOptions& options);

}  // namespace mimolab
