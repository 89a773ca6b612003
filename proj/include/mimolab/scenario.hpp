// SPDX-License-Identifier: Apache-2.0
//
// Multicell uplink scenario described by per-link SNRs at the serving BS.
//
// Every link (l, i) from UE i in cell l into the serving BS gets a covariance
// model and an average SNR target. With rho = rho_tr fixed by rho_db, the
// link covariance is scaled so that rho * tr(R)/M equals the target exactly.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mimolab/covariance.hpp"

namespace mimolab {

struct LinkSpec {
  int cell = 0;
  int user = 0;
  double snr_db = 0.0;
  CovarianceModel model = CovarianceModel::scaled_identity;
  double r = 0.5;                       // exp_corr
  std::optional<double> theta;          // exp_corr / one_ring, radians; drawn if empty
  double delta = 0.29670597283903605;   // one_ring, radians (17 degrees)
  double sigma = 0.0;                   // lognormal_diag, dB
  std::optional<std::uint64_t> seed;    // lognormal_diag; derived if empty
  std::string matrix_file;              // custom
};

struct ScenarioSpec {
  int cells = 1;
  int users_per_cell = 1;
  int serving_cell = 0;
  double rho_db = 0.0;
  std::uint64_t seed = 1;
  std::vector<LinkSpec> links;
};

// Resolved copy of the per-M statistics of a scenario.
struct ScenarioInstance {
  int cells = 1;
  int users_per_cell = 1;
  int serving_cell = 0;
  double rho = 1.0;
  double rho_tr = 1.0;
  // Index cell * users_per_cell + user.
  std::vector<CMatrix> covariances;

  Index dim() const { return covariances.empty() ? 0 : covariances.front().rows(); }
  const CMatrix& covariance(int cell, int user) const {
    return covariances[static_cast<std::size_t>(cell * users_per_cell + user)];
  }
};

class Scenario {
 public:
  const ScenarioSpec& spec() const { return spec_; }
  double rho() const { return rho_; }
  double rho_tr() const { return rho_; }
  int cells() const { return spec_.cells; }
  int users_per_cell() const { return spec_.users_per_cell; }

  const LinkSpec& link(int cell, int user) const;

  CovarianceMatrix link_covariance(int cell, int user, Index m) const;
  ScenarioInstance instantiate(Index m) const;

  // Copy with every lognormal_diag link's sigma replaced.
  Scenario with_sigma(double sigma) const;

 private:
  friend Scenario build_scenario(const ScenarioSpec& spec);
  ScenarioSpec spec_;
  double rho_ = 1.0;
};

// Validates the layout, sorts links by (cell, user) and resolves every random
// angle and seed from spec.seed so later instantiations are reproducible.
Scenario build_scenario(const ScenarioSpec& spec);

// Seven-cell, one-UE-per-cell, shared-pilot layout: -7.0 dB desired UE,
// -8.6 dB for each neighbouring cell-edge UE.
ScenarioSpec cell_edge_spec(CovarianceModel model, std::uint64_t seed = 1);

ScenarioSpec two_user_spec(const LinkSpec& desired, const LinkSpec& interferer, double rho_db = 0.0,
                           std::uint64_t seed = 1);

// JSON form; angles may be given as theta_deg/delta_deg (converted here) or
// theta_rad/delta_rad. Serialization writes radians so round trips are exact.
ScenarioSpec scenario_spec_from_json(const nlohmann::json& j);
nlohmann::json scenario_spec_to_json(const ScenarioSpec& spec);

}  // namespace mimolab
