// SPDX-License-Identifier: Apache-2.0
//
// Run configuration for the command-line tool. Config files are JSON; all
// angles there are in degrees (*_deg) unless given explicitly as *_rad.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mimolab/covariance.hpp"

namespace mimolab {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { eigenspectrum, sweep_antennas, sweep_sigma, check_asymptotics, two_user_limit };

Command parse_command(const std::string& name);
std::string command_name(Command c);

struct RunConfig {
  Command command = Command::eigenspectrum;
  std::string config_path;
  std::string output_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  unsigned threads = 1;
  nlohmann::json body;  // parsed config file

  std::uint64_t effective_seed() const;
  std::size_t effective_trials(std::size_t fallback = 500) const;
};

nlohmann::json load_json_file(const std::string& path);

// One covariance model with its parameters, instantiable at any M.
struct ModelSpec {
  CovarianceModel model = CovarianceModel::scaled_identity;
  double beta = 1.0;
  double r = 0.5;
  std::optional<double> theta;  // radians; drawn per use when empty
  double delta = 0.29670597283903605;
  double sigma = 1.0;
  std::optional<std::uint64_t> seed;

  std::string label() const;
  // seed feeds lognormal draws when the model entry carries none.
  CovarianceMatrix make(Index m, std::uint64_t seed_fallback) const;
};

ModelSpec model_spec_from_json(const nlohmann::json& j);

// Two-user covariance pair as a function of M.
struct TwoUserFamily {
  enum class Kind { pair, proportional, block_step, diag_perturbation };
  Kind kind = Kind::pair;
  ModelSpec first;   // pair: R1; proportional: base R2
  ModelSpec second;  // pair: R2
  double eta = 2.0;
  std::optional<double> alpha;  // block_step: N = round(alpha M)
  std::optional<Index> block;   // block_step: fixed N
  std::string distribution = "uniform";  // diag_perturbation: uniform | lognormal
  double low = 0.0;
  double high = 1.0;
  double sigma = 1.0;
  std::uint64_t seed = 1;

  std::pair<CovarianceMatrix, CovarianceMatrix> at(Index m) const;
  // eta^2 when the family is proportional.
  std::optional<double> sinr_limit() const;
};

TwoUserFamily two_user_family_from_json(const nlohmann::json& j, std::uint64_t seed);

std::vector<Index> parse_m_grid(const nlohmann::json& j, const char* key);

}  // namespace mimolab
