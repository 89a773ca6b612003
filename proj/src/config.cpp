// SPDX-License-Identifier: Apache-2.0
#include "mimolab/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "mimolab/errors.hpp"
#include "mimolab/rng.hpp"

namespace mimolab {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::optional<double> angle(const nlohmann::json& j, const std::string& base) {
  if (j.contains(base)) {
    throw ConfigError("angle '" + base + "' needs a unit suffix: " + base + "_deg or " + base + "_rad");
  }
  if (j.contains(base + "_rad") && j.contains(base + "_deg")) {
    throw ConfigError("give either " + base + "_rad or " + base + "_deg, not both");
  }
  if (j.contains(base + "_rad")) return j.at(base + "_rad").get<double>();
  if (j.contains(base + "_deg")) return j.at(base + "_deg").get<double>() * kDegToRad;
  return std::nullopt;
}

}  // namespace

Command parse_command(const std::string& name) {
  if (name == "eigenspectrum") return Command::eigenspectrum;
  if (name == "sweep-antennas") return Command::sweep_antennas;
  if (name == "sweep-sigma") return Command::sweep_sigma;
  if (name == "check-asymptotics") return Command::check_asymptotics;
  if (name == "two-user-limit") return Command::two_user_limit;
  throw ConfigError("unknown command '" + name + "'");
}

std::string command_name(Command c) {
  switch (c) {
    case Command::eigenspectrum: return "eigenspectrum";
    case Command::sweep_antennas: return "sweep-antennas";
    case Command::sweep_sigma: return "sweep-sigma";
    case Command::check_asymptotics: return "check-asymptotics";
    case Command::two_user_limit: return "two-user-limit";
  }
  return "eigenspectrum";
}

std::uint64_t RunConfig::effective_seed() const {
  if (seed) return *seed;
  return body.value("seed", std::uint64_t{1});
}

std::size_t RunConfig::effective_trials(std::size_t fallback) const {
  if (trials) return *trials;
  return body.value("trials", fallback);
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open config file '" + path + "'");
  }
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

std::string ModelSpec::label() const { return std::string(to_string(model)); }

CovarianceMatrix ModelSpec::make(Index m, std::uint64_t seed_fallback) const {
  switch (model) {
    case CovarianceModel::one_ring:
    case CovarianceModel::exp_corr: {
      double th = 0.0;
      if (theta) {
        th = *theta;
      } else {
        Rng rng(derive_seed(seed_fallback, {0x7468ULL}));
        th = std::uniform_real_distribution<double>(-std::numbers::pi, std::numbers::pi)(rng);
      }
      return model == CovarianceModel::one_ring ? one_ring_cov(m, beta, th, delta)
                                                : exp_corr_cov(m, beta, r, th);
    }
    case CovarianceModel::lognormal_diag:
      return lognormal_diag_cov(m, beta, sigma, seed.value_or(seed_fallback));
    case CovarianceModel::scaled_identity:
      return scaled_identity_cov(m, beta);
    case CovarianceModel::custom:
      break;
  }
  throw ConfigError("model '" + label() + "' cannot be generated from parameters");
}

ModelSpec model_spec_from_json(const nlohmann::json& j) {
  ModelSpec s;
  s.model = parse_covariance_model(j.at("model").get<std::string>());
  s.beta = j.value("beta", 1.0);
  s.r = j.value("r", s.r);
  s.theta = angle(j, "theta");
  if (auto d = angle(j, "delta")) s.delta = *d;
  s.sigma = j.value("sigma", s.sigma);
  if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
  return s;
}

std::pair<CovarianceMatrix, CovarianceMatrix> TwoUserFamily::at(Index m) const {
  switch (kind) {
    case Kind::pair:
      return {first.make(m, derive_seed(seed, {1})), second.make(m, derive_seed(seed, {2}))};
    case Kind::proportional: {
      CovarianceMatrix base = first.make(m, derive_seed(seed, {2}));
      return {base.scaled(eta), base};
    }
    case Kind::block_step: {
      Index n = 0;
      if (block) {
        n = *block;
      } else {
        n = static_cast<Index>(std::llround(*alpha * static_cast<double>(m)));
      }
      if (n < 0 || n > m) {
        throw ConfigError("block_step block size exceeds M");
      }
      RVector d1 = RVector::Ones(m);
      d1.head(n).setConstant(2.0);
      return {CovarianceMatrix::from_diagonal(d1), CovarianceMatrix::from_diagonal(RVector::Ones(m))};
    }
    case Kind::diag_perturbation: {
      Rng rng(derive_seed(seed, {3}));
      RVector d1(m);
      if (distribution == "uniform") {
        std::uniform_real_distribution<double> u(low, high);
        for (Index i = 0; i < m; ++i) d1(i) = 1.0 + u(rng);
      } else {
        std::normal_distribution<double> f(0.0, sigma);
        for (Index i = 0; i < m; ++i) d1(i) = 1.0 + std::pow(10.0, f(rng) / 10.0);
      }
      return {CovarianceMatrix::from_diagonal(d1), CovarianceMatrix::from_diagonal(RVector::Ones(m))};
    }
  }
  throw ConfigError("unknown two-user family");
}

std::optional<double> TwoUserFamily::sinr_limit() const {
  if (kind == Kind::proportional) return eta * eta;
  return std::nullopt;
}

TwoUserFamily two_user_family_from_json(const nlohmann::json& j, std::uint64_t seed) {
  TwoUserFamily f;
  f.seed = seed;
  const auto type = j.at("type").get<std::string>();
  if (type == "pair") {
    f.kind = TwoUserFamily::Kind::pair;
    f.first = model_spec_from_json(j.at("r1"));
    f.second = model_spec_from_json(j.at("r2"));
  } else if (type == "proportional") {
    f.kind = TwoUserFamily::Kind::proportional;
    f.first = model_spec_from_json(j.at("base"));
    f.eta = j.value("eta", 2.0);
    if (!(f.eta > 0.0)) throw ConfigError("proportional family needs eta > 0");
  } else if (type == "block_step") {
    f.kind = TwoUserFamily::Kind::block_step;
    if (j.contains("N")) {
      f.block = j.at("N").get<Index>();
    } else {
      f.alpha = j.value("alpha", 0.5);
      if (!(*f.alpha > 0.0 && *f.alpha < 1.0)) throw ConfigError("block_step alpha must lie in (0, 1)");
    }
  } else if (type == "diag_perturbation") {
    f.kind = TwoUserFamily::Kind::diag_perturbation;
    f.distribution = j.value("distribution", std::string("uniform"));
    f.low = j.value("low", 0.0);
    f.high = j.value("high", 1.0);
    f.sigma = j.value("sigma", 1.0);
    if (f.distribution != "uniform" && f.distribution != "lognormal") {
      throw ConfigError("diag_perturbation distribution must be 'uniform' or 'lognormal'");
    }
    if (f.distribution == "uniform" && !(f.low >= 0.0 && f.high > f.low)) {
      throw ConfigError("diag_perturbation uniform range must satisfy 0 <= low < high");
    }
  } else {
    throw ConfigError("unknown two-user family type '" + type + "'");
  }
  return f;
}

std::vector<Index> parse_m_grid(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) {
    throw ConfigError(std::string("config is missing '") + key + "'");
  }
  std::vector<Index> grid = j.at(key).get<std::vector<Index>>();
  if (grid.empty()) {
    throw ConfigError(std::string("'") + key + "' is empty");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 1 || (i > 0 && grid[i] <= grid[i - 1])) {
      throw ConfigError(std::string("'") + key + "' must be positive and strictly increasing");
    }
  }
  return grid;
}

}  // namespace mimolab
