// SPDX-License-Identifier: Apache-2.0
#include "mimolab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>
#include <string>

#include "mimolab/errors.hpp"
#include "mimolab/matrix_file.hpp"
#include "mimolab/rng.hpp"

namespace mimolab {

namespace {

constexpr std::uint64_t kThetaStream = 0x7468657461ULL;
constexpr std::uint64_t kShadowStream = 0x736861646fULL;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

bool uses_angle(CovarianceModel model) {
  return model == CovarianceModel::exp_corr || model == CovarianceModel::one_ring;
}

}  // namespace

const LinkSpec& Scenario::link(int cell, int user) const {
  if (cell < 0 || cell >= spec_.cells || user < 0 || user >= spec_.users_per_cell) {
    throw InvalidParameter("scenario link index out of range");
  }
  return spec_.links[static_cast<std::size_t>(cell * spec_.users_per_cell + user)];
}

CovarianceMatrix Scenario::link_covariance(int cell, int user, Index m) const {
  const LinkSpec& l = link(cell, user);
  const double beta = db_to_linear(l.snr_db) / rho_;
  CovarianceMatrix r = [&] {
    switch (l.model) {
      case CovarianceModel::one_ring: return one_ring_cov(m, beta, *l.theta, l.delta);
      case CovarianceModel::exp_corr: return exp_corr_cov(m, beta, l.r, *l.theta);
      case CovarianceModel::lognormal_diag: return lognormal_diag_cov(m, beta, l.sigma, *l.seed);
      case CovarianceModel::scaled_identity: return scaled_identity_cov(m, beta);
      case CovarianceModel::custom: {
        CovarianceMatrix c = read_covariance_file(l.matrix_file);
        if (c.dim() != m) {
          throw DimensionMismatch("custom covariance '" + l.matrix_file + "' has M=" +
                                  std::to_string(c.dim()) + ", requested " + std::to_string(m));
        }
        return c;
      }
    }
    throw InvalidParameter("unsupported covariance model");
  }();
  // Enforce rho * tr(R) / M == SNR exactly, whatever the model's own gain.
  const double correction = beta / r.average_gain();
  return correction == 1.0 ? r : r.scaled(correction);
}

ScenarioInstance Scenario::instantiate(Index m) const {
  ScenarioInstance out;
  out.cells = spec_.cells;
  out.users_per_cell = spec_.users_per_cell;
  out.serving_cell = spec_.serving_cell;
  out.rho = rho_;
  out.rho_tr = rho_;
  out.covariances.reserve(spec_.links.size());
  for (int l = 0; l < spec_.cells; ++l) {
    for (int i = 0; i < spec_.users_per_cell; ++i) {
      out.covariances.push_back(link_covariance(l, i, m).dense());
    }
  }
  return out;
}

Scenario Scenario::with_sigma(double sigma) const {
  ScenarioSpec spec = spec_;
  for (LinkSpec& l : spec.links) {
    if (l.model == CovarianceModel::lognormal_diag) {
      l.sigma = sigma;
    }
  }
  return build_scenario(spec);
}

Scenario build_scenario(const ScenarioSpec& spec) {
  if (spec.cells < 1 || spec.users_per_cell < 1) {
    throw InvalidParameter("scenario needs at least one cell and one user per cell");
  }
  if (spec.serving_cell < 0 || spec.serving_cell >= spec.cells) {
    throw InvalidParameter("serving cell index out of range");
  }
  if (!std::isfinite(spec.rho_db)) {
    throw InvalidParameter("rho_db must be finite");
  }
  const auto expected = static_cast<std::size_t>(spec.cells * spec.users_per_cell);
  if (spec.links.size() != expected) {
    throw InvalidParameter("scenario needs exactly one link per (cell, user): expected " +
                           std::to_string(expected) + ", got " + std::to_string(spec.links.size()));
  }
  Scenario out;
  out.spec_ = spec;
  out.rho_ = db_to_linear(spec.rho_db);
  auto& links = out.spec_.links;
  std::sort(links.begin(), links.end(), [](const LinkSpec& a, const LinkSpec& b) {
    return std::tie(a.cell, a.user) < std::tie(b.cell, b.user);
  });
  for (std::size_t idx = 0; idx < links.size(); ++idx) {
    LinkSpec& l = links[idx];
    const int want_cell = static_cast<int>(idx) / spec.users_per_cell;
    const int want_user = static_cast<int>(idx) % spec.users_per_cell;
    if (l.cell != want_cell || l.user != want_user) {
      throw InvalidParameter("scenario links must cover every (cell, user) pair exactly once");
    }
    if (!std::isfinite(l.snr_db)) {
      throw InvalidParameter("link SNR must be finite");
    }
    if (uses_angle(l.model) && !l.theta) {
      Rng rng = make_stream(spec.seed, {kThetaStream, idx});
      std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
      l.theta = angle(rng);
    }
    if (l.model == CovarianceModel::lognormal_diag && !l.seed) {
      l.seed = derive_seed(spec.seed, {kShadowStream, idx});
    }
    if (l.model == CovarianceModel::custom && l.matrix_file.empty()) {
      throw InvalidParameter("custom link needs a matrix_file");
    }
  }
  // Parameter validation happens once here at a small size.
  for (int c = 0; c < spec.cells; ++c) {
    for (int u = 0; u < spec.users_per_cell; ++u) {
      const LinkSpec& l = out.link(c, u);
      if (l.model != CovarianceModel::custom) {
        out.link_covariance(c, u, 2);
      }
    }
  }
  return out;
}

ScenarioSpec cell_edge_spec(CovarianceModel model, std::uint64_t seed) {
  ScenarioSpec spec;
  spec.cells = 7;
  spec.users_per_cell = 1;
  spec.serving_cell = 0;
  spec.rho_db = 0.0;
  spec.seed = seed;
  for (int l = 0; l < 7; ++l) {
    LinkSpec link;
    link.cell = l;
    link.user = 0;
    link.snr_db = l == 0 ? -7.0 : -8.6;
    link.model = model;
    link.r = 0.5;
    link.sigma = 1.0;
    spec.links.push_back(link);
  }
  return spec;
}

ScenarioSpec two_user_spec(const LinkSpec& desired, const LinkSpec& interferer, double rho_db,
                           std::uint64_t seed) {
  ScenarioSpec spec;
  spec.cells = 2;
  spec.users_per_cell = 1;
  spec.serving_cell = 0;
  spec.rho_db = rho_db;
  spec.seed = seed;
  spec.links = {desired, interferer};
  spec.links[0].cell = 0;
  spec.links[0].user = 0;
  spec.links[1].cell = 1;
  spec.links[1].user = 0;
  return spec;
}

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::optional<double> angle_field(const nlohmann::json& j, const char* base) {
  const std::string rad = std::string(base) + "_rad";
  const std::string deg = std::string(base) + "_deg";
  if (j.contains(base)) {
    throw InvalidParameter(std::string("angle '") + base + "' needs a unit suffix: " + deg + " or " + rad);
  }
  if (j.contains(rad) && j.contains(deg)) {
    throw InvalidParameter("give either " + rad + " or " + deg + ", not both");
  }
  if (j.contains(rad)) {
    return j.at(rad).get<double>();
  }
  if (j.contains(deg)) {
    return j.at(deg).get<double>() * kDegToRad;
  }
  return std::nullopt;
}

}  // namespace

ScenarioSpec scenario_spec_from_json(const nlohmann::json& j) {
  ScenarioSpec spec;
  if (j.contains("preset")) {
    const auto preset = j.at("preset").get<std::string>();
    const auto seed = j.value("seed", std::uint64_t{1});
    if (preset == "cell_edge_exp_corr") {
      spec = cell_edge_spec(CovarianceModel::exp_corr, seed);
    } else if (preset == "cell_edge_lognormal") {
      spec = cell_edge_spec(CovarianceModel::lognormal_diag, seed);
    } else {
      throw InvalidParameter("unknown scenario preset '" + preset + "'");
    }
    if (j.contains("r")) {
      for (auto& l : spec.links) l.r = j.at("r").get<double>();
    }
    if (j.contains("sigma")) {
      for (auto& l : spec.links) l.sigma = j.at("sigma").get<double>();
    }
    return spec;
  }
  spec.cells = j.value("cells", 1);
  spec.users_per_cell = j.value("users_per_cell", 1);
  spec.serving_cell = j.value("serving_cell", 0);
  spec.rho_db = j.value("rho_db", 0.0);
  spec.seed = j.value("seed", std::uint64_t{1});
  for (const auto& jl : j.at("links")) {
    LinkSpec l;
    l.cell = jl.value("cell", 0);
    l.user = jl.value("user", 0);
    l.snr_db = jl.at("snr_db").get<double>();
    l.model = parse_covariance_model(jl.at("model").get<std::string>());
    l.r = jl.value("r", l.r);
    l.theta = angle_field(jl, "theta");
    if (auto d = angle_field(jl, "delta")) {
      l.delta = *d;
    }
    l.sigma = jl.value("sigma", l.sigma);
    if (jl.contains("seed")) {
      l.seed = jl.at("seed").get<std::uint64_t>();
    }
    l.matrix_file = jl.value("matrix_file", std::string{});
    spec.links.push_back(l);
  }
  return spec;
}

nlohmann::json scenario_spec_to_json(const ScenarioSpec& spec) {
  nlohmann::json j;
  j["cells"] = spec.cells;
  j["users_per_cell"] = spec.users_per_cell;
  j["serving_cell"] = spec.serving_cell;
  j["rho_db"] = spec.rho_db;
  j["seed"] = spec.seed;
  j["links"] = nlohmann::json::array();
  for (const LinkSpec& l : spec.links) {
    nlohmann::json jl;
    jl["cell"] = l.cell;
    jl["user"] = l.user;
    jl["snr_db"] = l.snr_db;
    jl["model"] = std::string(to_string(l.model));
    switch (l.model) {
      case CovarianceModel::exp_corr:
        jl["r"] = l.r;
        break;
      case CovarianceModel::one_ring:
        jl["delta_rad"] = l.delta;
        break;
      case CovarianceModel::lognormal_diag:
        jl["sigma"] = l.sigma;
        break;
      case CovarianceModel::custom:
        jl["matrix_file"] = l.matrix_file;
        break;
      case CovarianceModel::scaled_identity:
        break;
    }
    if (l.theta) {
      jl["theta_rad"] = *l.theta;
    }
    if (l.seed) {
      jl["seed"] = *l.seed;
    }
    j["links"].push_back(jl);
  }
  return j;
}

}  // namespace mimolab
