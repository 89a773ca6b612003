// SPDX-License-Identifier: Apache-2.0
#include "mimolab/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>

#include "CLI11.hpp"
#include "mimolab/asymptotics.hpp"
#include "mimolab/errors.hpp"
#include "mimolab/matrix_file.hpp"
#include "mimolab/rng.hpp"
#include "mimolab/scenario.hpp"
#include "mimolab/simulation.hpp"

namespace mimolab {

namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

nlohmann::json default_spectrum_models() {
  return nlohmann::json::array({
      {{"model", "one_ring"}, {"beta", 1.0}, {"delta_deg", 17.0}},
      {{"model", "exp_corr"}, {"beta", 1.0}, {"r", 0.5}},
      {{"model", "lognormal_diag"}, {"beta", 1.0}, {"sigma", 1.0}},
  });
}

std::vector<Scheme> parse_schemes(const nlohmann::json& body) {
  std::vector<Scheme> out;
  if (!body.contains("schemes")) {
    return {Scheme::M_MMSE, Scheme::S_MMSE, Scheme::MRC};
  }
  for (const auto& s : body.at("schemes")) {
    out.push_back(parse_scheme(s.get<std::string>()));
  }
  if (out.empty()) {
    throw ConfigError("'schemes' is empty");
  }
  return out;
}

Scenario scenario_from_body(const nlohmann::json& body, const char* default_preset, std::uint64_t seed) {
  nlohmann::json js = body.contains("scenario") ? body.at("scenario")
                                                : nlohmann::json{{"preset", default_preset}};
  if (!js.contains("seed")) {
    js["seed"] = seed;
  }
  return build_scenario(scenario_spec_from_json(js));
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open output file '" + path + "'");
  }
  return out;
}

void finish_output(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) {
    throw IoError("write failed for '" + path + "'");
  }
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  auto out = open_output(path);
  out << j.dump(2) << '\n';
  finish_output(out, path);
}

}  // namespace

std::vector<SpectrumRow> cmd_eigenspectrum(const RunConfig& config) {
  const nlohmann::json& body = config.body;
  const Index m = body.at("M").get<Index>();
  if (m < 1) {
    throw ConfigError("eigenspectrum: M must be positive");
  }
  const int draws = body.value("theta_draws", 10);
  if (draws < 1) {
    throw ConfigError("eigenspectrum: theta_draws must be positive");
  }
  const bool normalize = body.value("normalize", false);
  const nlohmann::json models = body.contains("models") ? body.at("models") : default_spectrum_models();
  const std::uint64_t seed = config.effective_seed();

  std::vector<SpectrumRow> rows;
  std::uint64_t model_index = 0;
  for (const auto& jm : models) {
    const ModelSpec spec = model_spec_from_json(jm);
    RVector sum = RVector::Zero(m);
    for (int d = 0; d < draws; ++d) {
      const CovarianceMatrix r = spec.make(m, derive_seed(seed, {model_index, static_cast<std::uint64_t>(d)}));
      sum += eigen_spectrum(r, normalize).values;
    }
    sum /= static_cast<double>(draws);
    for (Index i = 0; i < m; ++i) {
      rows.push_back({static_cast<int>(i + 1), sum(i), spec.label()});
    }
    ++model_index;
  }
  return rows;
}

void write_spectrum_csv(std::ostream& out, const std::vector<SpectrumRow>& rows) {
  out << "index,eigenvalue,model\n";
  for (const SpectrumRow& r : rows) {
    out << r.index << ',' << format_double(r.eigenvalue) << ',' << r.model << '\n';
  }
}

nlohmann::json cmd_check_asymptotics(const RunConfig& config) {
  const nlohmann::json& body = config.body;
  const TwoUserFamily family = two_user_family_from_json(body.at("family"), config.effective_seed());
  std::vector<Index> grid = body.contains("M_grid") ? parse_m_grid(body, "M_grid")
                                                    : std::vector<Index>{32, 64, 128, 256, 512};
  const double rho = db_to_linear(body.value("rho_db", 0.0));
  const double rho_tr = db_to_linear(body.value("rho_tr_db", body.value("rho_db", 0.0)));
  GrowthRule rule;
  rule.decay_factor = body.value("decay_factor", rule.decay_factor);

  std::vector<std::pair<CovarianceMatrix, CovarianceMatrix>> pairs;
  for (Index m : grid) {
    pairs.push_back(family.at(m));
  }
  const auto records = asymptotic_diagnostics(pairs, rho_tr, rho, rule);

  nlohmann::json out;
  out["command"] = "check-asymptotics";
  out["family"] = body.at("family");
  out["rho"] = rho;
  out["rho_tr"] = rho_tr;
  out["decay_factor"] = rule.decay_factor;
  out["records"] = nlohmann::json::array();
  for (const auto& rec : records) {
    out["records"].push_back({{"M", rec.m},
                              {"beta11", rec.coeffs.beta11},
                              {"beta12", rec.coeffs.beta12},
                              {"beta12_imag", rec.coeffs.beta12_imag},
                              {"beta22", rec.coeffs.beta22},
                              {"delta", rec.coeffs.delta},
                              {"frob_stat", rec.frob_stat},
                              {"lambda_star", rec.lambda_star},
                              {"verdict", std::string(to_string(rec.verdict))}});
  }
  out["verdict"] = std::string(to_string(records.back().verdict));
  return out;
}

nlohmann::json cmd_two_user_limit(const RunConfig& config) {
  const nlohmann::json& body = config.body;
  const std::uint64_t seed = config.effective_seed();
  const TwoUserFamily family = two_user_family_from_json(body.at("family"), seed);
  std::vector<Index> grid = body.contains("M_grid") ? parse_m_grid(body, "M_grid")
                                                    : std::vector<Index>{64, 128, 256};
  const double rho = db_to_linear(body.value("rho_db", 0.0));
  RunOptions opts;
  opts.trials = config.effective_trials();
  opts.seed = seed;
  opts.threads = config.threads;
  const Scheme scheme[] = {Scheme::M_MMSE};

  nlohmann::json out;
  out["command"] = "two-user-limit";
  out["family"] = body.at("family");
  out["rho"] = rho;
  if (auto lim = family.sinr_limit()) out["sinr_limit"] = *lim;
  out["records"] = nlohmann::json::array();
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const auto [r1, r2] = family.at(grid[g]);
    ScenarioInstance inst;
    inst.cells = 2;
    inst.users_per_cell = 1;
    inst.rho = rho;
    inst.rho_tr = rho;
    inst.covariances = {r1.dense(), r2.dense()};
    const UplinkSimulator sim(inst);
    const TrialTable table = run_trials(sim, scheme, opts, g);
    std::vector<double> gamma(table.trials);
    for (std::size_t t = 0; t < table.trials; ++t) gamma[t] = table.at(t, 0, 0);
    const double mean_gamma = compensated_sum(gamma) / static_cast<double>(gamma.size());
    const TwoUserStatistics stats(inst.covariances[0], inst.covariances[1], rho, rho);
    const AsymptoticCoefficients coeffs = beta_coefficients(stats);
    const SEPoint se = summarize_se(table.trial_se(0), static_cast<double>(grid[g]), Scheme::M_MMSE, seed);
    out["records"].push_back({{"M", grid[g]},
                              {"mean_gamma", mean_gamma},
                              {"mean_gamma_over_M", mean_gamma / static_cast<double>(grid[g])},
                              {"delta", coeffs.delta},
                              {"se_bits", se.se_bits},
                              {"half_width", se.half_width},
                              {"trials", table.trials}});
  }
  return out;
}

SECurve cmd_sweeps(const RunConfig& config) {
  const nlohmann::json& body = config.body;
  const std::vector<Scheme> schemes = parse_schemes(body);
  RunOptions opts;
  opts.trials = config.effective_trials();
  opts.seed = config.effective_seed();
  opts.threads = config.threads;
  if (config.command == Command::sweep_antennas) {
    const Scenario scenario = scenario_from_body(body, "cell_edge_exp_corr", opts.seed);
    const std::vector<Index> grid = body.contains("M_grid") ? parse_m_grid(body, "M_grid")
                                                            : std::vector<Index>{32, 64, 128, 256};
    return sweep_antennas(scenario, grid, schemes, opts);
  }
  if (config.command == Command::sweep_sigma) {
    const Scenario scenario = scenario_from_body(body, "cell_edge_lognormal", opts.seed);
    std::vector<double> sigmas = body.contains("sigma_grid")
                                     ? body.at("sigma_grid").get<std::vector<double>>()
                                     : std::vector<double>{0, 1, 2, 3, 4, 5};
    if (sigmas.empty()) {
      throw ConfigError("'sigma_grid' is empty");
    }
    return sweep_sigma(scenario, sigmas, body.value("M", Index{256}), schemes, opts);
  }
  throw ConfigError("cmd_sweeps: not a sweep command");
}

int run_command(const RunConfig& config, std::ostream& err) {
  try {
    if (config.output_path.empty()) {
      throw ConfigError("--out is required");
    }
    switch (config.command) {
      case Command::eigenspectrum: {
        const auto rows = cmd_eigenspectrum(config);
        auto out = open_output(config.output_path);
        write_spectrum_csv(out, rows);
        finish_output(out, config.output_path);
        break;
      }
      case Command::check_asymptotics:
        write_json_file(config.output_path, cmd_check_asymptotics(config));
        break;
      case Command::two_user_limit:
        write_json_file(config.output_path, cmd_two_user_limit(config));
        break;
      case Command::sweep_antennas:
      case Command::sweep_sigma: {
        const SECurve curve = cmd_sweeps(config);
        std::filesystem::path csv_path(config.output_path);
        std::filesystem::path json_path = csv_path;
        if (csv_path.extension() == ".json") {
          csv_path.replace_extension(".csv");
        } else {
          json_path.replace_extension(".json");
        }
        auto out = open_output(csv_path.string());
        write_se_csv(out, curve);
        finish_output(out, csv_path.string());
        write_json_file(json_path.string(), se_curve_to_json(curve));
        break;
      }
    }
    return kExitOk;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const MatrixFileError& e) {
    err << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const nlohmann::json::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    // ConfigError, InvalidParameter, DimensionMismatch, ContractViolation, DegenerateScenario
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Massive MIMO pilot-contamination laboratory"};
  std::string command;
  RunConfig config;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  app.add_option("command", command,
                 "eigenspectrum | sweep-antennas | sweep-sigma | check-asymptotics | two-user-limit")
      ->required();
  app.add_option("--config", config.config_path, "JSON configuration file")->required();
  app.add_option("--out", config.output_path, "output file")->required();
  auto* seed_opt = app.add_option("--seed", seed, "master RNG seed (overrides the config)");
  auto* trials_opt = app.add_option("--trials", trials, "Monte Carlo trials per grid point")
                         ->check(CLI::PositiveNumber);
  app.add_option("--threads", config.threads, "worker threads")->check(CLI::PositiveNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  try {
    config.command = parse_command(command);
    config.body = load_json_file(config.config_path);
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  if (*seed_opt) config.seed = seed;
  if (*trials_opt) config.trials = trials;
  return run_command(config, std::cerr);
}

}  // namespace mimolab
