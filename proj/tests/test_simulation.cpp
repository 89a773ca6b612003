// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "mimolab/asymptotics.hpp"
#include "mimolab/errors.hpp"
#include "mimolab/scenario.hpp"
#include "mimolab/se_curve.hpp"
#include "mimolab/simulation.hpp"

using namespace mimolab;

namespace {

const Scheme kAll[] = {Scheme::M_MMSE, Scheme::S_MMSE, Scheme::MRC};

ScenarioInstance two_user_instance(CMatrix r1, CMatrix r2, double rho) {
  ScenarioInstance inst;
  inst.cells = 2;
  inst.users_per_cell = 1;
  inst.rho = rho;
  inst.rho_tr = rho;
  inst.covariances = {std::move(r1), std::move(r2)};
  return inst;
}

std::string csv_of(const SECurve& c) {
  std::ostringstream os;
  write_se_csv(os, c);
  return os.str();
}

}  // namespace

TEST_CASE("cell-edge scenario at M=8 has the configured SNRs") {
  const Scenario sc = build_scenario(cell_edge_spec(CovarianceModel::exp_corr, 1));
  const ScenarioInstance inst = sc.instantiate(8);
  REQUIRE(inst.covariances.size() == 7);
  REQUIRE(inst.rho == inst.rho_tr);
  for (int l = 0; l < 7; ++l) {
    const double snr = inst.rho * inst.covariance(l, 0).trace().real() / 8.0;
    REQUIRE(10 * std::log10(snr) == Catch::Approx(l == 0 ? -7.0 : -8.6).epsilon(1e-12));
    REQUIRE(sc.link(l, 0).theta.has_value());
    REQUIRE(*sc.link(l, 0).theta >= -std::numbers::pi);
    REQUIRE(*sc.link(l, 0).theta < std::numbers::pi);
  }
  // Lognormal links are rescaled to hit the SNR exactly, too.
  const ScenarioInstance ln = build_scenario(cell_edge_spec(CovarianceModel::lognormal_diag, 1)).instantiate(64);
  for (int l = 0; l < 7; ++l) {
    const double snr = ln.rho * ln.covariance(l, 0).trace().real() / 64.0;
    REQUIRE(10 * std::log10(snr) == Catch::Approx(l == 0 ? -7.0 : -8.6).epsilon(1e-12));
  }
}

TEST_CASE("two-user identity scenario gives rho = 1") {
  LinkSpec a;
  a.model = CovarianceModel::scaled_identity;
  const Scenario sc = build_scenario(two_user_spec(a, a, 0.0));
  REQUIRE(sc.rho() == 1.0);
  REQUIRE(sc.rho_tr() == 1.0);
  const auto inst = sc.instantiate(3);
  REQUIRE((inst.covariances[0] - CMatrix::Identity(3, 3)).norm() == 0.0);
}

TEST_CASE("scenario JSON round trip gives identical matrices") {
  for (auto model : {CovarianceModel::exp_corr, CovarianceModel::lognormal_diag, CovarianceModel::one_ring}) {
    const Scenario a = build_scenario(cell_edge_spec(model, 12));
    const nlohmann::json j = scenario_spec_to_json(a.spec());
    const Scenario b = build_scenario(scenario_spec_from_json(nlohmann::json::parse(j.dump())));
    const auto ia = a.instantiate(6);
    const auto ib = b.instantiate(6);
    for (std::size_t k = 0; k < ia.covariances.size(); ++k) {
      REQUIRE(ia.covariances[k] == ib.covariances[k]);
    }
  }
}

TEST_CASE("scenario JSON accepts degrees and presets") {
  const auto j = nlohmann::json::parse(R"({
    "cells": 2, "users_per_cell": 1, "rho_db": 3.0,
    "links": [
      {"cell": 0, "user": 0, "snr_db": 0.0, "model": "exp_corr", "r": 0.5, "theta_deg": 90},
      {"cell": 1, "user": 0, "snr_db": -3.0, "model": "one_ring", "theta_deg": 0, "delta_deg": 10}
    ]})");
  const Scenario sc = build_scenario(scenario_spec_from_json(j));
  REQUIRE(*sc.link(0, 0).theta == Catch::Approx(std::numbers::pi / 2).epsilon(1e-15));
  REQUIRE(sc.link(1, 0).delta == Catch::Approx(10 * std::numbers::pi / 180).epsilon(1e-15));
  const auto p = scenario_spec_from_json(nlohmann::json::parse(R"({"preset": "cell_edge_lognormal", "sigma": 2})"));
  REQUIRE(p.links.size() == 7);
  REQUIRE(p.links[3].sigma == 2.0);
  REQUIRE_THROWS(scenario_spec_from_json(nlohmann::json::parse(R"({"preset": "nope"})")));
  REQUIRE_THROWS(scenario_spec_from_json(nlohmann::json::parse(
      R"({"links": [{"model": "exp_corr", "snr_db": 0, "theta": 1.0}]})")));
}

TEST_CASE("scenario validation") {
  ScenarioSpec s = cell_edge_spec(CovarianceModel::exp_corr);
  s.links.pop_back();
  REQUIRE_THROWS_AS(build_scenario(s), InvalidParameter);
  s = cell_edge_spec(CovarianceModel::exp_corr);
  s.links[2].cell = 1;
  REQUIRE_THROWS_AS(build_scenario(s), InvalidParameter);
  s = cell_edge_spec(CovarianceModel::exp_corr);
  s.serving_cell = 9;
  REQUIRE_THROWS_AS(build_scenario(s), InvalidParameter);
  s = cell_edge_spec(CovarianceModel::exp_corr);
  s.links[0].r = 1.5;
  REQUIRE_THROWS_AS(build_scenario(s), InvalidParameter);
  s = cell_edge_spec(CovarianceModel::exp_corr);
  s.links[0].snr_db = std::numeric_limits<double>::infinity();
  REQUIRE_THROWS_AS(build_scenario(s), InvalidParameter);
  s = cell_edge_spec(CovarianceModel::exp_corr);
  s.links[0].model = CovarianceModel::custom;
  REQUIRE_THROWS_AS(build_scenario(s), InvalidParameter);
}

TEST_CASE("theta is frozen across M") {
  const Scenario sc = build_scenario(cell_edge_spec(CovarianceModel::exp_corr, 5));
  const auto small = sc.instantiate(4);
  const auto large = sc.instantiate(9);
  for (std::size_t k = 0; k < small.covariances.size(); ++k) {
    REQUIRE(std::abs(small.covariances[k](0, 1) - large.covariances[k](0, 1)) < 1e-15);
  }
}

TEST_CASE("noise-only array gain") {
  // Target R = I, interferers silent, high SNR: SE ~ log2(rho M).
  RunOptions opts;
  opts.trials = 300;
  opts.seed = 3;
  auto se_at = [&](Index m) {
    const auto inst = two_user_instance(CMatrix::Identity(m, m), CMatrix::Zero(m, m), 1e4);
    return run_uplink_se(inst, std::span<const Scheme>(kAll, 3), opts, static_cast<double>(m));
  };
  const auto a = se_at(16);
  const auto b = se_at(64);
  for (std::size_t s = 0; s < 3; ++s) {
    REQUIRE(std::abs((b[s].se_bits - a[s].se_bits) - 2.0) < 0.2);
  }
}

TEST_CASE("results are identical for any thread count") {
  const Scenario sc = build_scenario(cell_edge_spec(CovarianceModel::exp_corr, 2));
  const Index grid[] = {8, 16};
  RunOptions one;
  one.trials = 60;
  one.seed = 99;
  RunOptions many = one;
  many.threads = 4;
  const SECurve a = sweep_antennas(sc, grid, kAll, one);
  const SECurve b = sweep_antennas(sc, grid, kAll, many);
  REQUIRE(csv_of(a) == csv_of(b));
  RunOptions other = one;
  other.seed = 100;
  REQUIRE(csv_of(a) != csv_of(sweep_antennas(sc, grid, kAll, other)));
}

TEST_CASE("half widths shrink like one over root trials") {
  const Scenario sc = build_scenario(cell_edge_spec(CovarianceModel::exp_corr, 2));
  const auto inst = sc.instantiate(16);
  const Scheme mrc[] = {Scheme::MRC};
  RunOptions a;
  a.trials = 500;
  RunOptions b = a;
  b.trials = 2000;
  const double wa = run_uplink_se(inst, mrc, a, 16.0)[0].half_width;
  const double wb = run_uplink_se(inst, mrc, b, 16.0)[0].half_width;
  REQUIRE(wa / wb == Catch::Approx(2.0).epsilon(0.2));
}

TEST_CASE("orthogonal supports: shared pilot matches the contamination-free baseline") {
  const Index m = 16;
  CMatrix r1 = CMatrix::Zero(m, m);
  CMatrix r2 = CMatrix::Zero(m, m);
  for (Index i = 0; i < m / 2; ++i) r1(i, i) = 2.0;
  for (Index i = m / 2; i < m; ++i) r2(i, i) = 2.0;
  const Scheme mm[] = {Scheme::M_MMSE};
  RunOptions opts;
  opts.trials = 2000;
  opts.seed = 8;
  const auto shared = run_uplink_se(two_user_instance(r1, r2, 1.0), mm, opts, 16.0);
  // Baseline: UE 2 on its own pilot, so it does not enter UE 1's estimate;
  // modeled as a single-user cell seeing UE 2 only through data interference
  // with a perfectly orthogonal covariance (which contributes nothing).
  ScenarioInstance alone;
  alone.cells = 1;
  alone.users_per_cell = 1;
  alone.covariances = {r1};
  RunOptions opts2 = opts;
  opts2.seed = 9;
  const auto base = run_uplink_se(alone, mm, opts2, 16.0);
  const double tol = std::hypot(shared[0].half_width, base[0].half_width) * 1.5;
  REQUIRE(std::abs(shared[0].se_bits - base[0].se_bits) < tol);
}

TEST_CASE("two-user exp_corr vs identity: gamma / M tracks delta at M=256") {
  const Index m = 256;
  const CMatrix r1 = exp_corr_cov(m, 1.0, 0.5, 0.4).dense();
  const CMatrix r2 = CMatrix::Identity(m, m);
  const UplinkSimulator sim(two_user_instance(r1, r2, 1.0));
  const Scheme mm[] = {Scheme::M_MMSE};
  RunOptions opts;
  opts.trials = 300;
  opts.seed = 4;
  const TrialTable t = run_trials(sim, mm, opts);
  std::vector<double> g(t.trials);
  for (std::size_t i = 0; i < t.trials; ++i) g[i] = t.at(i, 0, 0) / static_cast<double>(m);
  const double mean = compensated_sum(g) / static_cast<double>(g.size());
  const double delta = asymptotic_delta(beta_coefficients(TwoUserStatistics(r1, r2, 1.0, 1.0)));
  REQUIRE(std::abs(mean - delta) < 0.15 * delta);
}

TEST_CASE("per-trial scheme ordering and a zero target estimate") {
  const Scenario sc = build_scenario(cell_edge_spec(CovarianceModel::lognormal_diag, 3));
  const UplinkSimulator sim(sc.instantiate(24));
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    const auto g = sim.trial(rng, kAll);
    REQUIRE(g[0] >= g[1] * (1 - 1e-12));
    REQUIRE(g[0] >= g[2] * (1 - 1e-12));
  }
  const auto inst = two_user_instance(CMatrix::Zero(4, 4), CMatrix::Identity(4, 4), 1.0);
  const UplinkSimulator zero(inst);
  const auto g = zero.trial(rng, kAll);
  for (double v : g) REQUIRE(v == 0.0);
}

TEST_CASE("run options and grids are validated") {
  const Scenario sc = build_scenario(cell_edge_spec(CovarianceModel::exp_corr, 2));
  RunOptions opts;
  opts.trials = 0;
  REQUIRE_THROWS_AS(run_uplink_se(sc, 8, kAll, opts), InvalidParameter);
  opts.trials = 5;
  REQUIRE_THROWS_AS(run_uplink_se(sc, 8, std::span<const Scheme>{}, opts), InvalidParameter);
  REQUIRE_THROWS_AS(sweep_antennas(sc, std::span<const Index>{}, kAll, opts), InvalidParameter);
  const Index bad[] = {16, 8};
  REQUIRE_THROWS_AS(sweep_antennas(sc, bad, kAll, opts), InvalidParameter);
  const double sig[] = {0.0, 1.0};
  REQUIRE_THROWS_AS(sweep_sigma(sc, sig, 8, kAll, opts), InvalidParameter);
  const Scenario ln = build_scenario(cell_edge_spec(CovarianceModel::lognormal_diag, 2));
  REQUIRE_THROWS_AS(sweep_sigma(ln, std::span<const double>{}, 8, kAll, opts), InvalidParameter);
  const double neg[] = {-1.0};
  REQUIRE_THROWS_AS(sweep_sigma(ln, neg, 8, kAll, opts), InvalidParameter);
  ScenarioInstance broken;
  broken.cells = 2;
  broken.covariances = {CMatrix::Identity(2, 2)};
  REQUIRE_THROWS_AS(UplinkSimulator(broken), DimensionMismatch);
}

TEST_CASE("sigma sweep at sigma = 0 makes all schemes equal") {
  const Scenario ln = build_scenario(cell_edge_spec(CovarianceModel::lognormal_diag, 2));
  const double sig[] = {0.0};
  RunOptions opts;
  opts.trials = 100;
  const SECurve c = sweep_sigma(ln, sig, 32, kAll, opts);
  REQUIRE(c.points.size() == 3);
  for (const auto& p : c.points) {
    REQUIRE(std::abs(p.se_bits - c.points[0].se_bits) < 1e-9);
  }
}

TEST_CASE("SE curve CSV round trip") {
  const Scenario sc = build_scenario(cell_edge_spec(CovarianceModel::exp_corr, 2));
  const Index grid[] = {4, 8};
  RunOptions opts;
  opts.trials = 20;
  const SECurve c = sweep_antennas(sc, grid, kAll, opts);
  const std::string text = csv_of(c);
  REQUIRE(text.rfind("sweep_value,scheme,se_bits,half_width,trials,seed\n", 0) == 0);
  std::istringstream in(text);
  const SECurve back = read_se_csv(in, c.sweep_name);
  REQUIRE(csv_of(back) == text);
  REQUIRE(back.scheme_points(Scheme::MRC).size() == 2);
  const auto j = se_curve_to_json(c);
  REQUIRE(j.at("points").size() == 6);
  std::istringstream bad("sweep_value,scheme\n1,MRC\n");
  REQUIRE_THROWS(read_se_csv(bad));
  REQUIRE(format_double(0.1) == "0.1");
  REQUIRE(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
