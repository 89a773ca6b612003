// SPDX-License-Identifier: Apache-2.0
#include "mimolab/simulation.hpp"

#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "mimolab/errors.hpp"

namespace mimolab {

namespace {

constexpr double kZ95 = 1.959963984540054;

std::vector<PilotGroupEstimator> make_groups(const ScenarioInstance& inst) {
  if (inst.covariances.size() != static_cast<std::size_t>(inst.cells * inst.users_per_cell)) {
    throw DimensionMismatch("scenario instance: covariance count does not match cells * users");
  }
  std::vector<PilotGroupEstimator> groups;
  groups.reserve(static_cast<std::size_t>(inst.users_per_cell));
  for (int i = 0; i < inst.users_per_cell; ++i) {
    std::vector<CMatrix> members;
    for (int l = 0; l < inst.cells; ++l) {
      members.push_back(inst.covariance(l, i));
    }
    groups.emplace_back(std::move(members), inst.rho_tr);
  }
  return groups;
}

}  // namespace

UplinkSimulator::UplinkSimulator(const ScenarioInstance& instance)
    : dim_(instance.dim()),
      cells_(instance.cells),
      users_(instance.users_per_cell),
      serving_(instance.serving_cell),
      groups_(make_groups(instance)) {
  std::vector<CMatrix> r_all;
  std::vector<CMatrix> phi_all;
  std::vector<int> cell_of;
  for (int l = 0; l < cells_; ++l) {
    for (int i = 0; i < users_; ++i) {
      const auto& g = groups_[static_cast<std::size_t>(i)];
      r_all.push_back(g.covariance(static_cast<std::size_t>(l)));
      phi_all.push_back(g.phi(static_cast<std::size_t>(l)));
      cell_of.push_back(l);
    }
  }
  core_ = build_interference_core(r_all, phi_all, instance.rho);
  smmse_core_ = build_interference_core(r_all, phi_all, instance.rho,
                                        {CoreVariant::Kind::smmse, serving_}, cell_of);
}

std::vector<double> UplinkSimulator::trial(Rng& rng, std::span<const Scheme> schemes) const {
  const auto n_users = static_cast<std::size_t>(cells_ * users_);
  std::vector<CVector> estimates(n_users);
  std::vector<CVector> channels;
  std::vector<CVector> group_est;
  for (int i = 0; i < users_; ++i) {
    groups_[static_cast<std::size_t>(i)].sample(rng, channels, group_est);
    for (int l = 0; l < cells_; ++l) {
      estimates[static_cast<std::size_t>(l * users_ + i)] = std::move(group_est[static_cast<std::size_t>(l)]);
    }
  }
  const std::span<const CVector> own(estimates.data() + serving_ * users_, static_cast<std::size_t>(users_));

  bool want_m = false;
  bool want_s = false;
  for (Scheme s : schemes) {
    want_m |= s == Scheme::M_MMSE;
    want_s |= s == Scheme::S_MMSE;
  }
  // One factorization per scheme serves every target in the serving cell.
  auto factor = [](std::span<const CVector> ests, const CMatrix& z) {
    CMatrix a = z;
    for (const CVector& h : ests) {
      a.noalias() += h * h.adjoint();
    }
    return HermitianSolver(a);
  };
  HermitianSolver m_solver;
  HermitianSolver s_solver;
  if (want_m) m_solver = factor(estimates, core_.z);
  if (want_s) s_solver = factor(own, smmse_core_.z);

  std::vector<double> gamma(static_cast<std::size_t>(users_) * schemes.size(), 0.0);
  for (int k = 0; k < users_; ++k) {
    const std::size_t target = static_cast<std::size_t>(serving_ * users_ + k);
    const CVector& ht = estimates[target];
    if (ht.isZero(0.0)) {
      continue;
    }
    for (std::size_t s = 0; s < schemes.size(); ++s) {
      CVector v;
      switch (schemes[s]) {
        case Scheme::MRC: v = ht; break;
        case Scheme::M_MMSE: v = m_solver.solve(ht); break;
        case Scheme::S_MMSE: v = s_solver.solve(ht); break;
      }
      gamma[static_cast<std::size_t>(k) * schemes.size() + s] =
          instantaneous_sinr(v, estimates, core_, target);
    }
  }
  return gamma;
}

std::vector<double> TrialTable::trial_se(std::size_t scheme) const {
  std::vector<double> out(trials);
  std::vector<double> per_user(static_cast<std::size_t>(targets));
  for (std::size_t t = 0; t < trials; ++t) {
    for (int k = 0; k < targets; ++k) {
      per_user[static_cast<std::size_t>(k)] = std::log2(1.0 + at(t, k, scheme));
    }
    out[t] = compensated_sum(per_user) / static_cast<double>(targets);
  }
  return out;
}

TrialTable run_trials(const UplinkSimulator& sim, std::span<const Scheme> schemes,
                      const RunOptions& options, std::uint64_t grid_index) {
  if (options.trials < 1) {
    throw InvalidParameter("trials must be at least 1");
  }
  if (schemes.empty()) {
    throw InvalidParameter("at least one combining scheme is required");
  }
  TrialTable table;
  table.schemes.assign(schemes.begin(), schemes.end());
  table.targets = sim.users_per_cell();
  table.trials = options.trials;
  const std::size_t stride = static_cast<std::size_t>(table.targets) * schemes.size();
  table.gamma.assign(options.trials * stride, 0.0);

  auto run_range = [&](std::size_t first, std::size_t step) {
    for (std::size_t t = first; t < options.trials; t += step) {
      Rng rng = make_stream(options.seed, {grid_index, t});
      const std::vector<double> g = sim.trial(rng, schemes);
      std::copy(g.begin(), g.end(), table.gamma.begin() + static_cast<std::ptrdiff_t>(t * stride));
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(options.trials)));
  if (workers == 1) {
    run_range(0, 1);
    return table;
  }
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        run_range(w, workers);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return table;
}

SEPoint summarize_se(std::span<const double> per_trial_se, double sweep_value, Scheme scheme,
                     std::uint64_t seed) {
  SEPoint p;
  p.sweep_value = sweep_value;
  p.scheme = scheme;
  p.trials = per_trial_se.size();
  p.seed = seed;
  const double n = static_cast<double>(per_trial_se.size());
  p.se_bits = compensated_sum(per_trial_se) / n;
  if (per_trial_se.size() > 1) {
    std::vector<double> sq(per_trial_se.size());
    for (std::size_t i = 0; i < sq.size(); ++i) {
      const double d = per_trial_se[i] - p.se_bits;
      sq[i] = d * d;
    }
    const double variance = compensated_sum(sq) / (n - 1.0);
    p.half_width = kZ95 * std::sqrt(variance / n);
  }
  return p;
}

std::vector<SEPoint> run_uplink_se(const ScenarioInstance& instance, std::span<const Scheme> schemes,
                                   const RunOptions& options, double sweep_value,
                                   std::uint64_t grid_index) {
  const UplinkSimulator sim(instance);
  const TrialTable table = run_trials(sim, schemes, options, grid_index);
  std::vector<SEPoint> out;
  for (std::size_t s = 0; s < schemes.size(); ++s) {
    const std::vector<double> se = table.trial_se(s);
    out.push_back(summarize_se(se, sweep_value, schemes[s], options.seed));
  }
  return out;
}

std::vector<SEPoint> run_uplink_se(const Scenario& scenario, Index m, std::span<const Scheme> schemes,
                                   const RunOptions& options, std::uint64_t grid_index) {
  return run_uplink_se(scenario.instantiate(m), schemes, options, static_cast<double>(m), grid_index);
}

SECurve sweep_antennas(const Scenario& scenario, std::span<const Index> m_grid,
                       std::span<const Scheme> schemes, const RunOptions& options) {
  if (m_grid.empty()) {
    throw InvalidParameter("antenna grid is empty");
  }
  for (std::size_t g = 0; g < m_grid.size(); ++g) {
    if (m_grid[g] < 1 || (g > 0 && m_grid[g] <= m_grid[g - 1])) {
      throw InvalidParameter("antenna grid must be positive and strictly increasing");
    }
  }
  SECurve curve;
  curve.sweep_name = "M";
  for (std::size_t g = 0; g < m_grid.size(); ++g) {
    auto pts = run_uplink_se(scenario, m_grid[g], schemes, options, g);
    curve.points.insert(curve.points.end(), pts.begin(), pts.end());
  }
  return curve;
}

SECurve sweep_sigma(const Scenario& scenario, std::span<const double> sigma_grid, Index m,
                    std::span<const Scheme> schemes, const RunOptions& options) {
  if (sigma_grid.empty()) {
    throw InvalidParameter("sigma grid is empty");
  }
  for (std::size_t g = 0; g < sigma_grid.size(); ++g) {
    if (!(sigma_grid[g] >= 0.0) || (g > 0 && sigma_grid[g] <= sigma_grid[g - 1])) {
      throw InvalidParameter("sigma grid must be nonnegative and strictly increasing");
    }
  }
  for (const LinkSpec& l : scenario.spec().links) {
    if (l.model != CovarianceModel::lognormal_diag) {
      throw InvalidParameter("sigma sweep needs lognormal_diag on every link");
    }
  }
  SECurve curve;
  curve.sweep_name = "sigma";
  for (std::size_t g = 0; g < sigma_grid.size(); ++g) {
    const Scenario s = scenario.with_sigma(sigma_grid[g]);
    auto pts = run_uplink_se(s.instantiate(m), schemes, options, sigma_grid[g], g);
    curve.points.insert(curve.points.end(), pts.begin(), pts.end());
  }
  return curve;
}

}  // namespace mimolab
