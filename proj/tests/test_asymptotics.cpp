// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <vector>

#include "mimolab/asymptotics.hpp"
#include "mimolab/covariance.hpp"
#include "mimolab/errors.hpp"
#include "mimolab/rng.hpp"
#include "support.hpp"

using namespace mimolab;
using testsupport::rel_diff;

namespace {

// Frozen from an explicit-inverse NumPy run: exp_corr(r=0.5, theta=0.7) vs
// exp_corr(r=0.9, theta=-0.3), rho = rho_tr = 1.
struct Frozen {
  Index m;
  double b11, b22, b12, delta;
};
constexpr Frozen kFrozen[] = {
    {64, 0.24695007766496674, 0.1957185963741424, 0.06283759050259419, 0.22677538372518644},
    {256, 0.248659172624032, 0.19658789281181424, 0.06190287024252354, 0.22916679550225832},
};

struct Oracle {
  Complex b11, b22, b12;
};

// Plain explicit inverses, no solver reuse.
Oracle explicit_inverse_oracle(const CMatrix& r1, const CMatrix& r2, double rho_tr, double rho) {
  const Index m = r1.rows();
  const CMatrix eye = CMatrix::Identity(m, m);
  const CMatrix qi = (r1 + r2 + eye / rho_tr).inverse();
  const CMatrix p1 = r1 * qi * r1;
  const CMatrix p2 = r2 * qi * r2;
  const CMatrix u = r1 * qi * r2;
  const CMatrix zi = (r1 - p1 + r2 - p2 + eye / rho).inverse();
  const double md = static_cast<double>(m);
  return {(p1 * zi).trace() / md, (p2 * zi).trace() / md, (u * zi).trace() / md};
}

double objective_oracle(const CMatrix& r1, const CMatrix& r2, double rho_tr, double rho, double lambda) {
  const Index m = r1.rows();
  const CMatrix eye = CMatrix::Identity(m, m);
  const CMatrix qi = (r1 + r2 + eye / rho_tr).inverse();
  const CMatrix zi = (r1 - r1 * qi * r1 + r2 - r2 * qi * r2 + eye / rho).inverse();
  const CMatrix x = r1 - lambda * r2;
  return (qi * x * zi * x).trace().real() / static_cast<double>(m);
}

CMatrix block_step(Index m, Index n) {
  CMatrix r = CMatrix::Identity(m, m);
  for (Index i = 0; i < n; ++i) r(i, i) = 2.0;
  return r;
}

}  // namespace

TEST_CASE("identity covariances give beta = 1/7 and delta = 0") {
  const CMatrix eye = CMatrix::Identity(5, 5);
  const TwoUserStatistics s(eye, eye, 1.0, 1.0);
  const auto c = beta_coefficients(s);
  REQUIRE(c.beta11 == Catch::Approx(1.0 / 7).epsilon(1e-14));
  REQUIRE(c.beta22 == Catch::Approx(1.0 / 7).epsilon(1e-14));
  REQUIRE(c.beta12 == Catch::Approx(1.0 / 7).epsilon(1e-14));
  REQUIRE(std::abs(asymptotic_delta(c)) < 1e-15);
  REQUIRE(c.m == 5);
}

TEST_CASE("absent second user is degenerate") {
  const TwoUserStatistics s(CMatrix::Identity(4, 4), CMatrix::Zero(4, 4), 1.0, 1.0);
  const auto c = beta_coefficients(s);
  REQUIRE(c.beta22 == 0.0);
  REQUIRE(c.beta12 == 0.0);
  REQUIRE_THROWS_AS(asymptotic_delta(c), DegenerateScenario);
  REQUIRE_THROWS_AS(weighted_independence_statistic(s), DegenerateScenario);
  REQUIRE_THROWS_AS(frobenius_independence_statistic(CMatrix::Identity(4, 4), CMatrix::Zero(4, 4)),
                    DegenerateScenario);
}

TEST_CASE("beta coefficients match the explicit-inverse oracle and frozen values") {
  for (const Frozen& f : kFrozen) {
    const CMatrix r1 = exp_corr_cov(f.m, 1.0, 0.5, 0.7).dense();
    const CMatrix r2 = exp_corr_cov(f.m, 1.0, 0.9, -0.3).dense();
    const TwoUserStatistics s(r1, r2, 1.0, 1.0);
    const auto c = beta_coefficients(s);
    if (f.m == 64) {
      const Oracle o = explicit_inverse_oracle(r1, r2, 1.0, 1.0);
      REQUIRE(std::abs(c.beta11 - o.b11.real()) < 1e-10);
      REQUIRE(std::abs(c.beta22 - o.b22.real()) < 1e-10);
      REQUIRE(std::abs(c.beta12 - o.b12.real()) < 1e-10);
      REQUIRE(std::abs(c.beta12_imag - o.b12.imag()) < 1e-10);
    }
    REQUIRE(std::abs(c.beta11 - f.b11) < 1e-10);
    REQUIRE(std::abs(c.beta22 - f.b22) < 1e-10);
    REQUIRE(std::abs(c.beta12 - f.b12) < 1e-10);
    REQUIRE(std::abs(c.beta12_imag) < 1e-12);
    REQUIRE(std::abs(asymptotic_delta(c) - f.delta) < 1e-10);
  }
}

TEST_CASE("generic complex pairs: beta12 may be complex, delta uses its modulus") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 10; ++i) {
    const CMatrix r1 = testsupport::random_psd(6, 8, rng);
    const CMatrix r2 = testsupport::random_psd(6, 8, rng);
    const TwoUserStatistics s(r1, r2, 1.0, 1.0);
    const auto c = beta_coefficients(s);
    const Oracle o = explicit_inverse_oracle(r1, r2, 1.0, 1.0);
    REQUIRE(std::abs(Complex(c.beta12, c.beta12_imag) - o.b12) < 1e-10);
    const double delta = asymptotic_delta(c);
    REQUIRE(std::abs(delta - (o.b11.real() - std::norm(o.b12) / o.b22.real())) < 1e-10);
    REQUIRE(delta >= -1e-12);
    // Minimizing over real lambda can only do worse than the modulus form.
    REQUIRE(weighted_independence_statistic(s).value >= delta - 1e-12);
  }
}

TEST_CASE("proportional covariances give delta = 0") {
  const CMatrix base = exp_corr_cov(32, 1.0, 0.5, 0.4).dense();
  const TwoUserStatistics s(2.0 * base, base, 1.0, 1.0);
  const auto c = beta_coefficients(s);
  REQUIRE(std::abs(asymptotic_delta(c)) < 1e-10);
  REQUIRE(std::abs(weighted_independence_statistic(s).value) < 1e-10);
  REQUIRE(weighted_independence_statistic(s).lambda_star == Catch::Approx(2.0).epsilon(1e-10));
  REQUIRE(frobenius_independence_statistic(CMatrix(2.0 * base), base).value < 1e-12);
}

TEST_CASE("block-step pair with alpha = 1/2 has positive delta equal to the weighted statistic") {
  const Index m = 64;
  const TwoUserStatistics s(block_step(m, m / 2), CMatrix::Identity(m, m), 1.0, 1.0);
  const auto c = beta_coefficients(s);
  const double delta = asymptotic_delta(c);
  REQUIRE(delta > 0.0);
  REQUIRE(std::abs(delta - 0.027777777777777762) < 1e-12);
  REQUIRE(std::abs(weighted_independence_statistic(s).value - delta) < 1e-10);
}

TEST_CASE("beta12 = 0 gives delta = beta11") {
  AsymptoticCoefficients c;
  c.beta11 = 0.3;
  c.beta22 = 0.2;
  REQUIRE(asymptotic_delta(c) == 0.3);
  CMatrix a = CMatrix::Zero(4, 4);
  CMatrix b = CMatrix::Zero(4, 4);
  a(0, 0) = a(1, 1) = 1.0;
  b(2, 2) = b(3, 3) = 1.0;
  const TwoUserStatistics s(a, b, 1.0, 1.0);
  const auto c2 = beta_coefficients(s);
  REQUIRE(c2.beta12 == 0.0);
  REQUIRE(asymptotic_delta(c2) == c2.beta11);
}

TEST_CASE("delta is the minimum of the beta quadratic") {
  const CMatrix r1 = exp_corr_cov(16, 1.0, 0.5, 0.2).dense();
  const CMatrix r2 = exp_corr_cov(16, 1.0, 0.8, 0.2).dense();
  const auto c = beta_coefficients(TwoUserStatistics(r1, r2, 2.0, 2.0));
  const double lstar = c.beta12 / c.beta22;
  const double at_star = c.beta11 + lstar * lstar * c.beta22 - 2 * lstar * c.beta12;
  REQUIRE(std::abs(at_star - asymptotic_delta(c)) < 1e-14);
  for (double l = -3; l <= 3; l += 0.25) {
    REQUIRE(c.beta11 + l * l * c.beta22 - 2 * l * c.beta12 >= at_star - 1e-14);
  }
}

TEST_CASE("weighted statistic equals delta on random real-beta12 instances") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> th(-3.0, 3.0);
  for (int i = 0; i < 30; ++i) {
    const Index m = 8 + 4 * (i % 5);
    // Toeplitz exp_corr pairs and diagonal pairs keep beta12 real.
    CMatrix r1;
    CMatrix r2;
    if (i % 2 == 0) {
      r1 = exp_corr_cov(m, 0.5 + u(rng), u(rng), th(rng)).dense();
      r2 = exp_corr_cov(m, 0.5 + u(rng), u(rng), th(rng)).dense();
    } else {
      r1 = lognormal_diag_cov(m, 1.0, 3.0, 1000 + i).dense();
      r2 = lognormal_diag_cov(m, 1.0, 3.0, 2000 + i).dense();
    }
    const double rho = std::pow(10.0, 2 * u(rng) - 1);
    const TwoUserStatistics s(r1, r2, rho, rho);
    const auto c = beta_coefficients(s);
    REQUIRE(std::abs(c.beta12_imag) < 1e-12);
    REQUIRE(std::abs(weighted_independence_statistic(s).value - asymptotic_delta(c)) < 1e-10);
  }
}

TEST_CASE("closed-form lambda agrees with a grid search at M=16") {
  const CMatrix r1 = exp_corr_cov(16, 1.0, 0.5, 0.7).dense();
  const CMatrix r2 = exp_corr_cov(16, 1.0, 0.9, -0.3).dense();
  const TwoUserStatistics s(r1, r2, 1.0, 1.0);
  const auto closed = weighted_independence_statistic(s);
  // The objective is quadratic in lambda; sample it at three points from the
  // oracle and scan the interpolant on the 1e-4 grid.
  const double f0 = objective_oracle(r1, r2, 1.0, 1.0, 0.0);
  const double f1 = objective_oracle(r1, r2, 1.0, 1.0, 1.0);
  const double fm = objective_oracle(r1, r2, 1.0, 1.0, -1.0);
  const double c2 = 0.5 * (f1 + fm) - f0;
  const double c1 = 0.5 * (f1 - fm);
  double best = 1e300;
  double best_l = 0.0;
  for (long k = -100'000; k <= 100'000; ++k) {
    const double l = k * 1e-4;
    const double v = f0 + c1 * l + c2 * l * l;
    if (v < best) {
      best = v;
      best_l = l;
    }
  }
  REQUIRE(std::abs(best - closed.value) < 1e-6);
  REQUIRE(std::abs(best_l - closed.lambda_star) < 1e-4);
  // Spot-check the library objective itself against the oracle on the grid.
  for (double l : {-10.0, -2.5, 0.0, 0.3, 4.0, 10.0}) {
    REQUIRE(std::abs(weighted_independence_objective(s, l) - objective_oracle(r1, r2, 1.0, 1.0, l)) < 1e-10);
  }
}

TEST_CASE("Frobenius statistic: block-step closed form") {
  for (auto [m, n] : {std::pair<Index, Index>{8, 2}, {64, 32}, {1000, 300}, {10, 0}, {10, 10}}) {
    const double expected = static_cast<double>((m - n) * n) / static_cast<double>(m * m);
    RVector d1 = RVector::Ones(m);
    d1.head(n).setConstant(2.0);
    const auto diag = frobenius_independence_statistic(CovarianceMatrix::from_diagonal(d1),
                                                       scaled_identity_cov(m, 1.0));
    REQUIRE(std::abs(diag.value - expected) < 1e-12);
    if (m <= 64) {
      const auto dense = frobenius_independence_statistic(block_step(m, n), CMatrix::Identity(m, m));
      REQUIRE(std::abs(dense.value - expected) < 1e-12);
      REQUIRE(std::abs(dense.lambda_star - diag.lambda_star) < 1e-14);
    }
  }
  // alpha = 0.3 at M = 1000 is exactly alpha (1 - alpha).
  RVector d = RVector::Ones(1000);
  d.head(300).setConstant(2.0);
  REQUIRE(std::abs(frobenius_independence_statistic(CovarianceMatrix::from_diagonal(d),
                                                    scaled_identity_cov(1000, 1.0))
                       .value -
                   0.21) < 1e-12);
}

TEST_CASE("Frobenius statistic: diagonal perturbation tracks the variance of d") {
  const Index m = 100'000;
  Rng rng(derive_seed(5, {}));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RVector d(m);
  for (Index i = 0; i < m; ++i) d(i) = u(rng);
  const auto r1 = CovarianceMatrix::from_diagonal(RVector::Ones(m) + d);
  const auto stat = frobenius_independence_statistic(r1, scaled_identity_cov(m, 1.0));
  // The statistic is the (biased) sample variance of d; its standard error
  // is sqrt((mu4 - sigma^4) / M) with mu4 = 1/80 for uniform(0,1).
  const double se = std::sqrt((1.0 / 80.0 - 1.0 / 144.0) / static_cast<double>(m));
  REQUIRE(std::abs(stat.value - 1.0 / 12.0) < 3 * se);
  const double mean = d.mean();
  REQUIRE(std::abs(stat.value - (d.array() - mean).square().mean()) < 1e-12);
}

TEST_CASE("Frobenius statistic properties") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 20; ++i) {
    const CMatrix r1 = testsupport::random_psd(6, 3, rng);
    const CMatrix r2 = testsupport::random_psd(6, 9, rng);
    const auto s = frobenius_independence_statistic(r1, r2);
    REQUIRE(s.value >= 0.0);
    const double c = 0.5 + i;
    const auto sc = frobenius_independence_statistic(CMatrix(c * r1), r2);
    REQUIRE(rel_diff(sc.value, c * c * s.value) < 1e-10);
    REQUIRE(rel_diff(sc.lambda_star, c * s.lambda_star) < 1e-12);
    // lambda* is the minimizer.
    for (double dl : {-0.1, 0.1}) {
      REQUIRE((r1 - (s.lambda_star + dl) * r2).squaredNorm() / 6.0 >= s.value);
    }
  }
  const CMatrix base = exp_corr_cov(5, 1.0, 0.4, 0.1).dense();
  const auto zero = frobenius_independence_statistic(CMatrix(3.0 * base), base);
  REQUIRE(zero.value < 1e-12);
  REQUIRE(((3.0 * base) - zero.lambda_star * base).cwiseAbs().maxCoeff() < 1e-12);
  REQUIRE_THROWS_AS(frobenius_independence_statistic(CMatrix::Identity(2, 2), CMatrix::Identity(3, 3)),
                    DimensionMismatch);
}

TEST_CASE("Frobenius trace bound examples") {
  const CMatrix r = exp_corr_cov(8, 1.0, 0.5, 0.3).dense();
  const TwoUserStatistics s(r, r, 1.0, 1.0);
  const auto b = frobenius_trace_bound(s, 1.0);
  REQUIRE(std::abs(b.lhs) < 1e-14);
  REQUIRE(b.rhs_rho == 0.0);
  REQUIRE(b.rhs_inverse_rho == 0.0);

  const Index m = 32;
  const TwoUserStatistics e1(block_step(m, m / 2), CMatrix::Identity(m, m), 1.0, 1.0);
  const double lstar = frobenius_independence_statistic(block_step(m, m / 2), CMatrix::Identity(m, m)).lambda_star;
  const auto be = frobenius_trace_bound(e1, lstar);
  REQUIRE(be.lhs >= be.rhs(BoundConvention::rho) - 1e-12);
  REQUIRE(be.lhs >= be.rhs(BoundConvention::inverse_rho) - 1e-12);
}

TEST_CASE("Frobenius trace bound on random exp_corr pairs") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> th(-3.14159, 3.14159);
  std::uniform_real_distribution<double> lam(-3.0, 3.0);
  int checked = 0;
  for (int p = 0; p < 20; ++p) {
    const CMatrix r1 = exp_corr_cov(12, 0.5 + u(rng), u(rng), th(rng)).dense();
    const CMatrix r2 = exp_corr_cov(12, 0.5 + u(rng), u(rng), th(rng)).dense();
    const TwoUserStatistics s(r1, r2, 1.0, 1.0);
    for (int k = 0; k < 20; ++k) {
      const auto b = frobenius_trace_bound(s, lam(rng));
      REQUIRE(b.lhs >= b.rhs_rho - 1e-12);
      REQUIRE(b.lhs >= b.rhs_inverse_rho - 1e-12);
      ++checked;
    }
  }
  REQUIRE(checked == 400);
}

TEST_CASE("rho-scaled bound denominator can fail below 0 dB") {
  // R1 = 2I, R2 = I, lambda = 0, rho = rho_tr = 0.1.
  const Index m = 4;
  const TwoUserStatistics s(2.0 * CMatrix::Identity(m, m), CMatrix::Identity(m, m), 0.1, 0.1);
  const auto b = frobenius_trace_bound(s, 0.0);
  REQUIRE(b.lhs >= b.rhs_inverse_rho);
  REQUIRE(b.lhs < b.rhs_rho);
}

TEST_CASE("linear dependence limit") {
  REQUIRE(linear_dependence_limit(1.0) == 1.0);
  REQUIRE(linear_dependence_limit(2.0) == 4.0);
  REQUIRE(linear_dependence_limit(0.5) == 0.25);
  REQUIRE_THROWS_AS(linear_dependence_limit(0.0), InvalidParameter);
}

TEST_CASE("quadratic forms concentrate around the normalized trace") {
  auto mad = [](Index m, std::uint64_t seed) {
    // Bounded-norm diagonal A with entries in [0, 2].
    RVector a(m);
    for (Index i = 0; i < m; ++i) a(i) = 1.0 + std::sin(0.37 * static_cast<double>(i));
    const double tr = a.sum() / static_cast<double>(m);
    Rng rng(seed);
    std::vector<double> dev;
    for (int t = 0; t < 400; ++t) {
      const CVector x = standard_complex_normal(m, rng) / std::sqrt(static_cast<double>(m));
      dev.push_back(std::abs((x.cwiseAbs2().array() * a.array()).sum() - tr));
    }
    std::nth_element(dev.begin(), dev.begin() + 200, dev.end());
    return dev[200];
  };
  REQUIRE(mad(4096, 31) < 0.25 * mad(256, 37));
}

TEST_CASE("growth classification") {
  const std::vector<double> flat{0.2, 0.21, 0.2, 0.2};
  REQUIRE(classify_growth(flat, 0.3) == GrowthVerdict::unbounded_growth_consistent);
  const std::vector<double> halving{0.08, 0.04, 0.02, 0.01};
  REQUIRE(classify_growth(halving, 0.3) == GrowthVerdict::contamination_limited);
  const std::vector<double> zero{1e-17, 0.0, 1e-18};
  REQUIRE(classify_growth(zero, 0.3) == GrowthVerdict::contamination_limited);
  const std::vector<double> short_grid{0.2, 0.2};
  REQUIRE(classify_growth(short_grid, 0.3) == GrowthVerdict::insufficient_grid);
  REQUIRE(classify_growth({}, 0.3) == GrowthVerdict::insufficient_grid);
  GrowthRule strict;
  strict.decay_factor = 2.0;
  const std::vector<double> slow{0.1, 0.052, 0.027};
  REQUIRE(classify_growth(slow, 1.0, strict) == GrowthVerdict::unbounded_growth_consistent);
  REQUIRE(classify_growth(slow, 1.0) == GrowthVerdict::contamination_limited);
  REQUIRE(to_string(GrowthVerdict::contamination_limited) == "contamination-limited");
  REQUIRE(to_string(GrowthVerdict::unbounded_growth_consistent) == "unbounded-growth-consistent");
}

TEST_CASE("diagnostics over a doubling grid") {
  std::vector<std::pair<CovarianceMatrix, CovarianceMatrix>> dep;
  std::vector<std::pair<CovarianceMatrix, CovarianceMatrix>> ex1;
  std::vector<std::pair<CovarianceMatrix, CovarianceMatrix>> ex2;
  for (Index m : {16, 32, 64, 128}) {
    const auto base = exp_corr_cov(m, 1.0, 0.5, 0.3);
    dep.emplace_back(base.scaled(2.0), base);
    RVector d = RVector::Ones(m);
    d.head(m / 2).setConstant(2.0);
    ex1.emplace_back(CovarianceMatrix::from_diagonal(d), scaled_identity_cov(m, 1.0));
    RVector d2 = RVector::Ones(m) + lognormal_diag_cov(m, 1.0, 1.0, 3).diagonal();
    ex2.emplace_back(CovarianceMatrix::from_diagonal(d2), scaled_identity_cov(m, 1.0));
  }
  const auto a = asymptotic_diagnostics(dep, 1.0, 1.0);
  for (const auto& r : a) {
    REQUIRE(std::abs(r.coeffs.delta) < 1e-10);
    REQUIRE(r.verdict == GrowthVerdict::contamination_limited);
    REQUIRE(r.lambda_star == Catch::Approx(2.0).epsilon(1e-12));
  }
  const auto b = asymptotic_diagnostics(ex1, 1.0, 1.0);
  REQUIRE(b.back().verdict == GrowthVerdict::unbounded_growth_consistent);
  REQUIRE(b.front().verdict == GrowthVerdict::insufficient_grid);
  REQUIRE(b.back().frob_stat == Catch::Approx(0.25).epsilon(1e-12));
  const auto c = asymptotic_diagnostics(ex2, 1.0, 1.0);
  REQUIRE(c.back().verdict == GrowthVerdict::unbounded_growth_consistent);

  std::vector<std::pair<CovarianceMatrix, CovarianceMatrix>> bad{ex1[1], ex1[0]};
  REQUIRE_THROWS_AS(asymptotic_diagnostics(bad, 1.0, 1.0), InvalidParameter);
}
