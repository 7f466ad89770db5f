// Copyright 2026 The qudmix Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "qudmix/ensemble.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "gtest/gtest.h"

#include "qudmix/errors.hpp"
#include "qudmix/random.hpp"

using namespace qudmix;

namespace {

constexpr double kPi = std::numbers::pi;

MixtureSpec qubit(double beta0, double beta1, double delta1) {
  MixtureSpec s = MixtureSpec::uniform(2, 0.0);
  s.betas = {beta0, beta1};
  s.deltas[1] = delta1;
  return s;
}

// Brute-force qubit oracle with its own generator: average the projectors of
// (beta0, beta1 e^{i alpha}), alpha uniform on [-delta/2, delta/2], and return
// the purity of the average together with a delta-method standard error.
std::pair<double, double> qubit_purity_oracle(double beta0, double beta1, double delta, int n) {
  std::mt19937_64 gen(12345);
  std::uniform_real_distribution<double> alpha(-delta / 2.0, delta / 2.0);
  const double norm = beta0 * beta0 + beta1 * beta1;
  double sc = 0.0, ss = 0.0, sc2 = 0.0, ss2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double a = alpha(gen);
    sc += std::cos(a);
    ss += std::sin(a);
    sc2 += std::cos(a) * std::cos(a);
    ss2 += std::sin(a) * std::sin(a);
  }
  const double mc = sc / n, ms = ss / n;
  const double vc = sc2 / n - mc * mc, vs = ss2 / n - ms * ms;
  const double k01 = beta0 * beta1 / norm;
  const double p00 = beta0 * beta0 / norm, p11 = beta1 * beta1 / norm;
  const double p = p00 * p00 + p11 * p11 + 2.0 * k01 * k01 * (mc * mc + ms * ms);
  const double dp_c = 4.0 * k01 * k01 * mc, dp_s = 4.0 * k01 * k01 * ms;
  const double se = std::sqrt((dp_c * dp_c * vc + dp_s * dp_s * vs) / n);
  return {p, se};
}

// Simpson rule for (1/delta) * integral of e^{-i alpha} over [-delta/2, delta/2].
Complex phase_average_quadrature(double delta) {
  if (delta == 0.0) return 1.0;
  const int n = 2000;
  const double h = delta / n;
  Complex sum = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    sum += w * std::polar(1.0, -(-delta / 2.0 + k * h));
  }
  return sum * h / 3.0 / delta;
}

}  // namespace

TEST(sinc, unnormalized) {
  ASSERT_EQ(sinc(0.0), 1.0);
  ASSERT_NEAR(sinc(kPi / 2.0), 2.0 / kPi, 1e-15);
  ASSERT_NEAR(sinc(kPi), 0.0, 1e-16);
  ASSERT_NEAR(sinc(1e-9), 1.0, 1e-15);
}

TEST(mixture_spec, validation) {
  ASSERT_NO_THROW(MixtureSpec::uniform(3, kTwoPi).validate());
  MixtureSpec s = MixtureSpec::uniform(3, 1.0);
  s.betas.pop_back();
  ASSERT_THROW(s.validate(), InvalidSpec);
  s = MixtureSpec::uniform(3, 1.0);
  s.betas[1] = -1.0;
  ASSERT_THROW(s.validate(), InvalidSpec);
  s.betas = {0.0, 0.0, 0.0};
  ASSERT_THROW(s.validate(), InvalidSpec);
  s = MixtureSpec::uniform(3, 1.0);
  s.phis[2] = kTwoPi;
  ASSERT_THROW(s.validate(), InvalidSpec);
  s = MixtureSpec::uniform(3, 1.0);
  s.deltas[2] = 7.0;
  ASSERT_THROW(s.validate(), InvalidSpec);
  s = MixtureSpec::uniform(3, 1.0);
  s.deltas[0] = 1.0;
  ASSERT_THROW(s.validate(), InvalidSpec);
  s.reference = std::nullopt;
  ASSERT_NO_THROW(s.validate());
  ASSERT_THROW(MixtureSpec::uniform(1, 0.0).validate(), InvalidSpec);
}

TEST(sample_phase_state, zero_width_is_the_fixed_state) {
  MixtureSpec s = MixtureSpec::uniform(3, 0.0);
  s.betas = {1.0, 2.0, 2.0};
  s.phis = {0.0, 1.0, 4.0};
  for (std::uint64_t seed : {0u, 1u, 77u}) {
    const PureQudit psi = sample_phase_state(s, seed);
    for (std::size_t l = 0; l < 3; ++l) {
      const Complex expected = std::polar(s.betas[l] / 3.0, s.phis[l]);
      ASSERT_NEAR(std::abs(psi[l] - expected), 0.0, 1e-15);
    }
  }
}

TEST(sample_phase_state, uniform_circular_mean) {
  const MixtureSpec s = qubit(1.0, 1.0, kTwoPi);
  Complex mean = 0.0;
  const int n = 100000;
  for (int k = 0; k < n; ++k) {
    const PureQudit psi = sample_phase_state(s, mixture_sample_seed(4, k));
    mean += psi[1] / std::abs(psi[1]) * std::abs(psi[0]) / psi[0];
  }
  ASSERT_LT(std::abs(mean / static_cast<double>(n)), 0.02);
}

TEST(sample_phase_state, deterministic) {
  const MixtureSpec s = MixtureSpec::uniform(5, 2.0);
  ASSERT_EQ(sample_phase_state(s, 42).amplitudes(), sample_phase_state(s, 42).amplitudes());
  ASSERT_NE(sample_phase_state(s, 42).amplitudes(), sample_phase_state(s, 43).amplitudes());
  MixtureSpec bad = s;
  bad.betas[0] = std::nan("");
  ASSERT_THROW(sample_phase_state(bad, 1), InvalidSpec);
}

TEST(sample_amplitude_state, fixed_and_deterministic) {
  AmplitudeVariationSpec a{{1.0, 1.0}, {0.0, 0.0}, {0.0, 0.5}};
  const PureQudit psi = sample_amplitude_state(a, 3);
  ASSERT_NEAR(std::abs(psi[0] - std::sqrt(0.5)), 0.0, 1e-15);
  ASSERT_NEAR(std::abs(psi[1] - std::polar(std::sqrt(0.5), 0.5)), 0.0, 1e-15);
  a.beta_widths = {0.0, 1.0};
  ASSERT_EQ(sample_amplitude_state(a, 9).amplitudes(), sample_amplitude_state(a, 9).amplitudes());
  a.beta_widths = {0.0, 1.5};
  ASSERT_THROW(sample_amplitude_state(a, 9), InvalidSpec);
}

TEST(sample_amplitude_state, cannot_reach_maximal_mixing) {
  const AmplitudeVariationSpec a{{1.0, 1.0}, {0.0, 1.0}, {0.0, 0.0}};
  const PurityEstimate e = monte_carlo_purity(a, 100000, 8);
  ASSERT_GT(e.purity - 4.0 * e.std_error, 0.5);
}

TEST(mixture_accumulator, small_cases) {
  MixtureAccumulator acc(2);
  ASSERT_THROW(acc.density(), std::logic_error);
  acc = accumulate(acc, PureQudit::basis_state(2, 0));
  ASSERT_EQ(acc.count(), 1u);
  ASSERT_NEAR(acc.purity(), 1.0, 1e-15);
  ASSERT_NEAR(std::abs(acc.density()(0, 0) - 1.0), 0.0, 1e-15);
  acc = accumulate(acc, PureQudit::basis_state(2, 1));
  ASSERT_NEAR(acc.purity(), 0.5, 1e-15);
  ASSERT_NEAR(std::abs(acc.density()(1, 1) - 0.5), 0.0, 1e-15);
  ASSERT_THROW(acc.add(PureQudit::basis_state(3, 0)), DimensionMismatch);
}

TEST(mixture_accumulator, merge_matches_sequential) {
  const MixtureSpec s = MixtureSpec::uniform(4, 3.0);
  MixtureAccumulator all(4), left(4), right(4);
  for (std::size_t k = 0; k < 40; ++k) {
    const PureQudit psi = sample_phase_state(s, mixture_sample_seed(2, k));
    all.add(psi);
    (k < 17 ? left : right).add(psi);
  }
  left.merge(right);
  ASSERT_EQ(left.count(), all.count());
  ASSERT_LT((left.sum() - all.sum()).norm(), 1e-13);
  ASSERT_THROW(left.merge(MixtureAccumulator(3)), DimensionMismatch);
}

TEST(mixture_accumulator, qubit_maximal_mixing_over_seeds) {
  const MixtureSpec s = qubit(1.0, 1.0, kTwoPi);
  int within = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    within += std::abs(sample_mixture(s, 250, seed).purity() - 0.5) <= 0.05;
  }
  ASSERT_GE(within, 95);
}

TEST(analytic_coefficient, values) {
  MixtureSpec s = qubit(1.0, 1.0, kPi);
  ASSERT_EQ(analytic_coefficient(s, 0, 0), Complex(1.0));
  ASSERT_EQ(analytic_coefficient(s, 1, 1), Complex(1.0));
  const Complex quad = phase_average_quadrature(kPi);
  ASSERT_NEAR(std::abs(analytic_coefficient(s, 0, 1) - std::conj(quad)), 0.0, 1e-12);
  ASSERT_NEAR(analytic_coefficient(s, 0, 1).real(), 2.0 / kPi, 1e-15);
  s.deltas[1] = kTwoPi;
  ASSERT_LT(std::abs(analytic_coefficient(s, 0, 1)), 1e-15);
  ASSERT_LT(std::abs(analytic_coefficient(s, 1, 0)), 1e-15);
  ASSERT_THROW(analytic_coefficient(s, 0, 2), IndexOutOfRange);
}

TEST(analytic_coefficient, matches_quadrature_for_general_widths) {
  MixtureSpec s = MixtureSpec::uniform(3, 0.0);
  s.deltas = {0.0, 1.3, 4.1};
  s.phis = {0.0, 0.7, 2.0};
  for (std::size_t l = 0; l < 3; ++l) {
    for (std::size_t lp = 0; lp < 3; ++lp) {
      if (l == lp) continue;
      const Complex expected = std::polar(1.0, s.phis[l] - s.phis[lp]) * std::conj(phase_average_quadrature(s.deltas[l])) *
                               phase_average_quadrature(s.deltas[lp]);
      ASSERT_NEAR(std::abs(analytic_coefficient(s, l, lp) - expected), 0.0, 1e-12);
    }
  }
}

TEST(analytic_density_matrix, qubit_limits) {
  const DensityMatrix mixed = analytic_density_matrix(qubit(1.0, 1.0, kTwoPi));
  ASSERT_NEAR(std::abs(mixed(0, 0) - 0.5), 0.0, 1e-15);
  ASSERT_LT(std::abs(mixed(0, 1)), 1e-15);
  const DensityMatrix pure = analytic_density_matrix(qubit(1.0, 1.0, 0.0));
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) ASSERT_NEAR(std::abs(pure(i, j) - 0.5), 0.0, 1e-15);
  }
}

TEST(analytic_density_matrix, linear_widths_d7) {
  MixtureSpec s = MixtureSpec::uniform(7, 0.0);
  for (std::size_t l = 1; l < 7; ++l) s.deltas[l] = kTwoPi * static_cast<double>(l) / 7.0;
  const DensityMatrix rho = analytic_density_matrix(s);
  for (std::size_t l = 0; l < 7; ++l) ASSERT_NEAR(rho(l, l).real(), 1.0 / 7.0, 1e-15);
  for (std::size_t l = 2; l < 7; ++l) ASSERT_LT(std::abs(rho(0, l)), std::abs(rho(0, l - 1)));
  ASSERT_TRUE(rho.is_positive());
}

TEST(analytic_purity, closed_forms) {
  for (std::size_t d : {2, 3, 5, 7, 11}) {
    ASSERT_NEAR(analytic_purity(MixtureSpec::uniform(d, kTwoPi)), 1.0 / static_cast<double>(d), 1e-12);
    ASSERT_NEAR(analytic_purity(MixtureSpec::uniform(d, 0.0)), 1.0, 1e-12);
  }
  ASSERT_NEAR(analytic_purity(qubit(1.0, 1.0, kPi)), (1.0 + 4.0 / (kPi * kPi)) / 2.0, 1e-15);
  ASSERT_NEAR(analytic_purity(qubit(2.0, 1.0, kPi)), (17.0 + 32.0 / (kPi * kPi)) / 25.0, 1e-15);
  ASSERT_NEAR(analytic_purity(qubit(3.0, 1.0, kTwoPi)), 0.82, 1e-15);
  MixtureSpec q = MixtureSpec::uniform(3, kTwoPi);
  ASSERT_NEAR(analytic_purity(q), 1.0 / 3.0, 1e-12);
}

TEST(analytic_purity, agrees_with_matrix) {
  Rng rng(31);
  for (int k = 0; k < 50; ++k) {
    const std::size_t d = 2 + static_cast<std::size_t>(k % 10);
    MixtureSpec s = MixtureSpec::uniform(d, 0.0);
    for (std::size_t l = 0; l < d; ++l) {
      s.betas[l] = rng.uniform(0.1, 2.0);
      if (l == 0) continue;
      s.phis[l] = rng.uniform(0.0, kTwoPi);
      s.deltas[l] = rng.uniform(0.0, kTwoPi);
    }
    ASSERT_NEAR(analytic_purity(s), purity(analytic_density_matrix(s)), 1e-13);
  }
}

TEST(analytic_purity, matches_brute_force_oracle) {
  for (auto [b0, p] : {std::pair{1.0, 0.70264}, std::pair{2.0, 0.80969}}) {
    const auto [oracle, se] = qubit_purity_oracle(b0, 1.0, kPi, 1000000);
    const double analytic = analytic_purity(qubit(b0, 1.0, kPi));
    ASSERT_NEAR(analytic, p, 1e-5);
    ASSERT_LE(std::abs(analytic - oracle), 3.0 * se + 1e-6);
  }
}

TEST(monte_carlo_purity, unbiased_within_error) {
  int within = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const MixtureSpec s = MixtureSpec::uniform(5, 2.5 + 0.05 * static_cast<double>(seed));
    const PurityEstimate e = monte_carlo_purity(s, 400, seed);
    within += std::abs(e.purity - analytic_purity(s)) <= 4.0 * e.std_error;
  }
  ASSERT_GE(within, 37);
}

TEST(monte_carlo_purity, needs_three_samples) {
  ASSERT_THROW(monte_carlo_purity(MixtureSpec::uniform(2, 1.0), 2, 0), InvalidSpec);
}

TEST(purity_sweep, rows_and_errors) {
  const MixtureSpec s = qubit(1.0, 1.0, 0.0);
  const auto grid = width_grid(5);
  ASSERT_EQ(grid.front(), 0.0);
  ASSERT_EQ(grid.back(), kTwoPi);
  const auto rows = purity_sweep(s, 1, grid, 50, 3);
  ASSERT_EQ(rows.size(), 5u);
  ASSERT_NEAR(rows.front().analytic_purity, 1.0, 1e-15);
  ASSERT_NEAR(rows.back().analytic_purity, 0.5, 1e-15);
  ASSERT_THROW(purity_sweep(s, 2, grid), IndexOutOfRange);
  ASSERT_THROW(purity_sweep(s, 0, grid), InvalidSpec);
  ASSERT_THROW(purity_sweep(s, 1, {7.0}), InvalidSpec);
}

TEST(purity_sweep, qutrit_minimum) {
  MixtureSpec s = MixtureSpec::uniform(3, 0.0);
  ASSERT_NEAR(analytic_purity(s), 1.0, 1e-15);
  s.deltas[2] = kTwoPi;
  const auto rows = purity_sweep(s, 1, width_grid(11), 10, 0);
  ASSERT_NEAR(rows.back().analytic_purity, 1.0 / 3.0, 1e-12);
}

TEST(convergence_trace, shape) {
  const MixtureSpec s = qubit(1.0, 1.0, kTwoPi);
  const auto one = convergence_trace(s, 1, 5);
  ASSERT_EQ(one.size(), 1u);
  ASSERT_EQ(one[0].count, 1u);
  ASSERT_NEAR(one[0].purity, 1.0, 1e-15);
  const auto t = convergence_trace(s, 300, 5);
  ASSERT_EQ(t.size(), 300u);
  ASSERT_EQ(t.back().count, 300u);
  ASSERT_NEAR(t.back().purity, sample_mixture(s, 300, 5).purity(), 1e-15);
}
