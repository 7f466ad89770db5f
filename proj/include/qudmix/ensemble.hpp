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
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "qudmix/qudit.hpp"

namespace qudmix {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Unnormalized sinc: sin(x)/x, sinc(0) = 1.
double sinc(double x);

/// Phase-variation mixture: slit l transmits beta_l exp(i alpha_l) with
/// alpha_l uniform on [phi_l - delta_l/2, phi_l + delta_l/2], independently
/// per slit.
struct MixtureSpec {
  std::vector<double> betas;
  std::vector<double> phis;
  std::vector<double> deltas;
  /// Slit whose phase is pinned to zero (delta = phi = 0). std::nullopt lets
  /// every slit jitter; only relative phases matter either way.
  std::optional<std::size_t> reference = 0;

  std::size_t dim() const { return betas.size(); }

  /// Throws InvalidSpec describing the first violated constraint.
  void validate() const;

  /// Equal amplitudes, zero phase centers, every non-reference slit with
  /// width `delta`.
  static MixtureSpec uniform(std::size_t dim, double delta);
};

/// Amplitude-variation mixture: beta_l uniform on
/// [base_l - width_l, base_l + width_l], phases fixed.
struct AmplitudeVariationSpec {
  std::vector<double> base_betas;
  std::vector<double> beta_widths;
  std::vector<double> phis;

  std::size_t dim() const { return base_betas.size(); }
  void validate() const;
};

/// Deterministic in (spec, seed). The reference slit always has phase 0.
PureQudit sample_phase_state(const MixtureSpec& spec, std::uint64_t seed);
PureQudit sample_amplitude_state(const AmplitudeVariationSpec& spec, std::uint64_t seed);

struct TracePoint {
  std::size_t count;
  double purity;
};

/// Running equal-weight sum of pure-state projectors.
class MixtureAccumulator {
 public:
  explicit MixtureAccumulator(std::size_t dim, bool log_trace = false);

  void add(const PureQudit& psi);
  /// Sums two partial accumulations of the same dimension. Trace logs are
  /// not merged; the result keeps this accumulator's log.
  void merge(const MixtureAccumulator& other);

  std::size_t dim() const { return dim_; }
  std::size_t count() const { return count_; }
  const Matrix& sum() const { return sum_; }
  const std::vector<TracePoint>& trace_log() const { return trace_; }

  /// sum / count. Throws std::logic_error when empty.
  DensityMatrix density() const;
  double purity() const;

 private:
  std::size_t dim_;
  std::size_t count_ = 0;
  Matrix sum_;
  Matrix carry_;
  bool log_trace_;
  std::vector<TracePoint> trace_;
};

MixtureAccumulator accumulate(MixtureAccumulator acc, const PureQudit& psi);

/// Seed of the k-th state of a mixture drawn under `root_seed`.
std::uint64_t mixture_sample_seed(std::uint64_t root_seed, std::size_t k);

/// Mixes `n` sampled phase states (seeds from mixture_sample_seed).
MixtureAccumulator sample_mixture(const MixtureSpec& spec, std::size_t n, std::uint64_t root_seed,
                                  bool log_trace = false);

/// c_{l,l'}: 1 on the diagonal, exp(i(phi_l - phi_l')) sinc(delta_l/2) sinc(delta_l'/2) off it.
Complex analytic_coefficient(const MixtureSpec& spec, std::size_t l, std::size_t lp);

/// rho_{l,l'} = beta_l beta_l' c_{l,l'} / sum_j beta_j^2.
DensityMatrix analytic_density_matrix(const MixtureSpec& spec);

/// Closed-form purity, evaluated independently of analytic_density_matrix.
double analytic_purity(const MixtureSpec& spec);

/// Monte-Carlo purity of an N-state mixture.
///
/// `purity` is the unbiased estimator (N Tr(rho_N^2) - 1) / (N - 1) of the
/// infinite-ensemble purity, `std_error` its jackknife standard error, and
/// `plugin` the raw Tr(rho_N^2) of the finite mixture, which exceeds the
/// ensemble value by (1 - P) / N on average.
struct PurityEstimate {
  double purity = 0.0;
  double std_error = 0.0;
  double plugin = 0.0;
  std::size_t samples = 0;
};

using StateSampler = std::function<PureQudit(std::uint64_t seed)>;

/// Requires n >= 3. State k is sampler(mixture_sample_seed(root_seed, k)).
PurityEstimate estimate_purity(std::size_t dim, const StateSampler& sampler, std::size_t n,
                               std::uint64_t root_seed);
PurityEstimate monte_carlo_purity(const MixtureSpec& spec, std::size_t n, std::uint64_t root_seed);
PurityEstimate monte_carlo_purity(const AmplitudeVariationSpec& spec, std::size_t n, std::uint64_t root_seed);

inline constexpr std::size_t kDefaultMonteCarloSamples = 250;

struct SweepRow {
  double delta;
  double analytic_purity;
  double mc_purity;
  double mc_stderr;
};

/// One row per grid width, sweeping deltas[axis] of `spec_template`.
std::vector<SweepRow> purity_sweep(const MixtureSpec& spec_template, std::size_t axis,
                                   const std::vector<double>& grid,
                                   std::size_t samples = kDefaultMonteCarloSamples, std::uint64_t seed = 0);

/// Evenly spaced widths on [0, 2 pi], endpoints included.
std::vector<double> width_grid(std::size_t points);

/// (count, Tr(rho_count^2)) after each of n_states sampled states.
std::vector<TracePoint> convergence_trace(const MixtureSpec& spec, std::size_t n_states, std::uint64_t seed);

}  // namespace qudmix
