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
#include <sstream>
#include <stdexcept>

#include "qudmix/errors.hpp"
#include "qudmix/random.hpp"

namespace qudmix {

namespace {

// Widths computed as 2 pi * k / D can land a few ulps above 2 pi.
constexpr double kAngleSlack = 1e-12;

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidSpec(what);
}

bool finite_all(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

void MixtureSpec::validate() const {
  const std::size_t d = betas.size();
  require(d >= 2, "mixture needs dim >= 2");
  require(phis.size() == d && deltas.size() == d, "betas, phis and deltas must all have length dim");
  require(finite_all(betas) && finite_all(phis) && finite_all(deltas), "mixture parameters must be finite");
  bool any_positive = false;
  for (std::size_t l = 0; l < d; ++l) {
    require(betas[l] >= 0.0, "beta[" + std::to_string(l) + "] is negative");
    any_positive = any_positive || betas[l] > 0.0;
    require(phis[l] >= 0.0 && phis[l] < kTwoPi, "phi[" + std::to_string(l) + "] outside [0, 2pi)");
    require(deltas[l] >= 0.0 && deltas[l] <= kTwoPi + kAngleSlack,
            "delta[" + std::to_string(l) + "] outside [0, 2pi]");
  }
  require(any_positive, "at least one beta must be positive");
  if (reference) {
    const std::size_t r = *reference;
    require(r < d, "reference slit " + std::to_string(r) + " out of range");
    require(deltas[r] == 0.0 && phis[r] == 0.0,
            "reference slit " + std::to_string(r) + " must have delta = phi = 0");
  }
}

MixtureSpec MixtureSpec::uniform(std::size_t dim, double delta) {
  MixtureSpec spec;
  spec.betas.assign(dim, 1.0);
  spec.phis.assign(dim, 0.0);
  spec.deltas.assign(dim, delta);
  if (dim > 0) spec.deltas[0] = 0.0;
  return spec;
}

void AmplitudeVariationSpec::validate() const {
  const std::size_t d = base_betas.size();
  require(d >= 2, "amplitude variation needs dim >= 2");
  require(beta_widths.size() == d && phis.size() == d, "base_betas, beta_widths and phis must all have length dim");
  require(finite_all(base_betas) && finite_all(beta_widths) && finite_all(phis),
          "amplitude-variation parameters must be finite");
  bool any_positive = false;
  for (std::size_t l = 0; l < d; ++l) {
    require(beta_widths[l] >= 0.0, "beta_width[" + std::to_string(l) + "] is negative");
    require(base_betas[l] - beta_widths[l] >= 0.0,
            "base_beta[" + std::to_string(l) + "] - beta_width must be >= 0");
    any_positive = any_positive || base_betas[l] > 0.0;
  }
  require(any_positive, "at least one base beta must be positive");
}

PureQudit sample_phase_state(const MixtureSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  const auto d = static_cast<Eigen::Index>(spec.dim());
  Vector amps(d);
  for (Eigen::Index l = 0; l < d; ++l) {
    const auto i = static_cast<std::size_t>(l);
    // One draw per slit, pinned or not, so the stream layout never depends on the widths.
    const double u = rng.uniform() - 0.5;
    const double alpha = spec.phis[i] + spec.deltas[i] * u;
    amps[l] = std::polar(spec.betas[i], alpha);
  }
  return PureQudit(std::move(amps));
}

PureQudit sample_amplitude_state(const AmplitudeVariationSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  const auto d = static_cast<Eigen::Index>(spec.dim());
  Vector amps(d);
  for (Eigen::Index l = 0; l < d; ++l) {
    const auto i = static_cast<std::size_t>(l);
    const double beta = spec.base_betas[i] + spec.beta_widths[i] * (2.0 * rng.uniform() - 1.0);
    amps[l] = std::polar(beta, spec.phis[i]);
  }
  return PureQudit(std::move(amps));
}

MixtureAccumulator::MixtureAccumulator(std::size_t dim, bool log_trace)
    : dim_(dim),
      sum_(Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim))),
      carry_(Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim))),
      log_trace_(log_trace) {}

void MixtureAccumulator::add(const PureQudit& psi) {
  if (psi.dim() != dim_) {
    throw DimensionMismatch("accumulating a dim-" + std::to_string(psi.dim()) + " state into a dim-" +
                            std::to_string(dim_) + " mixture");
  }
  // Kahan summation: a plain running sum drifts by ~count * eps, which
  // swamps the standard error of nearly pure mixtures at large counts.
  const Vector& v = psi.amplitudes();
  const Matrix y = v * v.adjoint() - carry_;
  const Matrix t = sum_ + y;
  carry_ = (t - sum_) - y;
  sum_ = t;
  ++count_;
  if (log_trace_) trace_.push_back({count_, purity()});
}

void MixtureAccumulator::merge(const MixtureAccumulator& other) {
  if (other.dim_ != dim_) throw DimensionMismatch("merging mixtures of different dimensions");
  const Matrix y = other.sum_ - other.carry_ - carry_;
  const Matrix t = sum_ + y;
  carry_ = (t - sum_) - y;
  sum_ = t;
  count_ += other.count_;
}

DensityMatrix MixtureAccumulator::density() const {
  if (count_ == 0) throw std::logic_error("empty mixture has no density matrix");
  // Each projector has trace 1 up to rounding, so dividing by the running
  // trace equals dividing by count while keeping Tr = 1 to machine precision.
  return DensityMatrix(sum_ / sum_.trace().real());
}

double MixtureAccumulator::purity() const {
  if (count_ == 0) throw std::logic_error("empty mixture has no purity");
  const double tr = sum_.trace().real();
  return sum_.squaredNorm() / (tr * tr);
}

MixtureAccumulator accumulate(MixtureAccumulator acc, const PureQudit& psi) {
  acc.add(psi);
  return acc;
}

std::uint64_t mixture_sample_seed(std::uint64_t root_seed, std::size_t k) {
  return derive_seed(root_seed, streams::kMixtureSample, k);
}

MixtureAccumulator sample_mixture(const MixtureSpec& spec, std::size_t n, std::uint64_t root_seed, bool log_trace) {
  spec.validate();
  MixtureAccumulator acc(spec.dim(), log_trace);
  for (std::size_t k = 0; k < n; ++k) acc.add(sample_phase_state(spec, mixture_sample_seed(root_seed, k)));
  return acc;
}

Complex analytic_coefficient(const MixtureSpec& spec, std::size_t l, std::size_t lp) {
  spec.validate();
  if (l >= spec.dim() || lp >= spec.dim()) {
    throw IndexOutOfRange("coefficient index (" + std::to_string(l) + ", " + std::to_string(lp) +
                          ") outside dim " + std::to_string(spec.dim()));
  }
  if (l == lp) return 1.0;
  const double damping = sinc(spec.deltas[l] / 2.0) * sinc(spec.deltas[lp] / 2.0);
  return std::polar(damping, spec.phis[l] - spec.phis[lp]);
}

DensityMatrix analytic_density_matrix(const MixtureSpec& spec) {
  spec.validate();
  const std::size_t d = spec.dim();
  double norm = 0.0;
  for (double b : spec.betas) norm += b * b;
  Matrix rho(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t l = 0; l < d; ++l) {
    for (std::size_t lp = 0; lp < d; ++lp) {
      rho(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(lp)) =
          (spec.betas[l] * spec.betas[lp] / norm) * analytic_coefficient(spec, l, lp);
    }
  }
  return DensityMatrix(rho);
}

double analytic_purity(const MixtureSpec& spec) {
  spec.validate();
  const std::size_t d = spec.dim();
  double norm = 0.0;
  double quartic = 0.0;
  for (double b : spec.betas) {
    norm += b * b;
    quartic += b * b * b * b;
  }
  const double z = 1.0 / norm;
  double cross = 0.0;
  for (std::size_t i = 0; i + 1 < d; ++i) {
    const double si = sinc(spec.deltas[i] / 2.0);
    for (std::size_t j = i + 1; j < d; ++j) {
      const double sj = sinc(spec.deltas[j] / 2.0);
      cross += spec.betas[i] * spec.betas[i] * spec.betas[j] * spec.betas[j] * si * si * sj * sj;
    }
  }
  return z * z * quartic + 2.0 * z * z * cross;
}

PurityEstimate estimate_purity(std::size_t dim, const StateSampler& sampler, std::size_t n, std::uint64_t root_seed) {
  if (n < 3) throw InvalidSpec("purity estimation needs at least 3 samples");
  MixtureAccumulator acc(dim);
  for (std::size_t k = 0; k < n; ++k) acc.add(sampler(mixture_sample_seed(root_seed, k)));
  const Matrix& s = acc.sum();
  const double nn = static_cast<double>(n);
  const double tr_s2 = s.squaredNorm();

  // Second pass: q_k = <psi_k|S|psi_k>. Leave-one-out estimates differ from
  // each other only through -2 q_k / (M (M - 1)), M = n - 1.
  std::vector<double> q(n);
  double q_mean = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const PureQudit psi = sampler(mixture_sample_seed(root_seed, k));
    q[k] = psi.amplitudes().dot(s * psi.amplitudes()).real();
    q_mean += q[k];
  }
  q_mean /= nn;
  const double m = nn - 1.0;
  const double scale = 2.0 / (m * (m - 1.0));
  double ss = 0.0;
  for (double qk : q) {
    const double dev = scale * (qk - q_mean);
    ss += dev * dev;
  }

  PurityEstimate out;
  out.samples = n;
  out.plugin = tr_s2 / (nn * nn);
  out.purity = (tr_s2 - nn) / (nn * (nn - 1.0));
  out.std_error = std::sqrt((nn - 1.0) / nn * ss);
  return out;
}

PurityEstimate monte_carlo_purity(const MixtureSpec& spec, std::size_t n, std::uint64_t root_seed) {
  spec.validate();
  return estimate_purity(
      spec.dim(), [&spec](std::uint64_t seed) { return sample_phase_state(spec, seed); }, n, root_seed);
}

PurityEstimate monte_carlo_purity(const AmplitudeVariationSpec& spec, std::size_t n, std::uint64_t root_seed) {
  spec.validate();
  return estimate_purity(
      spec.dim(), [&spec](std::uint64_t seed) { return sample_amplitude_state(spec, seed); }, n, root_seed);
}

std::vector<SweepRow> purity_sweep(const MixtureSpec& spec_template, std::size_t axis, const std::vector<double>& grid,
                                   std::size_t samples, std::uint64_t seed) {
  spec_template.validate();
  if (axis >= spec_template.dim()) {
    throw IndexOutOfRange("sweep axis " + std::to_string(axis) + " outside dim " +
                          std::to_string(spec_template.dim()));
  }
  if (spec_template.reference && *spec_template.reference == axis) {
    throw InvalidSpec("cannot sweep the width of the reference slit");
  }
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    MixtureSpec spec = spec_template;
    spec.deltas[axis] = grid[i];
    spec.validate();
    const PurityEstimate mc = monte_carlo_purity(spec, samples, derive_seed(seed, streams::kSweepPoint, i));
    rows.push_back({grid[i], analytic_purity(spec), mc.purity, mc.std_error});
  }
  return rows;
}

std::vector<double> width_grid(std::size_t points) {
  if (points < 2) throw InvalidSpec("a width grid needs at least 2 points");
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = kTwoPi * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  grid.back() = kTwoPi;
  return grid;
}

std::vector<TracePoint> convergence_trace(const MixtureSpec& spec, std::size_t n_states, std::uint64_t seed) {
  if (n_states < 1) throw InvalidSpec("convergence trace needs at least one state");
  return sample_mixture(spec, n_states, seed, /*log_trace=*/true).trace_log();
}

}  // namespace qudmix
