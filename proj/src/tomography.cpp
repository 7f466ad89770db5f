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
#include "qudmix/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "qudmix/ensemble.hpp"
#include "qudmix/errors.hpp"
#include "qudmix/random.hpp"

namespace qudmix {

namespace {

constexpr double kBasisNormalization = 1e-9;

std::size_t record_slot(const ProjectionRecord& r, std::size_t dim) {
  if (r.alpha < 1 || r.alpha > dim + 1 || r.m >= dim) {
    std::ostringstream msg;
    msg << "projection record (alpha=" << r.alpha << ", m=" << r.m << ") does not belong to dim " << dim;
    throw DimensionMismatch(msg.str());
  }
  return (r.alpha - 1) * dim + r.m;
}

// Probabilities indexed by slot, with per-basis normalization applied.
std::vector<double> normalized_probabilities(const std::vector<ProjectionRecord>& records, std::size_t dim) {
  const std::size_t n_slots = dim * (dim + 1);
  std::vector<const ProjectionRecord*> by_slot(n_slots, nullptr);
  for (const auto& r : records) {
    const std::size_t slot = record_slot(r, dim);
    if (by_slot[slot] != nullptr) {
      throw InvalidSpec("duplicate projection record alpha=" + std::to_string(r.alpha) + " m=" + std::to_string(r.m));
    }
    by_slot[slot] = &r;
  }
  for (std::size_t slot = 0; slot < n_slots; ++slot) {
    if (by_slot[slot] == nullptr) {
      throw IncompleteData("missing projection alpha=" + std::to_string(slot / dim + 1) +
                           " m=" + std::to_string(slot % dim));
    }
  }
  std::vector<double> p(n_slots);
  for (std::size_t b = 0; b <= dim; ++b) {
    const auto first = by_slot.begin() + static_cast<std::ptrdiff_t>(b * dim);
    const bool counted = std::all_of(first, first + static_cast<std::ptrdiff_t>(dim),
                                     [](const ProjectionRecord* r) { return r->counts.has_value(); });
    double total = 0.0;
    for (std::size_t m = 0; m < dim; ++m) {
      const ProjectionRecord& r = *by_slot[b * dim + m];
      total += counted ? static_cast<double>(*r.counts) : r.probability;
    }
    if (counted && total == 0.0) throw InvalidSpec("basis " + std::to_string(b + 1) + " recorded no counts");
    if (!counted && std::abs(total - 1.0) > kBasisNormalization) {
      std::ostringstream msg;
      msg << "basis " << b + 1 << " probabilities sum to " << total << ", not 1";
      throw InvalidSpec(msg.str());
    }
    for (std::size_t m = 0; m < dim; ++m) {
      const ProjectionRecord& r = *by_slot[b * dim + m];
      p[b * dim + m] = (counted ? static_cast<double>(*r.counts) : r.probability) / total;
    }
  }
  return p;
}

Matrix inversion_from(const std::vector<double>& p, const MubSet& mubs) {
  const std::size_t d = mubs.dim();
  const auto n = static_cast<Eigen::Index>(d);
  Matrix rho = -Matrix::Identity(n, n);
  for (std::size_t b = 0; b <= d; ++b) {
    for (std::size_t m = 0; m < d; ++m) {
      const Vector& v = mubs.vector(b, m).amplitudes();
      rho.noalias() += p[b * d + m] * (v * v.adjoint());
    }
  }
  return rho;
}

}  // namespace

bool is_prime(std::size_t n) {
  if (n < 2) return false;
  for (std::size_t k = 2; k * k <= n; ++k) {
    if (n % k == 0) return false;
  }
  return true;
}

MubSet build_mubs(std::size_t dim) {
  if (!is_prime(dim)) {
    throw UnsupportedDimension("mutually unbiased bases are only built for prime dimensions, got " +
                               std::to_string(dim));
  }
  MubSet set;
  set.dim_ = dim;
  std::vector<PureQudit> computational;
  for (std::size_t m = 0; m < dim; ++m) computational.push_back(PureQudit::basis_state(dim, m));
  set.bases_.push_back(std::move(computational));

  const Complex i(0.0, 1.0);
  if (dim == 2) {
    const double r = 1.0 / std::sqrt(2.0);
    Vector xp(2), xm(2), yp(2), ym(2);
    xp << r, r;
    xm << r, -r;
    yp << r, r * i;
    ym << r, -r * i;
    set.bases_.push_back({PureQudit(xp), PureQudit(xm)});
    set.bases_.push_back({PureQudit(yp), PureQudit(ym)});
    return set;
  }

  const auto n = static_cast<Eigen::Index>(dim);
  const double amp = 1.0 / std::sqrt(static_cast<double>(dim));
  for (std::size_t a = 1; a <= dim; ++a) {
    std::vector<PureQudit> basis;
    for (std::size_t m = 0; m < dim; ++m) {
      Vector v(n);
      for (std::size_t l = 0; l < dim; ++l) {
        // Reduce the exponent mod D before forming the angle to keep phases exact.
        const std::size_t k = (a * l % dim * l + m * l) % dim;
        v[static_cast<Eigen::Index>(l)] = std::polar(amp, kTwoPi * static_cast<double>(k) / static_cast<double>(dim));
      }
      basis.emplace_back(std::move(v));
    }
    set.bases_.push_back(std::move(basis));
  }
  return set;
}

std::vector<ProjectionRecord> projection_probabilities(const DensityMatrix& rho, const MubSet& mubs) {
  if (rho.dim() != mubs.dim()) {
    throw DimensionMismatch("state of dim " + std::to_string(rho.dim()) + " against MUBs of dim " +
                            std::to_string(mubs.dim()));
  }
  std::vector<ProjectionRecord> out;
  out.reserve(mubs.basis_count() * mubs.dim());
  for (std::size_t b = 0; b < mubs.basis_count(); ++b) {
    for (std::size_t m = 0; m < mubs.dim(); ++m) {
      const Vector& v = mubs.vector(b, m).amplitudes();
      out.push_back({b + 1, m, v.dot(rho.entries() * v).real(), std::nullopt});
    }
  }
  return out;
}

std::vector<ProjectionRecord> simulate_counts(const std::vector<ProjectionRecord>& records,
                                              std::uint64_t photons_per_basis, std::uint64_t seed) {
  if (photons_per_basis < 1) throw InvalidSpec("photons_per_basis must be >= 1");
  std::vector<ProjectionRecord> out = records;
  // Group by basis, preserving record order within a basis.
  std::vector<std::size_t> alphas;
  for (const auto& r : records) {
    if (std::find(alphas.begin(), alphas.end(), r.alpha) == alphas.end()) alphas.push_back(r.alpha);
  }
  for (std::size_t alpha : alphas) {
    std::vector<std::size_t> idx;
    double total = 0.0;
    for (std::size_t k = 0; k < records.size(); ++k) {
      if (records[k].alpha == alpha) {
        idx.push_back(k);
        total += std::clamp(records[k].probability, 0.0, 1.0);
      }
    }
    Rng rng(derive_seed(seed, streams::kPhotonCounts, alpha));
    // Sequential conditional binomials.
    std::uint64_t remaining = photons_per_basis;
    double mass_left = total;
    for (std::size_t j = 0; j < idx.size(); ++j) {
      ProjectionRecord& r = out[idx[j]];
      const double p = std::clamp(records[idx[j]].probability, 0.0, 1.0);
      std::uint64_t c = 0;
      if (j + 1 == idx.size()) {
        c = remaining;
      } else if (remaining > 0 && mass_left > 0.0 && p > 0.0) {
        const double cond = p / mass_left;
        if (cond >= 1.0) {
          c = remaining;
        } else {
          std::binomial_distribution<std::uint64_t> binom(remaining, cond);
          c = binom(rng);
        }
      }
      remaining -= c;
      mass_left -= p;
      r.counts = c;
      r.probability = static_cast<double>(c) / static_cast<double>(photons_per_basis);
    }
  }
  return out;
}

Matrix linear_inversion(const std::vector<ProjectionRecord>& records, const MubSet& mubs) {
  const std::size_t d = mubs.dim();
  std::vector<double> p(d * (d + 1), 0.0);
  std::vector<bool> seen(p.size(), false);
  for (const auto& r : records) {
    const std::size_t slot = record_slot(r, d);
    p[slot] = r.probability;
    seen[slot] = true;
  }
  for (std::size_t slot = 0; slot < seen.size(); ++slot) {
    if (!seen[slot]) {
      throw IncompleteData("missing projection alpha=" + std::to_string(slot / d + 1) + " m=" +
                           std::to_string(slot % d));
    }
  }
  return inversion_from(p, mubs);
}

DensityMatrix nearest_physical(const Matrix& hermitian, const Tolerances& tol) {
  Spectrum spec = hermitian_spectrum(hermitian, tol);
  double total = 0.0;
  for (double& lambda : spec.eigenvalues) {
    lambda = std::max(lambda, 0.0);
    total += lambda;
  }
  if (total <= 0.0) throw NumericalInvariantViolation("no positive spectral weight left after clipping");
  for (double& lambda : spec.eigenvalues) lambda /= total;
  Matrix rho = spec.reconstruct();
  return DensityMatrix(rho / rho.trace().real(), tol);
}

Reconstruction reconstruct(const std::vector<ProjectionRecord>& records, const MubSet& mubs,
                           const ReconstructOptions& options) {
  const std::size_t d = mubs.dim();
  const Matrix raw = inversion_from(normalized_probabilities(records, d), mubs);

  PhysicalityReport report;
  const Spectrum spec = hermitian_spectrum(raw, options.tol);
  report.min_eigenvalue = spec.eigenvalues.back();
  for (auto it = spec.eigenvalues.rbegin(); it != spec.eigenvalues.rend() && *it < 0.0; ++it) {
    report.negative_eigenvalues.push_back(*it);
  }
  report.physical = report.min_eigenvalue >= -options.tol.clip_threshold;

  if (!report.physical && options.repair) {
    report.repaired = true;
    return {nearest_physical(raw, options.tol), report};
  }
  // Per-basis normalization makes the trace exactly D + 1 - D up to rounding.
  return {DensityMatrix(raw / raw.trace().real(), options.tol), report};
}

}  // namespace qudmix
