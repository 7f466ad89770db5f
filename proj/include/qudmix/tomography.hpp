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
#include <optional>
#include <vector>

#include "qudmix/qudit.hpp"

namespace qudmix {

bool is_prime(std::size_t n);

/// Complete set of D + 1 mutually unbiased bases for prime D. Basis 0 is the
/// computational (slit) basis.
class MubSet {
 public:
  std::size_t dim() const { return dim_; }
  std::size_t basis_count() const { return bases_.size(); }
  const PureQudit& vector(std::size_t basis, std::size_t m) const { return bases_.at(basis).at(m); }
  const std::vector<PureQudit>& basis(std::size_t b) const { return bases_.at(b); }

 private:
  friend MubSet build_mubs(std::size_t dim);
  std::size_t dim_ = 0;
  std::vector<std::vector<PureQudit>> bases_;
};

/// Pauli eigenbases for D = 2; for odd prime D, basis a in 1..D has vectors
/// (1/sqrt D) omega^(a l^2 + m l), omega = exp(2 pi i / D). Throws
/// UnsupportedDimension when D is not prime.
MubSet build_mubs(std::size_t dim);

/// One projective measurement outcome. `alpha` is 1-based (1..D+1) and
/// addresses basis alpha - 1 of the MubSet; `m` is 0-based.
struct ProjectionRecord {
  std::size_t alpha = 1;
  std::size_t m = 0;
  double probability = 0.0;
  std::optional<std::uint64_t> counts;
};

/// p = Tr(rho |psi_m^alpha><psi_m^alpha|) for all D (D + 1) projectors,
/// ordered by alpha then m.
std::vector<ProjectionRecord> projection_probabilities(const DensityMatrix& rho, const MubSet& mubs);

/// Multinomial photon counts per basis; probabilities become
/// counts / photons_per_basis. Deterministic in seed, with an independent
/// derived stream per basis.
std::vector<ProjectionRecord> simulate_counts(const std::vector<ProjectionRecord>& records,
                                              std::uint64_t photons_per_basis, std::uint64_t seed);

/// Raw linear inversion sum p |psi><psi| - I. Its trace is sum(p) - D, which is
/// 1 only when every basis is normalized. Throws IncompleteData when any
/// (alpha, m) is missing and DimensionMismatch on foreign records.
Matrix linear_inversion(const std::vector<ProjectionRecord>& records, const MubSet& mubs);

struct PhysicalityReport {
  /// Every eigenvalue below zero, most negative first.
  std::vector<double> negative_eigenvalues;
  double min_eigenvalue = 0.0;
  /// min_eigenvalue >= -clip_threshold.
  bool physical = true;
  bool repaired = false;
};

struct ReconstructOptions {
  /// Project onto the positive trace-1 cone by clipping eigenvalues and
  /// renormalizing. Only applied, and reported, when the raw result is
  /// unphysical.
  bool repair = false;
  Tolerances tol = kDefaultTolerances;
};

struct Reconstruction {
  DensityMatrix rho;
  PhysicalityReport report;
};

/// Per-basis normalized linear reconstruction. Bases carrying counts are
/// normalized by their count total; probability-only bases must already sum
/// to 1 within 1e-9 (InvalidSpec otherwise) and are rescaled exactly.
Reconstruction reconstruct(const std::vector<ProjectionRecord>& records, const MubSet& mubs,
                           const ReconstructOptions& options = {});

/// Eigenvalue clipping + renormalization.
DensityMatrix nearest_physical(const Matrix& hermitian, const Tolerances& tol = kDefaultTolerances);

}  // namespace qudmix
