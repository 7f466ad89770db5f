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

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "qudmix/tolerances.hpp"

namespace qudmix {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Normalized pure state sum_l c_l |l> of a D-level system, D >= 2.
class PureQudit {
 public:
  /// Normalizes `amplitudes`. Throws InvalidSpec for D < 2, a zero vector or
  /// non-finite entries.
  explicit PureQudit(Vector amplitudes);
  explicit PureQudit(const std::vector<Complex>& amplitudes);

  static PureQudit basis_state(std::size_t dim, std::size_t index);

  std::size_t dim() const { return static_cast<std::size_t>(amplitudes_.size()); }
  const Vector& amplitudes() const { return amplitudes_; }
  Complex operator[](std::size_t i) const { return amplitudes_[static_cast<Eigen::Index>(i)]; }

  /// <this|other>
  Complex inner(const PureQudit& other) const;

 private:
  Vector amplitudes_;
};

/// D x D Hermitian, unit-trace matrix. Positivity is not enforced here since
/// linear tomographic reconstructions may legitimately violate it; see
/// min_eigenvalue() and the tomography physicality report.
class DensityMatrix {
 public:
  /// Validates squareness, Hermiticity and unit trace against `tol`, then
  /// stores the exactly Hermitian part (M + M^dagger) / 2.
  explicit DensityMatrix(const Matrix& entries, const Tolerances& tol = kDefaultTolerances);

  static DensityMatrix maximally_mixed(std::size_t dim);

  std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }
  const Matrix& entries() const { return entries_; }
  Complex operator()(std::size_t i, std::size_t j) const {
    return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

  double min_eigenvalue() const;
  /// True when every eigenvalue is >= -tol.positivity.
  bool is_positive(const Tolerances& tol = kDefaultTolerances) const;

 private:
  Matrix entries_;
};

/// Eigen-decomposition of a Hermitian matrix, eigenvalues in descending
/// order; column k of `eigenvectors` belongs to eigenvalues[k].
struct Spectrum {
  std::vector<double> eigenvalues;
  Matrix eigenvectors;

  Matrix reconstruct() const;
};

/// Symmetrizes `m` and diagonalizes it. Throws NumericalInvariantViolation
/// if `m` is not Hermitian within tol.spectrum_reconstruction, and
/// ConvergenceFailure if the eigensolver gives up.
Spectrum hermitian_spectrum(const Matrix& m, const Tolerances& tol = kDefaultTolerances);

/// Tr(rho^2).
double purity(const DensityMatrix& rho);

/// Uhlmann fidelity Tr sqrt(sqrt(rho) sigma sqrt(rho)), with `rho` the
/// reference (intended) state. Only `rho` needs a square root, so a
/// slightly unphysical `sigma` from linear tomography is accepted as long as
/// sqrt(rho) sigma sqrt(rho) stays positive. Eigenvalues in
/// [-tol.clip_threshold, 0) are clipped; more negative ones throw
/// NumericalInvariantViolation. The result is clamped to [0, 1]. Throws
/// DimensionMismatch on differing D.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma,
                const Tolerances& tol = kDefaultTolerances);

/// Principal square root of a positive semidefinite Hermitian matrix.
Matrix psd_sqrt(const Matrix& m, const Tolerances& tol = kDefaultTolerances);

DensityMatrix projector(const PureQudit& psi);

class Rng;
/// Haar-random pure state (normalized complex Gaussian vector).
PureQudit random_pure_state(std::size_t dim, Rng& rng);
/// Random full-rank state G G^dagger / Tr, G complex Gaussian (Ginibre).
DensityMatrix random_density_matrix(std::size_t dim, Rng& rng);

double frobenius_distance(const DensityMatrix& a, const DensityMatrix& b);

}  // namespace qudmix
