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
#include "qudmix/qudit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qudmix/errors.hpp"
#include "qudmix/random.hpp"

namespace qudmix {

namespace {

double max_abs_antihermitian(const Matrix& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

// Eigenvalues this close to zero are indistinguishable from round-off for
// D <= ~16 and are zeroed before taking square roots; sqrt() would otherwise
// turn 1e-17 noise into 3e-9 contributions to a fidelity.
double sqrt_noise_floor(Eigen::Index dim, double largest) {
  return 8.0 * static_cast<double>(dim) * std::numeric_limits<double>::epsilon() * std::max(1.0, largest);
}

}  // namespace

PureQudit::PureQudit(Vector amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() < 2) {
    throw InvalidSpec("PureQudit needs dimension >= 2, got " + std::to_string(amplitudes_.size()));
  }
  if (!amplitudes_.allFinite()) throw InvalidSpec("PureQudit amplitudes must be finite");
  const double norm = amplitudes_.norm();
  if (norm == 0.0) throw InvalidSpec("PureQudit amplitudes are all zero");
  amplitudes_ /= norm;
}

PureQudit::PureQudit(const std::vector<Complex>& amplitudes)
    : PureQudit(Vector(Eigen::Map<const Vector>(amplitudes.data(), static_cast<Eigen::Index>(amplitudes.size())))) {}

PureQudit PureQudit::basis_state(std::size_t dim, std::size_t index) {
  if (index >= dim) throw IndexOutOfRange("basis index " + std::to_string(index) + " >= dim " + std::to_string(dim));
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
  v[static_cast<Eigen::Index>(index)] = 1.0;
  return PureQudit(std::move(v));
}

Complex PureQudit::inner(const PureQudit& other) const {
  if (other.dim() != dim()) throw DimensionMismatch("inner product of states with different dimensions");
  return amplitudes_.dot(other.amplitudes_);
}

DensityMatrix::DensityMatrix(const Matrix& entries, const Tolerances& tol) {
  if (entries.rows() != entries.cols() || entries.rows() == 0) {
    throw DimensionMismatch("density matrix must be square and non-empty");
  }
  if (!entries.allFinite()) throw NumericalInvariantViolation("density matrix has non-finite entries");
  const double asym = max_abs_antihermitian(entries);
  if (asym > 2.0 * tol.hermiticity) {
    std::ostringstream msg;
    msg << "density matrix is not Hermitian (max |M - M^dagger| = " << asym << ")";
    throw NumericalInvariantViolation(msg.str());
  }
  const Complex tr = entries.trace();
  if (std::abs(tr - 1.0) > tol.trace) {
    std::ostringstream msg;
    msg << "density matrix trace " << tr.real() << (tr.imag() >= 0 ? "+" : "") << tr.imag() << "i is not 1";
    throw NumericalInvariantViolation(msg.str());
  }
  entries_ = (entries + entries.adjoint()) * 0.5;
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return DensityMatrix(Matrix::Identity(n, n) / static_cast<double>(dim));
}

double DensityMatrix::min_eigenvalue() const { return hermitian_spectrum(entries_).eigenvalues.back(); }

bool DensityMatrix::is_positive(const Tolerances& tol) const { return min_eigenvalue() >= -tol.positivity; }

Matrix Spectrum::reconstruct() const {
  const Eigen::Index n = eigenvectors.rows();
  Matrix out = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < eigenvectors.cols(); ++k) {
    out += eigenvalues[static_cast<std::size_t>(k)] * eigenvectors.col(k) * eigenvectors.col(k).adjoint();
  }
  return out;
}

Spectrum hermitian_spectrum(const Matrix& m, const Tolerances& tol) {
  if (m.rows() != m.cols()) throw DimensionMismatch("hermitian_spectrum needs a square matrix");
  const double asym = max_abs_antihermitian(m);
  if (asym > 2.0 * tol.spectrum_reconstruction) {
    std::ostringstream msg;
    msg << "matrix is not Hermitian (max |M - M^dagger| = " << asym << ")";
    throw NumericalInvariantViolation(msg.str());
  }
  const Matrix h = (m + m.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceFailure("Hermitian eigensolver did not converge", 30 * static_cast<int>(m.rows()));
  }
  const Eigen::Index n = h.rows();
  Spectrum out;
  out.eigenvalues.resize(static_cast<std::size_t>(n));
  out.eigenvectors.resize(n, n);
  // Eigen sorts ascending.
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues[static_cast<std::size_t>(k)] = solver.eigenvalues()[n - 1 - k];
    out.eigenvectors.col(k) = solver.eigenvectors().col(n - 1 - k);
  }
  return out;
}

double purity(const DensityMatrix& rho) { return rho.entries().squaredNorm(); }

Matrix psd_sqrt(const Matrix& m, const Tolerances& tol) {
  const Spectrum spec = hermitian_spectrum(m, tol);
  const double floor = sqrt_noise_floor(m.rows(), spec.eigenvalues.front());
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (std::size_t k = 0; k < spec.eigenvalues.size(); ++k) {
    const double lambda = spec.eigenvalues[k];
    if (lambda < -tol.clip_threshold) {
      std::ostringstream msg;
      msg << "matrix square root of a non-positive matrix (eigenvalue " << lambda << ")";
      throw NumericalInvariantViolation(msg.str());
    }
    if (lambda <= floor) continue;
    const auto col = spec.eigenvectors.col(static_cast<Eigen::Index>(k));
    out += std::sqrt(lambda) * col * col.adjoint();
  }
  return out;
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma, const Tolerances& tol) {
  if (rho.dim() != sigma.dim()) {
    throw DimensionMismatch("fidelity between dimensions " + std::to_string(rho.dim()) + " and " +
                            std::to_string(sigma.dim()));
  }
  const Matrix root = psd_sqrt(rho.entries(), tol);
  const Matrix inner = root * sigma.entries() * root;
  const Spectrum spec = hermitian_spectrum((inner + inner.adjoint()) * 0.5, tol);
  const double floor = sqrt_noise_floor(inner.rows(), spec.eigenvalues.front());
  double f = 0.0;
  for (double lambda : spec.eigenvalues) {
    if (lambda < -tol.clip_threshold) {
      std::ostringstream msg;
      msg << "fidelity against an unphysical state (eigenvalue " << lambda << ")";
      throw NumericalInvariantViolation(msg.str());
    }
    if (lambda > floor) f += std::sqrt(lambda);
  }
  return std::clamp(f, 0.0, 1.0);
}

DensityMatrix projector(const PureQudit& psi) {
  const Vector& v = psi.amplitudes();
  return DensityMatrix(v * v.adjoint());
}

PureQudit random_pure_state(std::size_t dim, Rng& rng) {
  Vector v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = Complex(rng.normal(), rng.normal());
  return PureQudit(std::move(v));
}

DensityMatrix random_density_matrix(std::size_t dim, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(dim);
  Matrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = Complex(rng.normal(), rng.normal());
  }
  const Matrix m = g * g.adjoint();
  return DensityMatrix(m / m.trace().real());
}

double frobenius_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("frobenius_distance between different dimensions");
  return (a.entries() - b.entries()).norm();
}

}  // namespace qudmix
