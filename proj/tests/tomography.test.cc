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

#include <cmath>

#include "gtest/gtest.h"

#include "qudmix/errors.hpp"
#include "qudmix/random.hpp"

using namespace qudmix;

namespace {

const std::size_t kPrimes[] = {2, 3, 5, 7, 11, 13};

// Worst deviation from orthonormality within bases and from 1/D overlap
// across bases, computed with explicit loops over amplitudes.
std::pair<double, double> mub_errors(const MubSet& mubs) {
  const std::size_t d = mubs.dim();
  double ortho = 0.0, unbiased = 0.0;
  for (std::size_t a = 0; a < mubs.basis_count(); ++a) {
    for (std::size_t b = a; b < mubs.basis_count(); ++b) {
      for (std::size_t m = 0; m < d; ++m) {
        for (std::size_t n = 0; n < d; ++n) {
          Complex ip = 0.0;
          for (std::size_t l = 0; l < d; ++l) ip += std::conj(mubs.vector(a, m)[l]) * mubs.vector(b, n)[l];
          if (a == b) {
            ortho = std::max(ortho, std::abs(ip - (m == n ? 1.0 : 0.0)));
          } else {
            unbiased = std::max(unbiased, std::abs(std::norm(ip) - 1.0 / static_cast<double>(d)));
          }
        }
      }
    }
  }
  return {ortho, unbiased};
}

}  // namespace

TEST(is_prime, small_values) {
  const std::vector<std::size_t> primes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
  for (std::size_t n = 0; n < 30; ++n) {
    ASSERT_EQ(is_prime(n), std::find(primes.begin(), primes.end(), n) != primes.end()) << n;
  }
}

TEST(build_mubs, qubit_is_pauli_eigenbases) {
  const MubSet mubs = build_mubs(2);
  ASSERT_EQ(mubs.basis_count(), 3u);
  ASSERT_NEAR(std::abs(mubs.vector(0, 0)[0]), 1.0, 1e-15);
  ASSERT_NEAR(std::abs(mubs.vector(0, 1)[1]), 1.0, 1e-15);
  // Remaining bases: every vector is an equal superposition whose relative
  // phase is real (X) or imaginary (Y).
  bool saw_x = false, saw_y = false;
  for (std::size_t b = 1; b < 3; ++b) {
    const Complex rel = mubs.vector(b, 0)[1] / mubs.vector(b, 0)[0];
    ASSERT_NEAR(std::abs(rel), 1.0, 1e-15);
    saw_x |= std::abs(rel.imag()) < 1e-15;
    saw_y |= std::abs(rel.real()) < 1e-15;
  }
  ASSERT_TRUE(saw_x && saw_y);
}

TEST(build_mubs, exhaustive_overlaps) {
  for (std::size_t d : kPrimes) {
    const MubSet mubs = build_mubs(d);
    ASSERT_EQ(mubs.basis_count(), d + 1);
    const auto [ortho, unbiased] = mub_errors(mubs);
    ASSERT_LT(ortho, 1e-12) << "D=" << d;
    ASSERT_LT(unbiased, 1e-12) << "D=" << d;
  }
}

TEST(build_mubs, rejects_non_prime) {
  for (std::size_t d : {0, 1, 4, 6, 9, 15}) ASSERT_THROW(build_mubs(d), UnsupportedDimension) << d;
}

TEST(projection_probabilities, maximally_mixed_and_basis_state) {
  const MubSet mubs = build_mubs(5);
  for (const auto& r : projection_probabilities(DensityMatrix::maximally_mixed(5), mubs)) {
    ASSERT_NEAR(r.probability, 0.2, 1e-15);
  }
  const auto recs = projection_probabilities(projector(PureQudit::basis_state(5, 0)), mubs);
  ASSERT_EQ(recs.size(), 30u);
  for (const auto& r : recs) {
    const double expected = r.alpha == 1 ? (r.m == 0 ? 1.0 : 0.0) : 0.2;
    ASSERT_NEAR(r.probability, expected, 1e-14) << r.alpha << "," << r.m;
  }
  ASSERT_THROW(projection_probabilities(DensityMatrix::maximally_mixed(3), mubs), DimensionMismatch);
}

TEST(projection_probabilities, bases_sum_to_one) {
  Rng rng(1);
  const MubSet mubs = build_mubs(3);
  const auto recs = projection_probabilities(random_density_matrix(3, rng), mubs);
  double total = 0.0;
  for (const auto& r : recs) {
    ASSERT_GE(r.probability, -1e-15);
    total += r.probability;
  }
  ASSERT_NEAR(total, 4.0, 1e-9);
}

TEST(simulate_counts, law_of_large_numbers) {
  Rng rng(2);
  const MubSet mubs = build_mubs(3);
  const auto exact = projection_probabilities(random_density_matrix(3, rng), mubs);
  const auto noisy = simulate_counts(exact, 10000000, 5);
  double worst = 0.0;
  std::vector<std::uint64_t> totals(4, 0);
  for (std::size_t i = 0; i < exact.size(); ++i) {
    ASSERT_TRUE(noisy[i].counts.has_value());
    totals[noisy[i].alpha - 1] += *noisy[i].counts;
    worst = std::max(worst, std::abs(noisy[i].probability - exact[i].probability));
  }
  ASSERT_LT(worst, 1e-3);
  for (auto t : totals) ASSERT_EQ(t, 10000000u);
}

TEST(simulate_counts, degenerate_and_deterministic) {
  std::vector<ProjectionRecord> recs{{1, 0, 1.0, {}}, {1, 1, 0.0, {}}};
  for (std::uint64_t n : {1u, 17u, 1000u}) {
    const auto out = simulate_counts(recs, n, 3);
    ASSERT_EQ(*out[0].counts, n);
    ASSERT_EQ(*out[1].counts, 0u);
  }
  const MubSet mubs = build_mubs(5);
  const auto p = projection_probabilities(DensityMatrix::maximally_mixed(5), mubs);
  const auto a = simulate_counts(p, 1000, 8), b = simulate_counts(p, 1000, 8);
  for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(*a[i].counts, *b[i].counts);
}

TEST(reconstruct, noiseless_round_trip) {
  Rng rng(3);
  for (std::size_t d : kPrimes) {
    const MubSet mubs = build_mubs(d);
    for (int k = 0; k < 10; ++k) {
      const DensityMatrix rho = random_density_matrix(d, rng);
      const Reconstruction rec = reconstruct(projection_probabilities(rho, mubs), mubs);
      ASSERT_LT(frobenius_distance(rec.rho, rho), 1e-10) << "D=" << d;
      ASSERT_TRUE(rec.report.physical);
      ASSERT_FALSE(rec.report.repaired);
    }
  }
}

TEST(reconstruct, maximally_mixed_qubit_exact) {
  const MubSet mubs = build_mubs(2);
  const DensityMatrix half = DensityMatrix::maximally_mixed(2);
  const Reconstruction rec = reconstruct(projection_probabilities(half, mubs), mubs);
  ASSERT_EQ(rec.rho.entries(), half.entries());
}

TEST(reconstruct, missing_and_duplicate_records) {
  const MubSet mubs = build_mubs(3);
  auto recs = projection_probabilities(DensityMatrix::maximally_mixed(3), mubs);
  auto missing = recs;
  missing.erase(missing.begin() + 4);
  ASSERT_THROW(reconstruct(missing, mubs), IncompleteData);
  ASSERT_THROW(linear_inversion(missing, mubs), IncompleteData);
  auto dup = recs;
  dup.push_back(recs[2]);
  ASSERT_THROW(reconstruct(dup, mubs), InvalidSpec);
  auto unnormalized = recs;
  unnormalized[0].probability += 0.1;
  ASSERT_THROW(reconstruct(unnormalized, mubs), InvalidSpec);
}

TEST(reconstruct, noisy_pure_state_reports_and_repairs) {
  const MubSet mubs = build_mubs(5);
  const DensityMatrix target = projector(PureQudit::basis_state(5, 2));
  const auto noisy = simulate_counts(projection_probabilities(target, mubs), 200, 4);
  const Reconstruction raw = reconstruct(noisy, mubs);
  ASSERT_FALSE(raw.report.physical);
  ASSERT_FALSE(raw.report.repaired);
  ASSERT_LT(raw.report.min_eigenvalue, 0.0);
  ASSERT_FALSE(raw.report.negative_eigenvalues.empty());
  ASSERT_NEAR(raw.rho.entries().trace().real(), 1.0, 1e-12);

  const Reconstruction fixed = reconstruct(noisy, mubs, {.repair = true});
  ASSERT_TRUE(fixed.report.repaired);
  ASSERT_TRUE(fixed.rho.is_positive());
  ASSERT_GT(fidelity(target, fixed.rho), 0.9);
}

TEST(nearest_physical, clips_and_renormalizes) {
  Matrix m = Matrix::Zero(3, 3);
  m(0, 0) = 0.7;
  m(1, 1) = 0.5;
  m(2, 2) = -0.2;
  const DensityMatrix out = nearest_physical(m);
  ASSERT_NEAR(out(0, 0).real(), 0.7 / 1.2, 1e-14);
  ASSERT_NEAR(out(1, 1).real(), 0.5 / 1.2, 1e-14);
  ASSERT_NEAR(std::abs(out(2, 2)), 0.0, 1e-14);
}
