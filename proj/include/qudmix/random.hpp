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

#include <cstdint>
#include <limits>

namespace qudmix {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
std::uint64_t splitmix64_mix(std::uint64_t x);

/// Seed for item `index` of stream `stream` under a root seed. Counter-based,
/// so any subset of samples can be regenerated independently and in any order.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream, std::uint64_t index);

/// xoshiro256** (Blackman & Vigna), seeded through SplitMix64. Satisfies
/// UniformRandomBitGenerator so it can drive <random> distributions.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on [0, 1) with 53 random bits; platform independent.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller, one draw per call.
  double normal();

 private:
  std::uint64_t s_[4];
};

// Stream identifiers keep seeds of unrelated consumers apart.
namespace streams {
inline constexpr std::uint64_t kMixtureSample = 1;
inline constexpr std::uint64_t kSweepPoint = 2;
inline constexpr std::uint64_t kPhotonCounts = 3;
inline constexpr std::uint64_t kRandomState = 4;
inline constexpr std::uint64_t kExperiment = 5;
}  // namespace streams

}  // namespace qudmix
