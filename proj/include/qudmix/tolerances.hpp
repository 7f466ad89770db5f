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

namespace qudmix {

/// Numerical tolerances shared by the library, its tests and the CLI.
struct Tolerances {
  double normalization = 1e-12;
  double hermiticity = 1e-12;
  double trace = 1e-12;
  /// Smallest eigenvalue still accepted for a state claimed to be physical.
  double positivity = 1e-10;
  /// Eigenvalues in [-clip_threshold, 0) are treated as round-off and clipped
  /// to zero; anything more negative is reported as unphysical.
  double clip_threshold = 1e-8;
  double spectrum_reconstruction = 1e-10;
  double mub_overlap = 1e-12;
};

inline constexpr Tolerances kDefaultTolerances{};

}  // namespace qudmix
