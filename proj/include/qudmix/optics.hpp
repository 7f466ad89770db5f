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
#include <span>
#include <vector>

#include "qudmix/qudit.hpp"

namespace qudmix {

/// Transverse sampling of the slit plane.
struct GridSpec {
  std::size_t samples_per_slit_width = 64;
  /// Total window as a multiple of the aperture span (D - 1) d + 2a.
  double window_factor = 8.0;
};

/// Slit array geometry, in arbitrary but consistent length units. Slits are
/// long along x, so only the y profile is modeled.
struct SlitGeometry {
  double half_width = 1.0;  // a
  double period = 4.0;      // d
  double length = 400.0;    // L, advisory
  GridSpec grid;

  double step() const { return 2.0 * half_width / static_cast<double>(grid.samples_per_slit_width); }
};

struct ApertureSpec {
  SlitGeometry geometry;
  /// beta_l exp(i phi_l) for each slit; its size is the slit count D.
  std::vector<Complex> transmissions;

  std::size_t slit_count() const { return transmissions.size(); }
  /// Throws InvalidGeometry.
  void validate() const;
};

/// Sampled y-profile. Samples sit at pixel centers (j - N/2 + 1/2) * step;
/// a sample falling exactly on a slit edge carries half the transmission.
struct ApertureProfile {
  double step = 0.0;
  std::vector<double> positions;
  std::vector<Complex> values;

  /// integral |A(y)|^2 dy on the grid.
  double energy() const;
};

struct FarField {
  /// Spatial frequencies k / (N step), k = -N/2 .. N/2 - 1.
  std::vector<double> frequencies;
  /// Continuous-normalized transform integral A(y) exp(-2 pi i f y) dy.
  std::vector<Complex> amplitude;
  Complex center_value;
  std::size_t center_index = 0;

  double frequency_step() const { return frequencies.size() > 1 ? frequencies[1] - frequencies[0] : 0.0; }
  double energy() const;
  double intensity(std::size_t k) const { return std::norm(amplitude[k]); }
};

/// Slit l centered at (l - (D - 1)/2) d so the array is symmetric about y = 0.
ApertureProfile build_aperture(const ApertureSpec& spec);

FarField far_field(const ApertureProfile& profile);

/// Center-of-Fourier-plane intensity after SLM2 imprints `analyzer` on the
/// slit field produced by `state`, divided by (2a)^2 so it reads
/// |sum_l s_l t_l|^2. Both lists must be unit-norm; the geometry's slit count
/// is taken from their length. Throws DimensionMismatch, InvalidGeometry.
double measure_projection(std::span<const Complex> state, std::span<const Complex> analyzer,
                          const SlitGeometry& geometry);

}  // namespace qudmix
