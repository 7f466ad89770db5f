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
#include "qudmix/optics.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include <fftw3.h>

#include "qudmix/errors.hpp"

namespace qudmix {

namespace {

constexpr double kStateNormSlack = 1e-9;

struct FftwPlanDeleter {
  void operator()(fftw_plan p) const { fftw_destroy_plan(p); }
};
using FftwPlan = std::unique_ptr<std::remove_pointer_t<fftw_plan>, FftwPlanDeleter>;

double span_of(const SlitGeometry& g, std::size_t slits) {
  return static_cast<double>(slits - 1) * g.period + 2.0 * g.half_width;
}

}  // namespace

void ApertureSpec::validate() const {
  const SlitGeometry& g = geometry;
  auto fail = [](const std::string& what) { throw InvalidGeometry(what); };
  if (transmissions.empty()) fail("aperture needs at least one slit");
  if (!(g.half_width > 0.0) || !std::isfinite(g.half_width)) fail("slit half-width must be positive");
  if (!(g.period > 0.0) || !std::isfinite(g.period)) fail("slit period must be positive");
  if (transmissions.size() > 1 && !(2.0 * g.half_width < g.period)) {
    std::ostringstream msg;
    msg << "slits overlap: 2a = " << 2.0 * g.half_width << " >= d = " << g.period;
    fail(msg.str());
  }
  if (g.grid.samples_per_slit_width < 8) fail("grid needs at least 8 samples per slit width");
  if (!(g.grid.window_factor >= 1.0)) fail("window factor must be >= 1");
  for (const Complex& t : transmissions) {
    if (!std::isfinite(t.real()) || !std::isfinite(t.imag())) fail("slit transmissions must be finite");
  }
}

double ApertureProfile::energy() const {
  double e = 0.0;
  for (const Complex& v : values) e += std::norm(v);
  return e * step;
}

double FarField::energy() const {
  double e = 0.0;
  for (const Complex& v : amplitude) e += std::norm(v);
  return e * frequency_step();
}

ApertureProfile build_aperture(const ApertureSpec& spec) {
  spec.validate();
  const SlitGeometry& g = spec.geometry;
  const std::size_t slits = spec.slit_count();
  const double dy = g.step();
  auto n = static_cast<std::size_t>(std::ceil(g.grid.window_factor * span_of(g, slits) / dy));
  n += n % 2;

  ApertureProfile out;
  out.step = dy;
  out.positions.resize(n);
  out.values.assign(n, Complex(0.0, 0.0));
  const double edge_slack = 1e-9 * dy;
  const double offset = (static_cast<double>(slits) - 1.0) / 2.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double y = (static_cast<double>(j) - static_cast<double>(n / 2) + 0.5) * dy;
    out.positions[j] = y;
    // Nearest slit center; slits cannot overlap.
    const double eta = std::round(y / g.period + offset) - offset;
    const double ell = eta + offset;
    if (ell < 0.0 || ell > static_cast<double>(slits) - 1.0) continue;
    const double dist = std::abs(y - eta * g.period);
    const Complex t = spec.transmissions[static_cast<std::size_t>(ell)];
    if (dist < g.half_width - edge_slack) {
      out.values[j] = t;
    } else if (dist <= g.half_width + edge_slack) {
      out.values[j] = 0.5 * t;
    }
  }
  return out;
}

FarField far_field(const ApertureProfile& profile) {
  const std::size_t n = profile.values.size();
  if (n == 0) throw InvalidGeometry("empty aperture profile");
  std::vector<Complex> in(profile.values);
  std::vector<Complex> spectrum(n);
  {
    FftwPlan plan(fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
                                   reinterpret_cast<fftw_complex*>(spectrum.data()), FFTW_FORWARD, FFTW_ESTIMATE));
    fftw_execute(plan.get());
  }

  FarField out;
  out.frequencies.resize(n);
  out.amplitude.resize(n);
  const double dy = profile.step;
  const double df = 1.0 / (static_cast<double>(n) * dy);
  const auto half = static_cast<std::ptrdiff_t>(n / 2);
  // y_j = (j + j0) dy, so the phase reference at y = 0 contributes exp(-2 pi i k j0 / N).
  const double j0 = -static_cast<double>(half) + 0.5;
  for (std::ptrdiff_t k = -half; k < half; ++k) {
    const auto slot = static_cast<std::size_t>(k + half);
    const auto bin = static_cast<std::size_t>((k + static_cast<std::ptrdiff_t>(n)) % static_cast<std::ptrdiff_t>(n));
    const double phase = -2.0 * std::numbers::pi * static_cast<double>(k) * j0 / static_cast<double>(n);
    out.frequencies[slot] = static_cast<double>(k) * df;
    out.amplitude[slot] = dy * spectrum[bin] * std::polar(1.0, phase);
  }
  out.center_index = static_cast<std::size_t>(half);
  out.center_value = out.amplitude[out.center_index];
  return out;
}

double measure_projection(std::span<const Complex> state, std::span<const Complex> analyzer,
                          const SlitGeometry& geometry) {
  if (state.size() != analyzer.size()) {
    throw DimensionMismatch("state has " + std::to_string(state.size()) + " slits, analyzer " +
                            std::to_string(analyzer.size()));
  }
  auto check_norm = [](std::span<const Complex> v, const char* which) {
    double s = 0.0;
    for (const Complex& c : v) s += std::norm(c);
    if (std::abs(s - 1.0) > kStateNormSlack) {
      throw InvalidSpec(std::string(which) + " transmissions are not normalized");
    }
  };
  check_norm(state, "state");
  check_norm(analyzer, "analyzer");

  // The 4f relay images SLM1 onto SLM2, so cascading the two slit masks
  // multiplies their per-slit transmissions.
  ApertureSpec combined{geometry, {}};
  combined.transmissions.reserve(state.size());
  for (std::size_t l = 0; l < state.size(); ++l) combined.transmissions.push_back(state[l] * analyzer[l]);
  const FarField field = far_field(build_aperture(combined));
  const double width = 2.0 * geometry.half_width;
  return std::norm(field.center_value) / (width * width);
}

}  // namespace qudmix
