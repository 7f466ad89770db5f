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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qudmix/ensemble.hpp"
#include "qudmix/io.hpp"

namespace qudmix {

enum class ExperimentKind { PureFidelityBattery, PuritySweep, Convergence, MixedReconstruction, OpticsCheck };

std::string_view kind_name(ExperimentKind kind);
/// Accepts both the subcommand names (pure-battery, mixed-recon, ...) and the
/// long kind names (pure-fidelity-battery, mixed-reconstruction, ...).
std::optional<ExperimentKind> parse_kind(std::string_view name);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::PuritySweep;
  std::optional<std::size_t> dim;
  std::optional<MixtureSpec> mixture;
  std::optional<std::size_t> samples;
  std::uint64_t seed = 1;
  /// Photons per measurement basis; nullopt means noiseless probabilities.
  std::optional<std::uint64_t> photons;
  std::filesystem::path output = "qudmix-out";

  /// purity-sweep: number of widths on [0, 2 pi].
  std::size_t points = 50;
  /// purity-sweep series: beta0/beta1 ratios for D = 2, fixed delta_2 for D = 3.
  std::optional<std::vector<double>> series;
  /// convergence: delta_1 of each D = 2 trace.
  std::optional<std::vector<double>> widths;
  /// mixed-recon width pattern: max-mixed, linear-up or linear-down.
  std::string preset = "max-mixed";
  bool repair = false;
  bool export_bases = false;

  std::size_t resolved_dim() const;
  std::size_t resolved_samples() const;
  /// Throws InvalidSpec, or UnsupportedDimension for tomography kinds with a
  /// non-prime dimension.
  void validate() const;
};

/// Keys: kind, dim, mixture (or top-level betas/phis/deltas), samples, seed,
/// photons (integer, or "inf"/null for noiseless), output, points, series,
/// widths, preset, repair, export_bases. Unknown keys are rejected.
ExperimentConfig config_from_json(const json& j);
json to_json(const ExperimentConfig& config);

struct RunReport {
  json config;
  std::vector<std::string> files;
  json metrics = json::object();
  std::string version;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
  /// Everything except wall time, so reruns produce identical report files.
  json to_json() const;
};

RunReport run_pure_fidelity_battery(const ExperimentConfig& config);
RunReport run_purity_sweep(const ExperimentConfig& config);
RunReport run_convergence(const ExperimentConfig& config);
RunReport run_mixed_reconstruction(const ExperimentConfig& config);
RunReport run_optics_check(const ExperimentConfig& config);
/// Dispatches on config.kind and writes report.json into config.output.
RunReport run_experiment(const ExperimentConfig& config);

/// Width patterns for a dim-D mixture with equal amplitudes.
std::vector<double> preset_widths(std::string_view preset, std::size_t dim);

/// Readings of "delta_l = 2 pi (D - l) / D" that differ in slit labeling and
/// in which slit, if any, is the phase reference, with their analytic purity.
struct WidthConvention {
  std::string name;
  MixtureSpec spec;
  double purity;
};
std::vector<WidthConvention> linear_width_conventions(std::size_t dim);

struct AuditResult {
  std::vector<std::string> passed;
  std::vector<std::string> failed;
  json notes = json::object();

  bool ok() const { return failed.empty(); }
  json to_json() const;
};

/// Recomputes every metric of a finished run from the files it emitted and
/// compares against its report.json.
AuditResult audit_run(const std::filesystem::path& run_dir);

}  // namespace qudmix
