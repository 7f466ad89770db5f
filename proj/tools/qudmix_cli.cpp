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
// Experiment runner. One subcommand per experiment kind plus `audit`.
//
// Exit codes: 0 success, 2 invalid config, 3 unsupported dimension,
// 4 numerical-invariant violation (including a failed audit).

#include <chrono>
#include <cstdio>
#include <iostream>
#include <limits>

#include <CLI11.hpp>

#include "qudmix/errors.hpp"
#include "qudmix/experiments.hpp"

namespace {

using namespace qudmix;

constexpr int kExitInvalidConfig = 2;
constexpr int kExitUnsupportedDimension = 3;
constexpr int kExitInvariant = 4;

struct Flags {
  std::optional<std::size_t> dim;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<std::string> out;
  std::optional<std::string> config;
  std::optional<std::string> photons;
  std::optional<std::size_t> points;
  std::optional<std::vector<double>> series;
  std::optional<std::vector<double>> widths;
  std::optional<std::string> preset;
  bool repair = false;
  bool export_bases = false;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--dim", f.dim, "Qudit dimension D");
  cmd->add_option("--seed", f.seed, "Root seed");
  cmd->add_option("--samples", f.samples, "Samples (states, pairs or mixture size)");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--config", f.config, "JSON config file; flags win over its values");
  cmd->add_option("--photons", f.photons, "Photons per measurement basis, or inf");
}

std::optional<std::uint64_t> parse_photons(const std::string& s) {
  if (s == "inf") return std::nullopt;
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty() || s.front() == '-') throw InvalidSpec("--photons expects a positive integer or inf, got '" + s + "'");
  return v;
}

ExperimentConfig resolve(ExperimentKind kind, const Flags& f) {
  ExperimentConfig c;
  if (f.config) {
    if (!std::filesystem::is_regular_file(*f.config)) throw InvalidSpec("config file " + *f.config + " not found");
    json j;
    try {
      j = json::parse(read_file(*f.config));
    } catch (const json::exception& e) {
      throw InvalidSpec(std::string("config is not valid JSON: ") + e.what());
    }
    c = config_from_json(j);
    if (j.contains("kind") && c.kind != kind) throw InvalidSpec("config kind does not match the subcommand");
  }
  c.kind = kind;
  if (f.dim) c.dim = *f.dim;
  if (f.seed) c.seed = *f.seed;
  if (f.samples) c.samples = *f.samples;
  if (f.out) c.output = *f.out;
  if (f.photons) c.photons = parse_photons(*f.photons);
  if (f.points) c.points = *f.points;
  if (f.series) c.series = *f.series;
  if (f.widths) c.widths = *f.widths;
  if (f.preset) c.preset = *f.preset;
  if (f.repair) c.repair = true;
  if (f.export_bases) c.export_bases = true;
  return c;
}

int run(const ExperimentConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  const RunReport report = run_experiment(config);
  std::cout << report.to_json()["metrics"].dump(2) << "\n";
  std::cout << "wrote " << report.files.size() + 1 << " files to " << config.output.string() << "\n";
  for (const auto& v : report.violations) std::cerr << "invariant violation: " << v << "\n";
  std::printf("wall time: %.3f s\n", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return report.ok() ? 0 : kExitInvariant;
}

int audit(const std::string& dir) {
  if (!std::filesystem::is_regular_file(std::filesystem::path(dir) / "report.json")) {
    throw InvalidSpec(dir + " has no report.json");
  }
  const AuditResult result = audit_run(dir);
  const json j = result.to_json();
  write_file_atomic(std::filesystem::path(dir) / "audit.json", j.dump(2) + "\n");
  for (const auto& p : result.passed) std::cout << "ok    " << p << "\n";
  for (const auto& p : result.failed) std::cout << "FAIL  " << p << "\n";
  if (!result.notes.empty()) std::cout << result.notes.dump(2) << "\n";
  return result.ok() ? 0 : kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qudmix: spatial-qudit mixed states, tomography and slit optics"};
  app.set_version_flag("--version", std::string(qudmix::tool_version()));
  app.require_subcommand(1);

  Flags flags;
  std::string audit_dir;
  struct Sub {
    const char* name;
    ExperimentKind kind;
    const char* help;
  };
  const Sub subs[] = {
      {"pure-battery", ExperimentKind::PureFidelityBattery, "Tomography fidelity over random equal-modulus phase states"},
      {"purity-sweep", ExperimentKind::PuritySweep, "Analytic and Monte-Carlo purity against one slit's phase width"},
      {"convergence", ExperimentKind::Convergence, "Running purity as the mixture grows"},
      {"mixed-recon", ExperimentKind::MixedReconstruction, "Monte-Carlo mixture, its tomography and the analytic matrix"},
      {"optics-check", ExperimentKind::OpticsCheck, "Far-field overlap measurement against the inner product"},
  };
  std::vector<std::pair<CLI::App*, ExperimentKind>> commands;
  for (const auto& s : subs) {
    CLI::App* cmd = app.add_subcommand(s.name, s.help);
    add_common(cmd, flags);
    commands.emplace_back(cmd, s.kind);
  }
  commands[1].first->add_option("--points", flags.points, "Widths on [0, 2pi]");
  commands[1].first->add_option("--series", flags.series, "beta0/beta1 ratios (D=2) or fixed delta_2 values (D=3)");
  commands[2].first->add_option("--widths", flags.widths, "delta_1 of each D=2 trace");
  commands[3].first->add_option("--preset", flags.preset, "max-mixed, linear-up or linear-down");
  for (int i : {0, 3}) {
    commands[i].first->add_flag("--repair", flags.repair, "Clip unphysical reconstructions onto valid states");
  }
  commands[3].first->add_flag("--export-bases", flags.export_bases, "Write every measurement basis as JSON");
  CLI::App* audit_cmd = app.add_subcommand("audit", "Recompute a finished run's metrics from its files");
  audit_cmd->add_option("dir", audit_dir, "Run output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalidConfig;
  }

  try {
    if (audit_cmd->parsed()) return audit(audit_dir);
    for (const auto& [cmd, kind] : commands) {
      if (cmd->parsed()) return run(resolve(kind, flags));
    }
  } catch (const UnsupportedDimension& e) {
    std::cerr << "unsupported dimension: " << e.what() << "\n";
    return kExitUnsupportedDimension;
  } catch (const NumericalInvariantViolation& e) {
    std::cerr << "numerical invariant violated: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const ConvergenceFailure& e) {
    std::cerr << "eigensolver did not converge: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const qudmix::Error& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return kExitInvalidConfig;
  } catch (const json::exception& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return kExitInvalidConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitInvalidConfig;
}
