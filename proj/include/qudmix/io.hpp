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

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qudmix/ensemble.hpp"
#include "qudmix/optics.hpp"
#include "qudmix/qudit.hpp"
#include "qudmix/tomography.hpp"

namespace qudmix {

using json = nlohmann::json;

/// {"dim": D, "re": [[...]], "im": [[...]]}, row-major. Doubles are written
/// in shortest round-trip form, so reading back is bit-exact.
json to_json(const DensityMatrix& rho);
/// Throws InvalidSpec on schema errors; the usual DensityMatrix checks apply.
DensityMatrix density_matrix_from_json(const json& j);

/// Keys dim, betas, phis, deltas and optional reference (integer or null).
json to_json(const MixtureSpec& spec);
MixtureSpec mixture_spec_from_json(const json& j);

/// Writes via a temporary file in the same directory followed by a rename, so
/// readers never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

/// Header comment line carried by every CSV the tool writes.
std::string provenance_comment(std::uint64_t seed);
std::string tool_version();

/// Shortest round-trip decimal form of a double.
std::string format_double(double x);

std::string sweep_csv(const std::vector<SweepRow>& rows, std::uint64_t seed);
std::string trace_csv(const std::vector<TracePoint>& trace, std::uint64_t seed);

/// `alpha,m,p,counts`; the counts column is left empty when absent.
std::string records_csv(const std::vector<ProjectionRecord>& records, std::uint64_t seed);
/// Accepts a header with or without the counts column and skips '#' lines.
std::vector<ProjectionRecord> parse_records_csv(const std::string& text);

std::string aperture_csv(const ApertureProfile& profile, std::uint64_t seed);
std::string far_field_csv(const FarField& field, std::uint64_t seed);

/// One JSON file per basis, each a DensityMatrix-format object holding the
/// basis vectors as rows of the re/im arrays.
json basis_to_json(const MubSet& mubs, std::size_t basis);

}  // namespace qudmix
