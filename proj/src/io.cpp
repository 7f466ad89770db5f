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
#include "qudmix/io.hpp"

#include <atomic>
#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "qudmix/errors.hpp"

#ifndef QUDMIX_VERSION
#define QUDMIX_VERSION "0.0.0"
#endif

namespace qudmix {

namespace {

std::vector<std::vector<double>> real_rows(const Matrix& m, bool imaginary) {
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    auto& row = rows[static_cast<std::size_t>(i)];
    row.reserve(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(imaginary ? m(i, j).imag() : m(i, j).real());
  }
  return rows;
}

std::vector<double> double_array(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) throw InvalidSpec(std::string("missing array '") + key + "'");
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) throw InvalidSpec(std::string("non-numeric entry in '") + key + "'");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

json to_json(const DensityMatrix& rho) {
  json j;
  j["dim"] = rho.dim();
  j["re"] = real_rows(rho.entries(), false);
  j["im"] = real_rows(rho.entries(), true);
  return j;
}

DensityMatrix density_matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.at("dim").is_number_unsigned()) {
    throw InvalidSpec("density matrix JSON needs an unsigned integer 'dim'");
  }
  const auto d = j.at("dim").get<std::size_t>();
  const auto n = static_cast<Eigen::Index>(d);
  Matrix m(n, n);
  for (const char* part : {"re", "im"}) {
    if (!j.contains(part) || !j.at(part).is_array() || j.at(part).size() != d) {
      throw InvalidSpec(std::string("density matrix JSON needs a ") + std::to_string(d) + "x" + std::to_string(d) +
                        " '" + part + "' array");
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    const json& re = j.at("re").at(i);
    const json& im = j.at("im").at(i);
    if (!re.is_array() || !im.is_array() || re.size() != d || im.size() != d) {
      throw InvalidSpec("density matrix row " + std::to_string(i) + " has the wrong length");
    }
    for (std::size_t k = 0; k < d; ++k) {
      if (!re.at(k).is_number() || !im.at(k).is_number()) throw InvalidSpec("non-numeric density matrix entry");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = Complex(re.at(k).get<double>(), im.at(k).get<double>());
    }
  }
  return DensityMatrix(m);
}

json to_json(const MixtureSpec& spec) {
  json j;
  j["dim"] = spec.dim();
  j["betas"] = spec.betas;
  j["phis"] = spec.phis;
  j["deltas"] = spec.deltas;
  j["reference"] = spec.reference ? json(*spec.reference) : json(nullptr);
  return j;
}

MixtureSpec mixture_spec_from_json(const json& j) {
  if (!j.is_object()) throw InvalidSpec("mixture spec must be a JSON object");
  MixtureSpec spec;
  spec.betas = double_array(j, "betas");
  spec.phis = j.contains("phis") ? double_array(j, "phis") : std::vector<double>(spec.betas.size(), 0.0);
  spec.deltas = double_array(j, "deltas");
  if (j.contains("reference")) {
    const json& r = j.at("reference");
    if (r.is_null()) {
      spec.reference = std::nullopt;
    } else if (r.is_number_unsigned()) {
      spec.reference = r.get<std::size_t>();
    } else {
      throw InvalidSpec("'reference' must be a slit index or null");
    }
  }
  if (j.contains("dim")) {
    if (!j.at("dim").is_number_unsigned() || j.at("dim").get<std::size_t>() != spec.betas.size()) {
      throw InvalidSpec("'dim' does not match the length of 'betas'");
    }
  }
  spec.validate();
  return spec;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  static std::atomic<unsigned> counter{0};
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string tool_version() { return QUDMIX_VERSION; }

std::string provenance_comment(std::uint64_t seed) {
  return "# qudmix " + tool_version() + " seed=" + std::to_string(seed) + "\n";
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string sweep_csv(const std::vector<SweepRow>& rows, std::uint64_t seed) {
  std::string out = provenance_comment(seed) + "delta,analytic_purity,mc_purity,mc_stderr\n";
  for (const auto& r : rows) {
    out += format_double(r.delta) + "," + format_double(r.analytic_purity) + "," + format_double(r.mc_purity) + "," +
           format_double(r.mc_stderr) + "\n";
  }
  return out;
}

std::string trace_csv(const std::vector<TracePoint>& trace, std::uint64_t seed) {
  std::string out = provenance_comment(seed) + "count,purity\n";
  for (const auto& p : trace) out += std::to_string(p.count) + "," + format_double(p.purity) + "\n";
  return out;
}

std::string records_csv(const std::vector<ProjectionRecord>& records, std::uint64_t seed) {
  std::string out = provenance_comment(seed) + "alpha,m,p,counts\n";
  for (const auto& r : records) {
    out += std::to_string(r.alpha) + "," + std::to_string(r.m) + "," + format_double(r.probability) + ",";
    if (r.counts) out += std::to_string(*r.counts);
    out += "\n";
  }
  return out;
}

std::vector<ProjectionRecord> parse_records_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  std::vector<ProjectionRecord> out;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split(line, ',');
    if (!header_seen) {
      const bool ok = fields.size() >= 3 && trim(fields[0]) == "alpha" && trim(fields[1]) == "m" &&
                      trim(fields[2]) == "p" && (fields.size() == 3 || (fields.size() == 4 && trim(fields[3]) == "counts"));
      if (!ok) throw InvalidSpec("record CSV header must be alpha,m,p[,counts]");
      header_seen = true;
      continue;
    }
    if (fields.size() < 3 || fields.size() > 4) {
      throw InvalidSpec("record CSV line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) + " fields");
    }
    try {
      ProjectionRecord r;
      r.alpha = std::stoul(trim(fields[0]));
      r.m = std::stoul(trim(fields[1]));
      r.probability = std::stod(trim(fields[2]));
      if (fields.size() == 4 && !trim(fields[3]).empty()) r.counts = std::stoull(trim(fields[3]));
      out.push_back(r);
    } catch (const std::logic_error&) {
      throw InvalidSpec("record CSV line " + std::to_string(line_no) + " is not numeric");
    }
  }
  if (!header_seen) throw InvalidSpec("record CSV has no header");
  return out;
}

std::string aperture_csv(const ApertureProfile& profile, std::uint64_t seed) {
  std::string out = provenance_comment(seed) + "y,re,im\n";
  for (std::size_t j = 0; j < profile.values.size(); ++j) {
    out += format_double(profile.positions[j]) + "," + format_double(profile.values[j].real()) + "," +
           format_double(profile.values[j].imag()) + "\n";
  }
  return out;
}

std::string far_field_csv(const FarField& field, std::uint64_t seed) {
  std::string out = provenance_comment(seed) + "frequency,intensity\n";
  for (std::size_t k = 0; k < field.amplitude.size(); ++k) {
    out += format_double(field.frequencies[k]) + "," + format_double(field.intensity(k)) + "\n";
  }
  return out;
}

json basis_to_json(const MubSet& mubs, std::size_t basis) {
  const auto d = static_cast<Eigen::Index>(mubs.dim());
  Matrix rows(d, d);
  for (Eigen::Index m = 0; m < d; ++m) rows.row(m) = mubs.vector(basis, static_cast<std::size_t>(m)).amplitudes().transpose();
  json j;
  j["dim"] = mubs.dim();
  j["basis"] = basis + 1;
  j["re"] = real_rows(rows, false);
  j["im"] = real_rows(rows, true);
  return j;
}

}  // namespace qudmix
