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
// Runs the built qudmix binary end to end.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>

#include "gtest/gtest.h"

#include "qudmix/io.hpp"

using namespace qudmix;
namespace fs = std::filesystem;

namespace {

const fs::path kScratch = fs::temp_directory_path() / "qudmix_cli_test";

int run_cli(const std::string& args) {
  const std::string cmd = std::string(QUDMIX_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string out(const std::string& name) { return (kScratch / name).string(); }

}  // namespace

class cli : public ::testing::Test {
 protected:
  void SetUp() override {
    fs::remove_all(kScratch);
    fs::create_directories(kScratch);
  }
  void TearDown() override { fs::remove_all(kScratch); }
};

TEST_F(cli, exit_codes) {
  ASSERT_EQ(run_cli("optics-check --samples 3 --out " + out("ok")), 0);
  ASSERT_EQ(run_cli("mixed-recon --dim 9 --out " + out("d9")), 3);
  ASSERT_EQ(run_cli("pure-battery --dim 4 --out " + out("d4")), 3);
  ASSERT_EQ(run_cli("purity-sweep --photons banana --out " + out("bad")), 2);
  ASSERT_EQ(run_cli("convergence --dim 1 --out " + out("bad")), 2);
  ASSERT_EQ(run_cli("mixed-recon --preset wiggly --out " + out("bad")), 2);
  ASSERT_EQ(run_cli("convergence --config " + out("missing.json")), 2);
  ASSERT_EQ(run_cli("teleport"), 2);
  ASSERT_EQ(run_cli("audit " + out("nothing-here")), 2);
}

TEST_F(cli, unrepaired_noise_is_an_invariant_violation) {
  ASSERT_EQ(run_cli("mixed-recon --dim 3 --samples 1 --photons 20 --out " + out("raw")), 4);
  ASSERT_EQ(run_cli("mixed-recon --dim 3 --samples 1 --photons 20 --repair --out " + out("fixed")), 0);
  ASSERT_EQ(run_cli("audit " + out("fixed")), 0);
}

TEST_F(cli, flags_override_config) {
  write_file_atomic(kScratch / "c.json",
                    R"({"kind": "mixed-reconstruction", "dim": 7, "seed": 3, "samples": 40, "preset": "linear-up"})");
  ASSERT_EQ(run_cli("mixed-recon --config " + out("c.json") + " --dim 5 --out " + out("r")), 0);
  const json report = json::parse(read_file(kScratch / "r" / "report.json"));
  ASSERT_EQ(report.at("config").at("dim"), 5);
  ASSERT_EQ(report.at("config").at("seed"), 3);
  ASSERT_EQ(report.at("config").at("preset"), "linear-up");
  ASSERT_EQ(report.at("seed"), 3);

  ASSERT_EQ(run_cli("convergence --config " + out("c.json") + " --out " + out("r2")), 2);
  write_file_atomic(kScratch / "bad.json", "{not json");
  ASSERT_EQ(run_cli("convergence --config " + out("bad.json")), 2);
}

TEST_F(cli, same_seed_same_bytes) {
  const std::string args = "pure-battery --dim 5 --samples 30 --photons 500 --seed 8 --out ";
  ASSERT_EQ(run_cli(args + out("a")), 0);
  ASSERT_EQ(run_cli(args + out("b")), 0);
  std::size_t compared = 0;
  for (const auto& e : fs::directory_iterator(kScratch / "a")) {
    const fs::path twin = kScratch / "b" / e.path().filename();
    ASSERT_TRUE(fs::exists(twin)) << twin;
    ASSERT_EQ(read_file(e.path()), read_file(twin)) << e.path().filename();
    ++compared;
  }
  ASSERT_GE(compared, 3u);
  ASSERT_EQ(run_cli("audit " + out("a")), 0);
}
