/*
 * Copyright 2026 The mimo-precode Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Spawns the command line binary and checks its file outputs, exit codes
// and reproducibility guarantees.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

#ifndef MIMO_CLI_PATH
#error "MIMO_CLI_PATH must point at the command line binary"
#endif

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::string& args, const fs::path& scratch) {
  const fs::path out_file = scratch / "stdout.txt";
  const fs::path err_file = scratch / "stderr.txt";
  const std::string cmd = std::string(MIMO_CLI_PATH) + " " + args + " > " +
                          out_file.string() + " 2> " + err_file.string();
  const int raw = std::system(cmd.c_str());
  RunResult r;
  if (WIFEXITED(raw)) r.exit_code = WEXITSTATUS(raw);
  auto slurp = [](const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
  };
  r.out = slurp(out_file);
  r.err = slurp(err_file);
  return r;
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mimo_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("ber command emits one csv per scheme plus a manifest") {
  const fs::path scratch = fresh_dir("ber");
  const fs::path out = scratch / "run1";
  const std::string args =
      "ber --layout 2,2,2,2x8 --ebn0 0:10:10 --trials 12 --packet-len 10 "
      "--kinds all --seed 42 --out " + out.string();
  const RunResult r = run_cli(args, scratch);
  CHECK(r.exit_code == 0);
  const char* slugs[] = {"bd",   "rbd",        "qrsvd-rbd",
                         "sgmi", "lr-sgmi-zf", "lr-sgmi-mmse"};
  for (const char* slug : slugs) {
    const fs::path csv = out / (std::string("ber_") + slug + ".csv");
    REQUIRE(fs::exists(csv));
    const std::string body = read_file(csv);
    CHECK(body.rfind("ebn0_db,ber,bit_errors,bits_total,ci_halfwidth,"
                     "mean_flops\n",
                     0) == 0);
    CHECK(std::count(body.begin(), body.end(), '\n') == 3);  // header + 2 rows
  }
  REQUIRE(fs::exists(out / "manifest.txt"));
  const std::string manifest = read_file(out / "manifest.txt");
  for (const char* slug : slugs) {
    CHECK(manifest.find(std::string("ber,") + slug + ",") !=
          std::string::npos);
  }
  CHECK(r.out.find("ebn0_db") != std::string::npos);

  // Re-running with the same seed reproduces every byte.
  const fs::path out2 = scratch / "run2";
  std::string args2 =
      "ber --layout 2,2,2,2x8 --ebn0 0:10:10 --trials 12 --packet-len 10 "
      "--kinds all --seed 42 --out " + out2.string();
  const RunResult r2 = run_cli(args2, scratch);
  CHECK(r2.exit_code == 0);
  for (const char* slug : slugs) {
    CHECK(read_file(out / (std::string("ber_") + slug + ".csv")) ==
          read_file(out2 / (std::string("ber_") + slug + ".csv")));
  }
}

TEST_CASE("invalid layout exits with the configuration code") {
  const fs::path scratch = fresh_dir("badlayout");
  const RunResult r = run_cli(
      "ber --layout 3,3x4 --ebn0 0:5:10 --trials 2 --out " +
          (scratch / "o").string(),
      scratch);
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("layout") != std::string::npos);
  CHECK(r.err.find("dimensionality") != std::string::npos);
}

TEST_CASE("empty grid and bad kinds exit with the configuration code") {
  const fs::path scratch = fresh_dir("badgrid");
  const RunResult r1 = run_cli(
      "ber --ebn0 10:2:0 --trials 2 --out " + (scratch / "a").string(),
      scratch);
  CHECK(r1.exit_code == 2);
  CHECK(r1.err.find("ebn0") != std::string::npos);
  const RunResult r2 = run_cli(
      "sumrate --kinds lr-sgmi-zf-wf --trials 2 --out " +
          (scratch / "b").string(),
      scratch);
  CHECK(r2.exit_code == 2);
  CHECK(r2.err.find("kinds") != std::string::npos);
}

TEST_CASE("sumrate command emits the requested kinds") {
  const fs::path scratch = fresh_dir("sumrate");
  const fs::path out = scratch / "o";
  const RunResult r = run_cli(
      "sumrate --kinds bd,bd-wf,rbd,lr-sgmi-mmse --ebn0 0:5:10 --trials 6 "
      "--seed 9 --out " + out.string(),
      scratch);
  CHECK(r.exit_code == 0);
  for (const char* slug : {"bd", "bd-wf", "rbd", "lr-sgmi-mmse"}) {
    const fs::path csv = out / (std::string("sumrate_") + slug + ".csv");
    REQUIRE(fs::exists(csv));
    CHECK(read_file(csv).rfind("ebn0_db,sum_rate_bits_per_hz\n", 0) == 0);
  }
}

TEST_CASE("flops command prints the table and reduction lines") {
  const fs::path scratch = fresh_dir("flops");
  const fs::path out = scratch / "o";
  const RunResult r = run_cli(
      "flops --trials 25 --kinds all --ebn0 10 --seed 4 --out " + out.string(),
      scratch);
  CHECK(r.exit_code == 0);
  REQUIRE(fs::exists(out / "flops.csv"));
  const std::string csv = read_file(out / "flops.csv");
  CHECK(csv.rfind("kind,mean_flops\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
  CHECK(r.out.find("lr-sgmi-mmse vs rbd") != std::string::npos);
  CHECK(r.out.find("reduction") != std::string::npos);
}

TEST_CASE("flops command accepts a degenerate single-user layout") {
  const fs::path scratch = fresh_dir("flops1u");
  const RunResult r = run_cli(
      "flops --layout 8x8 --trials 5 --kinds all --out " +
          (scratch / "o").string(),
      scratch);
  CHECK(r.exit_code == 0);
}

TEST_CASE("config file values are applied and flags override them") {
  const fs::path scratch = fresh_dir("cfgfile");
  const fs::path cfg = scratch / "run.cfg";
  {
    std::ofstream f(cfg);
    f << "layout=2,2x4\n"
      << "ebn0=0:5:5\n"
      << "trials=3\n"
      << "packet-len=4\n"
      << "kinds=sgmi\n"
      << "seed=5\n";
  }
  const fs::path out1 = scratch / "a";
  const RunResult r1 = run_cli(
      "ber --config " + cfg.string() + " --out " + out1.string(), scratch);
  CHECK(r1.exit_code == 0);
  const std::string body1 = read_file(out1 / "ber_sgmi.csv");
  // trials=3, packet 4 symbols, 4 streams, 2 bits: 96 bits per point.
  CHECK(body1.find(",96,") != std::string::npos);

  const fs::path out2 = scratch / "b";
  const RunResult r2 = run_cli("ber --config " + cfg.string() +
                                   " --trials 5 --out " + out2.string(),
                               scratch);
  CHECK(r2.exit_code == 0);
  const std::string body2 = read_file(out2 / "ber_sgmi.csv");
  CHECK(body2.find(",160,") != std::string::npos);
}
