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

// Command line front end: BER sweeps, sum-rate sweeps and operation-count
// tables for the downlink precoding schemes. Exit codes: 0 success,
// 2 configuration error, 3 runtime numerical failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mimo/cli_support.hpp"
#include "mimo/simulate.hpp"

namespace {

namespace fs = std::filesystem;

struct CommonArgs {
  std::string layout = "2,2,2,2x8";
  std::string ebn0 = "0:2:30";
  std::size_t trials = 10000;
  std::size_t packet_len = 100;
  std::string kinds = "all";
  std::uint64_t seed = 1;
  double delta = 0.99;
  std::string power_loading = "uniform";
  std::string out_dir = ".";
};

void add_common_options(CLI::App* cmd, CommonArgs& args) {
  cmd->set_config("--config", "",
                  "Flat key=value configuration file; flags override");
  cmd->add_option("--layout", args.layout,
                  "Antenna layout N1,...,NKxNT (e.g. 2,2,2,2x8)");
  cmd->add_option("--ebn0", args.ebn0, "Eb/N0 grid in dB, start:step:stop");
  cmd->add_option("--trials", args.trials, "Independent channels per point");
  cmd->add_option("--packet-len", args.packet_len, "Symbols per packet");
  cmd->add_option("--kinds", args.kinds,
                  "Comma list of schemes or 'all' (bd, rbd, qrsvd-rbd, sgmi, "
                  "lr-sgmi-zf, lr-sgmi-mmse; '-wf' suffix for water-filling)");
  cmd->add_option("--seed", args.seed, "Simulation seed");
  cmd->add_option("--delta", args.delta, "Lattice reduction quality in (0.5,1]");
  cmd->add_option("--power-loading", args.power_loading,
                  "Default loading for SVD-based schemes: uniform|wf");
  cmd->add_option("--out", args.out_dir, "Output directory for CSV files");
}

struct ParsedConfig {
  mimo::SystemConfig cfg;
  std::vector<mimo::PrecoderKind> kinds;
};

ParsedConfig build_config(const CommonArgs& args, bool needs_grid) {
  ParsedConfig out;
  auto [users, n_tx] = mimo::parse_layout(args.layout);
  out.cfg.user_rx = std::move(users);
  out.cfg.n_tx = n_tx;
  out.cfg.ebn0_grid_db = mimo::parse_ebn0_grid(args.ebn0);
  out.cfg.trials = args.trials;
  out.cfg.packet_len = args.packet_len;
  out.cfg.seed = args.seed;
  out.cfg.clll_delta = args.delta;
  mimo::PowerLoading loading = mimo::PowerLoading::kUniform;
  if (args.power_loading == "wf") {
    loading = mimo::PowerLoading::kWaterfill;
  } else if (args.power_loading != "uniform") {
    throw std::invalid_argument("power-loading: expected uniform|wf, got '" +
                                args.power_loading + "'");
  }
  out.kinds = mimo::parse_kinds(args.kinds, loading);
  out.cfg.precoder = out.kinds.front();
  out.cfg.validate(needs_grid);
  return out;
}

std::string config_echo(const CommonArgs& args) {
  return "layout=" + args.layout + " ebn0=" + args.ebn0 +
         " trials=" + std::to_string(args.trials) +
         " packet_len=" + std::to_string(args.packet_len) +
         " kinds=" + args.kinds + " seed=" + std::to_string(args.seed) +
         " delta=" + mimo::format_double(args.delta) +
         " power_loading=" + args.power_loading;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    throw std::runtime_error("cannot open output file " + path.string());
  }
  f << content;
}

int report_failures(const std::vector<mimo::SweepRecord>& records,
                    const std::string& slug) {
  for (const mimo::SweepRecord& r : records) {
    if (r.failed_trials > 0) {
      std::fprintf(stderr,
                   "runtime error: %llu failed trial(s) for %s at %.6g dB, "
                   "first failing trial index %lld\n",
                   static_cast<unsigned long long>(r.failed_trials),
                   slug.c_str(), r.ebn0_db,
                   static_cast<long long>(r.first_failed_trial));
      return 3;
    }
  }
  return 0;
}

int run_ber_cmd(const CommonArgs& args) {
  ParsedConfig pc = build_config(args, true);
  fs::create_directories(args.out_dir);
  mimo::RunManifest manifest;
  manifest.config_line = "ber " + config_echo(args);
  std::vector<std::pair<std::string, std::vector<mimo::SweepRecord>>> all;
  for (const mimo::PrecoderKind& kind : pc.kinds) {
    mimo::SystemConfig cfg = pc.cfg;
    cfg.precoder = kind;
    const std::vector<mimo::SweepRecord> records = mimo::run_ber_sweep(cfg);
    const std::string slug = mimo::kind_slug(kind);
    const fs::path path = fs::path(args.out_dir) / ("ber_" + slug + ".csv");
    write_file(path, mimo::ber_csv(records));
    manifest.record("ber", kind, path.string());
    if (const int rc = report_failures(records, slug)) return rc;
    all.emplace_back(slug, records);
  }
  write_file(fs::path(args.out_dir) / "manifest.txt", manifest.to_string());
  // Summary table: one row per grid point, one BER column per scheme.
  std::printf("ebn0_db");
  for (const auto& [slug, records] : all) std::printf(",%s", slug.c_str());
  std::printf("\n");
  const std::size_t points = all.front().second.size();
  for (std::size_t p = 0; p < points; ++p) {
    std::printf("%g", all.front().second[p].ebn0_db);
    for (const auto& [slug, records] : all) {
      std::printf(",%.3e", records[p].ber);
    }
    std::printf("\n");
  }
  return 0;
}

int run_sumrate_cmd(const CommonArgs& args) {
  ParsedConfig pc = build_config(args, true);
  fs::create_directories(args.out_dir);
  mimo::RunManifest manifest;
  manifest.config_line = "sumrate " + config_echo(args);
  std::vector<std::pair<std::string, std::vector<mimo::SweepRecord>>> all;
  for (const mimo::PrecoderKind& kind : pc.kinds) {
    mimo::SystemConfig cfg = pc.cfg;
    cfg.precoder = kind;
    const std::vector<mimo::SweepRecord> records = mimo::run_sumrate_sweep(cfg);
    const std::string slug = mimo::kind_slug(kind);
    const fs::path path = fs::path(args.out_dir) / ("sumrate_" + slug + ".csv");
    write_file(path, mimo::sumrate_csv(records));
    manifest.record("sumrate", kind, path.string());
    if (const int rc = report_failures(records, slug)) return rc;
    all.emplace_back(slug, records);
  }
  write_file(fs::path(args.out_dir) / "manifest.txt", manifest.to_string());
  std::printf("ebn0_db");
  for (const auto& [slug, records] : all) std::printf(",%s", slug.c_str());
  std::printf("\n");
  const std::size_t points = all.front().second.size();
  for (std::size_t p = 0; p < points; ++p) {
    std::printf("%g", all.front().second[p].ebn0_db);
    for (const auto& [slug, records] : all) {
      std::printf(",%.4f", records[p].sum_rate_bits_per_hz);
    }
    std::printf("\n");
  }
  return 0;
}

int run_flops_cmd(const CommonArgs& args) {
  ParsedConfig pc = build_config(args, true);
  fs::create_directories(args.out_dir);
  const double ebn0 = pc.cfg.ebn0_grid_db.front();
  const std::vector<mimo::FlopsSurvey> surveys =
      mimo::run_flops_survey(pc.cfg, pc.kinds, ebn0, pc.cfg.trials);
  const fs::path path = fs::path(args.out_dir) / "flops.csv";
  write_file(path, mimo::flops_csv(surveys));
  mimo::RunManifest manifest;
  manifest.config_line = "flops " + config_echo(args);
  for (const mimo::FlopsSurvey& s : surveys) {
    manifest.record("flops", s.kind, path.string());
  }
  write_file(fs::path(args.out_dir) / "manifest.txt", manifest.to_string());

  std::printf("%-16s %14s\n", "kind", "mean_flops");
  for (const mimo::FlopsSurvey& s : surveys) {
    std::printf("%-16s %14.1f\n", mimo::kind_slug(s.kind).c_str(),
                s.mean_flops);
  }
  // Reduction of the cheapest proposed scheme against each baseline that is
  // present in the run.
  const mimo::FlopsSurvey* lr = nullptr;
  for (const mimo::FlopsSurvey& s : surveys) {
    if (s.kind.algo == mimo::PrecoderAlgo::kLrSgmiMmse) lr = &s;
  }
  if (lr != nullptr) {
    for (const mimo::FlopsSurvey& s : surveys) {
      if (s.kind.algo == mimo::PrecoderAlgo::kLrSgmiMmse) continue;
      if (s.mean_flops <= 0.0) continue;
      const double reduction = 100.0 * (1.0 - lr->mean_flops / s.mean_flops);
      std::printf("lr-sgmi-mmse vs %-14s reduction %6.1f%%\n",
                  mimo::kind_slug(s.kind).c_str(), reduction);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MU-MIMO downlink precoding simulator"};
  app.require_subcommand(1);

  CommonArgs ber_args, sum_args, flops_args;
  CLI::App* ber = app.add_subcommand("ber", "Bit error rate sweep");
  add_common_options(ber, ber_args);
  CLI::App* sumrate = app.add_subcommand("sumrate", "Sum-rate sweep");
  add_common_options(sumrate, sum_args);
  CLI::App* flops = app.add_subcommand(
      "flops", "Mean precoder construction cost per channel");
  add_common_options(flops, flops_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (ber->parsed()) return run_ber_cmd(ber_args);
    if (sumrate->parsed()) return run_sumrate_cmd(sum_args);
    if (flops->parsed()) return run_flops_cmd(flops_args);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const mimo::NumericalError& e) {
    std::fprintf(stderr, "runtime error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
