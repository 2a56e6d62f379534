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

#include "mimo/cli_support.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace mimo {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

std::size_t parse_size(const std::string& text, const char* field) {
  std::size_t value = 0;
  const auto [p, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || p != text.data() + text.size() || value == 0) {
    throw std::invalid_argument(std::string(field) + ": bad count '" + text +
                                "'");
  }
  return value;
}

double parse_real(const std::string& text, const char* field) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string(field) + ": bad number '" + text +
                                "'");
  }
}

struct KindName {
  const char* slug;
  PrecoderAlgo algo;
};

constexpr KindName kKindNames[] = {
    {"bd", PrecoderAlgo::kBd},
    {"rbd", PrecoderAlgo::kRbd},
    {"qrsvd-rbd", PrecoderAlgo::kQrsvdRbd},
    {"sgmi", PrecoderAlgo::kSgmi},
    {"lr-sgmi-zf", PrecoderAlgo::kLrSgmiZf},
    {"lr-sgmi-mmse", PrecoderAlgo::kLrSgmiMmse},
};

}  // namespace

std::pair<std::vector<std::size_t>, std::size_t> parse_layout(
    const std::string& text) {
  std::size_t xpos = text.find_first_of("xX");
  if (xpos == std::string::npos || xpos == 0 || xpos + 1 >= text.size()) {
    throw std::invalid_argument(
        "layout: expected N1,...,NKxNT (e.g. 2,2,2,2x8), got '" + text + "'");
  }
  std::vector<std::size_t> users;
  for (const std::string& part : split(text.substr(0, xpos), ',')) {
    users.push_back(parse_size(part, "layout"));
  }
  const std::size_t n_tx = parse_size(text.substr(xpos + 1), "layout");
  return {std::move(users), n_tx};
}

std::vector<double> parse_ebn0_grid(const std::string& text) {
  const std::vector<std::string> parts = split(text, ':');
  std::vector<double> grid;
  if (parts.size() == 1) {
    grid.push_back(parse_real(parts[0], "ebn0"));
    return grid;
  }
  if (parts.size() != 3) {
    throw std::invalid_argument("ebn0: expected start:step:stop, got '" +
                                text + "'");
  }
  const double start = parse_real(parts[0], "ebn0");
  const double step = parse_real(parts[1], "ebn0");
  const double stop = parse_real(parts[2], "ebn0");
  if (step <= 0.0) {
    throw std::invalid_argument("ebn0: step must be positive");
  }
  for (double v = start; v <= stop + 1e-9 * step; v += step) {
    grid.push_back(v);
  }
  if (grid.empty()) {
    throw std::invalid_argument("ebn0: grid is empty (start exceeds stop)");
  }
  return grid;
}

std::vector<PrecoderKind> parse_kinds(const std::string& text,
                                      PowerLoading default_loading) {
  std::vector<PrecoderKind> kinds;
  if (text == "all") {
    for (const KindName& k : kKindNames) {
      PowerLoading loading = default_loading;
      if (!supports_waterfill(k.algo)) loading = PowerLoading::kUniform;
      kinds.push_back({k.algo, loading});
    }
    return kinds;
  }
  for (std::string part : split(text, ',')) {
    if (part.empty()) {
      throw std::invalid_argument("kinds: empty entry");
    }
    PowerLoading loading = PowerLoading::kUniform;
    if (part.size() > 3 && part.substr(part.size() - 3) == "-wf") {
      loading = PowerLoading::kWaterfill;
      part = part.substr(0, part.size() - 3);
    }
    bool found = false;
    for (const KindName& k : kKindNames) {
      if (part == k.slug) {
        if (loading == PowerLoading::kWaterfill &&
            !supports_waterfill(k.algo)) {
          throw std::invalid_argument(
              "kinds: water-filling is not supported for '" + part + "'");
        }
        kinds.push_back({k.algo, loading});
        found = true;
        break;
      }
    }
    if (!found) {
      throw std::invalid_argument("kinds: unknown scheme '" + part + "'");
    }
  }
  if (kinds.empty()) {
    throw std::invalid_argument("kinds: empty list");
  }
  return kinds;
}

std::string kind_slug(PrecoderKind kind) {
  std::string slug;
  for (const KindName& k : kKindNames) {
    if (k.algo == kind.algo) {
      slug = k.slug;
      break;
    }
  }
  if (kind.loading == PowerLoading::kWaterfill) slug += "-wf";
  return slug;
}

std::string format_double(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, p);
}

std::string ber_csv(const std::vector<SweepRecord>& records) {
  std::string out = "ebn0_db,ber,bit_errors,bits_total,ci_halfwidth,mean_flops\n";
  for (const SweepRecord& r : records) {
    out += format_double(r.ebn0_db);
    out += ',';
    out += format_double(r.ber);
    out += ',';
    out += std::to_string(r.bit_errors);
    out += ',';
    out += std::to_string(r.bits_total);
    out += ',';
    out += format_double(r.ci_halfwidth);
    out += ',';
    out += format_double(r.mean_flops);
    out += '\n';
  }
  return out;
}

std::string sumrate_csv(const std::vector<SweepRecord>& records) {
  std::string out = "ebn0_db,sum_rate_bits_per_hz\n";
  for (const SweepRecord& r : records) {
    out += format_double(r.ebn0_db);
    out += ',';
    out += format_double(r.sum_rate_bits_per_hz);
    out += '\n';
  }
  return out;
}

std::string flops_csv(const std::vector<FlopsSurvey>& surveys) {
  std::string out = "kind,mean_flops\n";
  for (const FlopsSurvey& s : surveys) {
    out += kind_slug(s.kind);
    out += ',';
    out += format_double(s.mean_flops);
    out += '\n';
  }
  return out;
}

void RunManifest::record(const std::string& sweep, PrecoderKind kind,
                         const std::string& path) {
  emitted.push_back(sweep + "," + kind_slug(kind) + "," + path);
}

std::string RunManifest::to_string() const {
  std::string out = "config," + config_line + "\n";
  for (const std::string& line : emitted) {
    out += line;
    out += '\n';
  }
  return out;
}

}  // namespace mimo
