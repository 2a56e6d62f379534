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

/**
 * @file cli_support.hpp
 * @brief Parsing and output formatting shared by the command line tool.
 *
 * CSV output is locale independent (decimal point, '\n' newlines) and
 * byte-for-byte reproducible for a fixed seed.
 */

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mimo/precoders.hpp"
#include "mimo/simulate.hpp"

namespace mimo {

/// "N1,...,NKxNT" -> (user antenna list, transmit antennas).
/// Throws std::invalid_argument naming the layout field on malformed input.
std::pair<std::vector<std::size_t>, std::size_t> parse_layout(
    const std::string& text);

/// "start:step:stop" (inclusive, dB) or a single value.
/// Throws std::invalid_argument for malformed or empty grids.
std::vector<double> parse_ebn0_grid(const std::string& text);

/// Comma list of scheme names, or "all" for the six base schemes. The
/// "-wf" suffix selects water-filling power loading where supported.
std::vector<PrecoderKind> parse_kinds(const std::string& text,
                                      PowerLoading default_loading);

std::string kind_slug(PrecoderKind kind);

/// Shortest round-trip decimal representation, locale independent.
std::string format_double(double v);

std::string ber_csv(const std::vector<SweepRecord>& records);
std::string sumrate_csv(const std::vector<SweepRecord>& records);
std::string flops_csv(const std::vector<FlopsSurvey>& surveys);

/// Record of one tool invocation: configuration echo plus every emitted
/// file, written alongside the CSVs so a run can be reproduced verbatim.
struct RunManifest {
  std::string config_line;
  std::vector<std::string> emitted;  ///< "sweep,kind,path" per file

  void record(const std::string& sweep, PrecoderKind kind,
              const std::string& path);
  std::string to_string() const;
};

}  // namespace mimo
