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
 * @file simulate.hpp
 * @brief Monte-Carlo link level harness: channel generation, QPSK packets,
 *        per-scheme receivers, BER and sum-rate sweeps.
 *
 * Determinism contract: every trial draws from its own generator seeded by
 * (seed, sweep point, trial index), and per-trial results are reduced in
 * index order. Sweeps therefore produce identical records for any worker
 * count. The worker count is capped by the MIMO_PRECODE_THREADS environment
 * variable (0 or unset selects the hardware concurrency).
 */

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "mimo/cxmat.hpp"
#include "mimo/precoders.hpp"

namespace mimo {

struct SystemConfig {
  std::size_t n_tx = 8;
  std::vector<std::size_t> user_rx = {2, 2, 2, 2};
  int bits_per_symbol = 2;  ///< QPSK
  double es = 0.0;          ///< total transmit power; 0 selects rx_total()
  std::vector<double> ebn0_grid_db;
  std::size_t trials = 10000;
  std::size_t packet_len = 100;
  std::uint64_t seed = 1;
  PrecoderKind precoder;
  double clll_delta = 0.99;

  std::size_t rx_total() const {
    std::size_t n = 0;
    for (std::size_t u : user_rx) n += u;
    return n;
  }
  double total_power() const {
    return es > 0.0 ? es : static_cast<double>(rx_total());
  }

  /// Throws std::invalid_argument naming the offending field.
  void validate(bool needs_grid = true) const;
};

struct SweepRecord {
  double ebn0_db = 0.0;
  double ber = 0.0;
  std::uint64_t bit_errors = 0;
  std::uint64_t bits_total = 0;
  double ci_halfwidth = 0.0;  ///< 3-sigma binomial (Wald) half width
  double mean_flops = 0.0;    ///< mean precoder construction cost per channel
  double sum_rate_bits_per_hz = 0.0;
  std::uint64_t failed_trials = 0;
  std::int64_t first_failed_trial = -1;
};

/// Deterministic per-trial generator derived from (seed, stream, trial).
std::mt19937_64 trial_engine(std::uint64_t seed, std::uint64_t stream,
                             std::uint64_t trial);

/// i.i.d. circularly-symmetric unit-variance complex Gaussian channel
/// blocks for every user, constant over one packet.
ChannelSet gen_channel(std::mt19937_64& rng, const SystemConfig& cfg);

/// Noise variance from the bit-energy ratio definition
/// sigma2 = rx_total * es / (n_tx * bits_per_symbol * 10^(ebn0/10)).
double noise_sigma2(double ebn0_db, const SystemConfig& cfg);

/// Regularization used by the sweeps: rx_total * sigma2 / es, floored at
/// 1e-12 for the noiseless case where the regularized schemes would
/// otherwise be undefined.
double effective_alpha(const SystemConfig& cfg, double sigma2);

/// Gray-mapped unit-energy QPSK: bits (b0, b1) -> ((1-2 b0) + j (1-2 b1)) / sqrt(2).
cx qpsk_mod(int b0, int b1);
void qpsk_demod(cx symbol, int& b0, int& b1);

/// Transmit one packet through a fading realization and count bit errors.
/// sigma2 == 0 runs the noiseless channel.
std::uint64_t run_packet(const ChannelSet& ch, const PrecodingResult& pr,
                         const SystemConfig& cfg, double sigma2,
                         std::mt19937_64& rng);

/// Achievable rate log2 det(I + sigma2^{-1} H P P^H H^H) in bits/Hz for an
/// already power-normalized precoder P.
double sum_rate(const CMatrix& h, const CMatrix& p, double sigma2);

std::vector<SweepRecord> run_ber_sweep(const SystemConfig& cfg);
std::vector<SweepRecord> run_sumrate_sweep(const SystemConfig& cfg);

struct FlopsSurvey {
  PrecoderKind kind;
  double mean_flops = 0.0;
};

/// Mean precoder construction cost over `channels` random realizations for
/// each kind, at the operating point ebn0_db.
std::vector<FlopsSurvey> run_flops_survey(const SystemConfig& cfg,
                                          const std::vector<PrecoderKind>& kinds,
                                          double ebn0_db,
                                          std::size_t channels);

/// Worker count used by the sweeps (MIMO_PRECODE_THREADS caps, 0 = auto).
unsigned worker_count();

}  // namespace mimo
