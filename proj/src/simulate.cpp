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

#include "mimo/simulate.hpp"

#include <atomic>
#include <cassert>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>

#include "mimo/errors.hpp"

namespace mimo {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2 = 0.7071067811865476;

// Regularization floor for runs at exactly zero noise, where the
// regularized schemes are otherwise undefined.
constexpr double kNoiselessAlphaFloor = 1e-12;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

template <typename Fn>
void parallel_trials(std::size_t trials, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(worker_count(), trials == 0 ? 1 : trials);
  if (workers <= 1) {
    for (std::size_t t = 0; t < trials; ++t) fn(t);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (std::size_t t = next.fetch_add(1); t < trials;
           t = next.fetch_add(1)) {
        fn(t);
      }
    });
  }
  for (std::thread& th : pool) th.join();
}

struct BerSlot {
  std::uint64_t errors = 0;
  std::uint64_t flops = 0;
  bool ok = false;
};

int receiver_bit(double component) { return component < 0.0 ? 1 : 0; }

}  // namespace

unsigned worker_count() {
  unsigned n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("MIMO_PRECODE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) n = std::min<long>(v, 256);
  }
  return n;
}

void SystemConfig::validate(bool needs_grid) const {
  if (n_tx == 0) {
    throw std::invalid_argument("layout: at least one transmit antenna");
  }
  if (user_rx.empty()) {
    throw std::invalid_argument("layout: at least one user");
  }
  for (std::size_t u : user_rx) {
    if (u == 0) {
      throw std::invalid_argument("layout: user with zero receive antennas");
    }
  }
  if (rx_total() > n_tx) {
    throw std::invalid_argument(
        "layout: dimensionality constraint violated; the " +
        std::to_string(rx_total()) + " receive antennas exceed the " +
        std::to_string(n_tx) +
        " transmit antennas, so some interference matrix would span the "
        "whole transmit space");
  }
  if (bits_per_symbol != 2) {
    throw std::invalid_argument("modulation: only QPSK (2 bits) is supported");
  }
  if (trials < 1) {
    throw std::invalid_argument("trials: must be >= 1");
  }
  if (packet_len < 1) {
    throw std::invalid_argument("packet-len: must be >= 1");
  }
  if (es < 0.0) {
    throw std::invalid_argument("es: must be non-negative");
  }
  if (!(clll_delta > 0.5 && clll_delta <= 1.0)) {
    throw std::invalid_argument("delta: must be in (0.5, 1]");
  }
  if (precoder.loading == PowerLoading::kWaterfill &&
      !supports_waterfill(precoder.algo)) {
    throw std::invalid_argument(
        "power-loading: water-filling requires an SVD-based scheme "
        "(bd, rbd, qrsvd-rbd)");
  }
  if (needs_grid && ebn0_grid_db.empty()) {
    throw std::invalid_argument("ebn0: grid is empty");
  }
}

std::mt19937_64 trial_engine(std::uint64_t seed, std::uint64_t stream,
                             std::uint64_t trial) {
  const std::uint64_t a = splitmix64(seed ^ 0xC2B2AE3D27D4EB4FULL);
  const std::uint64_t b = splitmix64(a ^ splitmix64(stream));
  return std::mt19937_64(splitmix64(b ^ splitmix64(trial)));
}

ChannelSet gen_channel(std::mt19937_64& rng, const SystemConfig& cfg) {
  std::normal_distribution<double> nd(0.0, kInvSqrt2);
  std::vector<CMatrix> blocks;
  blocks.reserve(cfg.user_rx.size());
  for (std::size_t n_i : cfg.user_rx) {
    CMatrix b(n_i, cfg.n_tx);
    for (std::size_t r = 0; r < n_i; ++r) {
      for (std::size_t c = 0; c < cfg.n_tx; ++c) {
        const double re = nd(rng);
        const double im = nd(rng);
        b(r, c) = cx(re, im);
      }
    }
    blocks.push_back(std::move(b));
  }
  return ChannelSet::from_blocks(std::move(blocks));
}

double noise_sigma2(double ebn0_db, const SystemConfig& cfg) {
  const double es = cfg.total_power();
  const double ratio = std::pow(10.0, ebn0_db / 10.0);
  return static_cast<double>(cfg.rx_total()) * es /
         (static_cast<double>(cfg.n_tx) * cfg.bits_per_symbol * ratio);
}

double effective_alpha(const SystemConfig& cfg, double sigma2) {
  if (sigma2 <= 0.0) return kNoiselessAlphaFloor;
  return regularization_alpha(cfg.rx_total(), sigma2, cfg.total_power());
}

cx qpsk_mod(int b0, int b1) {
  return cx((1 - 2 * b0) * kInvSqrt2, (1 - 2 * b1) * kInvSqrt2);
}

void qpsk_demod(cx symbol, int& b0, int& b1) {
  b0 = receiver_bit(symbol.real());
  b1 = receiver_bit(symbol.imag());
}

std::uint64_t run_packet(const ChannelSet& ch, const PrecodingResult& pr,
                         const SystemConfig& cfg, double sigma2,
                         std::mt19937_64& rng) {
  const std::size_t streams = ch.rx_total();
  const double es = cfg.total_power();
  std::normal_distribution<double> noise(0.0,
                                         sigma2 > 0.0 ? std::sqrt(sigma2 / 2.0)
                                                      : 1.0);
  const bool svd_receiver = !pr.decode_matrices.empty();
  const bool lattice_receiver = !pr.transforms.empty();

  std::vector<int> bits(2 * streams);
  std::vector<cx> d(streams), z(streams);
  std::uint64_t errors = 0;
  for (std::size_t t = 0; t < cfg.packet_len; ++t) {
    for (std::size_t s = 0; s < streams; ++s) {
      bits[2 * s] = static_cast<int>(rng() & 1u);
      bits[2 * s + 1] = static_cast<int>(rng() & 1u);
      d[s] = qpsk_mod(bits[2 * s], bits[2 * s + 1]);
    }
    const std::vector<cx> s_vec = matvec(pr.combined_precoder, d);
    const double gamma = norm2(s_vec.data(), s_vec.size()) / es;
    const double scale = 1.0 / std::sqrt(gamma);
    std::vector<cx> x(s_vec.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = s_vec[i] * scale;
    std::vector<cx> y = matvec(ch.combined(), x);
    if (sigma2 > 0.0) {
      for (cx& yi : y) yi += cx(noise(rng), noise(rng));
    }
    const double sqrt_gamma = std::sqrt(gamma);
    for (std::size_t i = 0; i < streams; ++i) z[i] = y[i] * sqrt_gamma;

    for (std::size_t u = 0; u < ch.user_count(); ++u) {
      const std::size_t off = ch.user_row_offset(u);
      const std::size_t n_u = ch.user(u).rows();
      std::vector<cx> block(z.begin() + off, z.begin() + off + n_u);
      std::vector<cx> est;
      if (svd_receiver) {
        est = matvec(pr.decode_matrices[u], block);
        for (std::size_t k = 0; k < n_u; ++k) {
          const double g = pr.stream_gains[u][k];
          est[k] = (g > 1e-12) ? est[k] / g : cx(0.0, 0.0);
        }
      } else if (lattice_receiver) {
        // Quantize on the Gaussian-integer image of the constellation and
        // map back through the stored unimodular transform.
        std::vector<cx> w(n_u);
        for (std::size_t k = 0; k < n_u; ++k) {
          w[k] = round_gaussian(kSqrt2 * block[k]);
        }
        est = matvec(pr.transforms[u], w);
        for (cx& e : est) e *= kInvSqrt2;
      } else {
        est = std::move(block);
      }
      for (std::size_t k = 0; k < n_u; ++k) {
        int b0 = 0, b1 = 0;
        qpsk_demod(est[k], b0, b1);
        const std::size_t s = off + k;
        errors += static_cast<std::uint64_t>(b0 != bits[2 * s]);
        errors += static_cast<std::uint64_t>(b1 != bits[2 * s + 1]);
      }
    }
  }
  return errors;
}

double sum_rate(const CMatrix& h, const CMatrix& p, double sigma2) {
  if (!(sigma2 > 0.0)) {
    throw std::invalid_argument("sum_rate: sigma2 must be positive");
  }
  const CMatrix m = h * p;
  const std::size_t n = m.rows();
  CMatrix g = m * m.adjoint();
  const double inv_s2 = 1.0 / sigma2;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) g(r, c) *= inv_s2;
    g(r, r) += 1.0;
  }
  // log det of I + PSD via in-place Cholesky; positive by construction.
  double log2_det = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double pivot = g(k, k).real();
    for (std::size_t j = 0; j < k; ++j) pivot -= std::norm(g(k, j));
    assert(pivot > 0.0);
    const double lkk = std::sqrt(pivot);
    log2_det += 2.0 * std::log2(lkk);
    g(k, k) = cx(lkk, 0.0);
    const double inv = 1.0 / lkk;
    for (std::size_t i = k + 1; i < n; ++i) {
      cx s = g(i, k);
      for (std::size_t j = 0; j < k; ++j) s -= g(i, j) * std::conj(g(k, j));
      g(i, k) = s * inv;
    }
  }
  return log2_det;
}

std::vector<SweepRecord> run_ber_sweep(const SystemConfig& cfg) {
  cfg.validate(true);
  const double es = cfg.total_power();
  const std::size_t bits_per_trial =
      cfg.packet_len * cfg.rx_total() * cfg.bits_per_symbol;
  std::vector<SweepRecord> records;
  records.reserve(cfg.ebn0_grid_db.size());
  for (std::size_t point = 0; point < cfg.ebn0_grid_db.size(); ++point) {
    const double ebn0 = cfg.ebn0_grid_db[point];
    const double sigma2 = noise_sigma2(ebn0, cfg);
    const double alpha = effective_alpha(cfg, sigma2);
    std::vector<BerSlot> slots(cfg.trials);
    parallel_trials(cfg.trials, [&](std::size_t t) {
      std::mt19937_64 rng = trial_engine(cfg.seed, point, t);
      try {
        const ChannelSet ch = gen_channel(rng, cfg);
        const PrecodingResult pr =
            precode(ch, cfg.precoder, alpha, sigma2, es, cfg.clll_delta);
        slots[t].flops = pr.flops;
        slots[t].errors = run_packet(ch, pr, cfg, sigma2, rng);
        slots[t].ok = true;
      } catch (const NumericalError&) {
        slots[t].ok = false;
      }
    });
    SweepRecord rec;
    rec.ebn0_db = ebn0;
    std::uint64_t flops_sum = 0;
    std::uint64_t good = 0;
    for (std::size_t t = 0; t < slots.size(); ++t) {
      if (!slots[t].ok) {
        ++rec.failed_trials;
        if (rec.first_failed_trial < 0) {
          rec.first_failed_trial = static_cast<std::int64_t>(t);
        }
        continue;
      }
      ++good;
      rec.bit_errors += slots[t].errors;
      flops_sum += slots[t].flops;
    }
    rec.bits_total = good * bits_per_trial;
    if (rec.bits_total > 0) {
      rec.ber = static_cast<double>(rec.bit_errors) /
                static_cast<double>(rec.bits_total);
      rec.ci_halfwidth = 3.0 * std::sqrt(rec.ber * (1.0 - rec.ber) /
                                         static_cast<double>(rec.bits_total));
    }
    if (good > 0) {
      rec.mean_flops =
          static_cast<double>(flops_sum) / static_cast<double>(good);
    }
    records.push_back(rec);
  }
  return records;
}

std::vector<SweepRecord> run_sumrate_sweep(const SystemConfig& cfg) {
  cfg.validate(true);
  const double es = cfg.total_power();
  struct RateSlot {
    double rate = 0.0;
    std::uint64_t flops = 0;
    bool ok = false;
  };
  std::vector<SweepRecord> records;
  records.reserve(cfg.ebn0_grid_db.size());
  for (std::size_t point = 0; point < cfg.ebn0_grid_db.size(); ++point) {
    const double ebn0 = cfg.ebn0_grid_db[point];
    const double sigma2 = noise_sigma2(ebn0, cfg);
    const double alpha = effective_alpha(cfg, sigma2);
    std::vector<RateSlot> slots(cfg.trials);
    parallel_trials(cfg.trials, [&](std::size_t t) {
      std::mt19937_64 rng = trial_engine(cfg.seed, point, t);
      try {
        const ChannelSet ch = gen_channel(rng, cfg);
        const PrecodingResult pr =
            precode(ch, cfg.precoder, alpha, sigma2, es, cfg.clll_delta);
        const double scale = 1.0 / std::sqrt(pr.gamma);
        const CMatrix normalized = cx(scale, 0.0) * pr.combined_precoder;
        slots[t].rate = sum_rate(ch.combined(), normalized, sigma2);
        slots[t].flops = pr.flops;
        slots[t].ok = true;
      } catch (const NumericalError&) {
        slots[t].ok = false;
      }
    });
    SweepRecord rec;
    rec.ebn0_db = ebn0;
    double rate_sum = 0.0;
    std::uint64_t flops_sum = 0;
    std::uint64_t good = 0;
    for (std::size_t t = 0; t < slots.size(); ++t) {
      if (!slots[t].ok) {
        ++rec.failed_trials;
        if (rec.first_failed_trial < 0) {
          rec.first_failed_trial = static_cast<std::int64_t>(t);
        }
        continue;
      }
      ++good;
      rate_sum += slots[t].rate;
      flops_sum += slots[t].flops;
    }
    if (good > 0) {
      rec.sum_rate_bits_per_hz = rate_sum / static_cast<double>(good);
      rec.mean_flops =
          static_cast<double>(flops_sum) / static_cast<double>(good);
    }
    records.push_back(rec);
  }
  return records;
}

std::vector<FlopsSurvey> run_flops_survey(
    const SystemConfig& cfg, const std::vector<PrecoderKind>& kinds,
    double ebn0_db, std::size_t channels) {
  SystemConfig base = cfg;
  base.validate(false);
  const double es = base.total_power();
  const double sigma2 = noise_sigma2(ebn0_db, base);
  const double alpha = effective_alpha(base, sigma2);
  constexpr std::uint64_t kStream = 0xF10B5ULL;
  std::vector<FlopsSurvey> out;
  out.reserve(kinds.size());
  for (const PrecoderKind& kind : kinds) {
    std::vector<std::uint64_t> flops(channels, 0);
    std::vector<char> ok(channels, 0);
    parallel_trials(channels, [&](std::size_t t) {
      std::mt19937_64 rng = trial_engine(base.seed, kStream, t);
      try {
        const ChannelSet ch = gen_channel(rng, base);
        const PrecodingResult pr =
            precode(ch, kind, alpha, sigma2, es, base.clll_delta);
        flops[t] = pr.flops;
        ok[t] = 1;
      } catch (const NumericalError&) {
        ok[t] = 0;
      }
    });
    FlopsSurvey survey;
    survey.kind = kind;
    std::uint64_t sum = 0;
    std::uint64_t good = 0;
    for (std::size_t t = 0; t < channels; ++t) {
      if (ok[t]) {
        sum += flops[t];
        ++good;
      }
    }
    if (good > 0) {
      survey.mean_flops = static_cast<double>(sum) / static_cast<double>(good);
    }
    out.push_back(survey);
  }
  return out;
}

}  // namespace mimo
