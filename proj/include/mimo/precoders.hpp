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
 * @file precoders.hpp
 * @brief Multi-user downlink precoding algorithms.
 *
 * Six schemes share a two-stage structure P_i = Pa_i * Pb_i:
 *
 *  - BD: first stage projects each user onto the null space of the other
 *    users' stacked channels (via SVD); second stage diagonalizes the
 *    effective channel with another SVD. Receivers apply U_i^H.
 *  - RBD: regularized first stage balancing leakage against noise;
 *    SVD second stage as in BD.
 *  - QRSVD_RBD: same combined precoder as RBD, with the first-stage SVD
 *    replaced by a QR factorization of the noise-augmented interference
 *    matrix (cheaper; identical Gram, hence identical behavior).
 *  - SGMI: first stage from one regularized inversion of the combined
 *    channel plus a thin QR per user; second stage is a per-user MMSE
 *    linear filter. Receivers quantize directly, no decode matrix.
 *  - LR_SGMI_ZF / LR_SGMI_MMSE: as SGMI, but the per-user second stage is
 *    computed on a lattice-reduced basis of the (optionally noise-extended)
 *    effective channel, storing the unimodular transform for the receiver.
 *
 * All schemes report the operation count spent constructing the precoder.
 */

#pragma once

#include <cstdint>
#include <vector>

#include "mimo/cxmat.hpp"
#include "mimo/lattice.hpp"

namespace mimo {

enum class PrecoderAlgo {
  kBd,
  kRbd,
  kQrsvdRbd,
  kSgmi,
  kLrSgmiZf,
  kLrSgmiMmse,
};

enum class PowerLoading {
  kUniform,
  kWaterfill,
};

struct PrecoderKind {
  PrecoderAlgo algo = PrecoderAlgo::kRbd;
  PowerLoading loading = PowerLoading::kUniform;
};

/// Water-filling applies to the SVD-based schemes only.
bool supports_waterfill(PrecoderAlgo algo);

/// Per-user channel blocks plus their row-stacked combination.
class ChannelSet {
 public:
  /// Builds the set and checks the dimensionality requirement that every
  /// interference matrix (all users but one, stacked) has fewer rows than
  /// there are transmit antennas; violations throw DimensionalityViolation.
  static ChannelSet from_blocks(std::vector<CMatrix> blocks);

  std::size_t user_count() const { return per_user_.size(); }
  std::size_t tx_count() const { return combined_.cols(); }
  std::size_t rx_total() const { return combined_.rows(); }
  const CMatrix& user(std::size_t i) const { return per_user_[i]; }
  const std::vector<CMatrix>& users() const { return per_user_; }
  const CMatrix& combined() const { return combined_; }
  std::size_t user_row_offset(std::size_t i) const { return offsets_[i]; }

  /// Row-stacked channels of every user except i.
  CMatrix interference(std::size_t i) const;

 private:
  std::vector<CMatrix> per_user_;
  std::vector<std::size_t> offsets_;
  CMatrix combined_;
};

struct PrecodingResult {
  PrecoderKind kind;
  CMatrix combined_precoder;             ///< tx_count x rx_total
  std::vector<CMatrix> first_filters;    ///< Pa_i per user
  std::vector<CMatrix> second_filters;   ///< Pb_i per user
  std::vector<CMatrix> transforms;       ///< unimodular T_i; LR schemes only
  std::vector<CMatrix> decode_matrices;  ///< U_i^H; SVD-based schemes only
  std::vector<std::vector<double>> stream_gains;  ///< per-stream receiver gain
  double gamma = 0.0;       ///< expected-power scale ||P||_F^2 / E_s
  std::uint64_t flops = 0;  ///< operation count of the construction
};

/// MMSE regularization parameter: rx_total * sigma2 / es.
double regularization_alpha(std::size_t rx_total, double sigma2, double es);

/// Water-filling power allocation over parallel subchannels with gains
/// `singular_values`: p_k = max(0, mu - noise / s_k^2) with the water level
/// chosen by bisection so the powers sum to total_power (to 1e-10 relative).
/// Throws AllZeroChannels when no positive gain exists.
std::vector<double> waterfill(const std::vector<double>& singular_values,
                              double total_power, double noise);

/// Transmit normalization ||P d||^2 / es for one data vector.
double compute_gamma(const CMatrix& p, const std::vector<cx>& d, double es);

PrecodingResult bd_precode(const ChannelSet& ch,
                           PowerLoading loading = PowerLoading::kUniform,
                           double sigma2 = 0.0, double es = 1.0);
PrecodingResult rbd_precode(const ChannelSet& ch, double alpha,
                            PowerLoading loading = PowerLoading::kUniform,
                            double sigma2 = 0.0, double es = 1.0);
PrecodingResult qrsvd_rbd_precode(const ChannelSet& ch, double alpha,
                                  PowerLoading loading = PowerLoading::kUniform,
                                  double sigma2 = 0.0, double es = 1.0);

/// First-stage filters Q_i of the simplified regularized-inversion scheme:
/// one regularized inverse of the combined channel, then a thin QR per user
/// column block. Each filter has orthonormal columns.
std::vector<CMatrix> sgmi_first_filters(const ChannelSet& ch, double alpha);

PrecodingResult sgmi_precode(const ChannelSet& ch, double alpha,
                             double es = 1.0);
PrecodingResult lr_sgmi_zf_precode(const ChannelSet& ch, double alpha,
                                   double clll_delta = 0.99, double es = 1.0);
PrecodingResult lr_sgmi_mmse_precode(const ChannelSet& ch, double alpha,
                                     double clll_delta = 0.99,
                                     double es = 1.0);

/// Dispatch by kind.
PrecodingResult precode(const ChannelSet& ch, PrecoderKind kind, double alpha,
                        double sigma2, double es, double clll_delta = 0.99);

// Second-stage building blocks, exposed for direct testing.

/// Per-user MMSE filter H^H (H H^H + alpha I)^{-1} for an effective channel.
CMatrix mmse_linear_filter(const CMatrix& h_eff, double alpha);

struct LrSecondStage {
  CMatrix filter;     // maps user streams into the first-stage output space
  CMatrix transform;  // unimodular row transform of the reduced basis
};

/// Lattice-reduced zero-forcing filter: reduce the rows of h_eff, then
/// invert the reduced basis from the right.
LrSecondStage lr_zf_second_stage(const CMatrix& h_eff, double clll_delta);

/// Lattice-reduced MMSE filter: extend h_eff with sqrt(alpha) * I, reduce,
/// right-invert and keep the rows acting on the unextended system.
LrSecondStage lr_mmse_second_stage(const CMatrix& h_eff, double alpha,
                                   double clll_delta);

}  // namespace mimo
