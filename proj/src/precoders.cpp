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

#include "mimo/precoders.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "mimo/decomp.hpp"
#include "mimo/errors.hpp"

namespace mimo {

namespace {

constexpr double kRankTol = 1e-10;  // singular values below tol*s_max are zero

std::size_t numerical_rank(const std::vector<double>& s) {
  if (s.empty()) return 0;
  const double floor = kRankTol * s.front();
  std::size_t r = 0;
  while (r < s.size() && s[r] > floor) ++r;
  return r;
}

CMatrix scale_columns(const CMatrix& m, const std::vector<double>& w) {
  CMatrix out(m.rows(), m.cols());
  for (std::size_t c = 0; c < m.cols(); ++c) {
    for (std::size_t r = 0; r < m.rows(); ++r) out(r, c) = m(r, c) * w[c];
  }
  flopcost::add(2 * m.rows() * m.cols());
  return out;
}

CMatrix assemble_combined(const std::vector<CMatrix>& first,
                          const std::vector<CMatrix>& second,
                          std::size_t n_tx) {
  std::size_t total = 0;
  for (const CMatrix& s : second) total += s.cols();
  CMatrix p(n_tx, total);
  std::size_t col = 0;
  for (std::size_t i = 0; i < first.size(); ++i) {
    const CMatrix pi = first[i] * second[i];
    p.set_block(0, col, pi);
    col += pi.cols();
  }
  return p;
}

double expected_gamma(const CMatrix& p, double es) {
  const double f = p.frobenius_norm();
  flopcost::add(2);
  return f * f / es;
}

// Power loading amplitudes for the SVD-based schemes: uniform keeps every
// stream at unit amplitude; water-filling allocates the power budget across
// all users' subchannel gains jointly.
std::vector<std::vector<double>> loading_amplitudes(
    const std::vector<std::vector<double>>& gains, PowerLoading loading,
    double es, double sigma2) {
  std::vector<std::vector<double>> amp(gains.size());
  if (loading == PowerLoading::kUniform) {
    for (std::size_t i = 0; i < gains.size(); ++i) {
      amp[i].assign(gains[i].size(), 1.0);
    }
    return amp;
  }
  std::vector<double> flat;
  for (const auto& g : gains) flat.insert(flat.end(), g.begin(), g.end());
  const std::vector<double> powers = waterfill(flat, es, sigma2);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < gains.size(); ++i) {
    amp[i].resize(gains[i].size());
    for (std::size_t k = 0; k < gains[i].size(); ++k) {
      amp[i][k] = std::sqrt(powers[idx++]);
    }
  }
  return amp;
}

// Shared second stage of the SVD-based schemes: diagonalize each user's
// effective channel, keep the dominant right singular vectors as the
// transmit filter and the left factor as the receiver's decode matrix.
void svd_second_stage(const ChannelSet& ch,
                      const std::vector<CMatrix>& first_filters,
                      PowerLoading loading, double sigma2, double es,
                      PrecodingResult& out) {
  const std::size_t k_users = ch.user_count();
  std::vector<CMatrix> v_blocks(k_users);
  std::vector<std::vector<double>> gains(k_users);
  out.decode_matrices.resize(k_users);
  for (std::size_t i = 0; i < k_users; ++i) {
    const CMatrix h_eff = ch.user(i) * first_filters[i];
    const SvdResult sv = svd_partial(h_eff, SvdFactor::kFull, SvdFactor::kThin);
    const std::size_t n_i = ch.user(i).rows();
    out.decode_matrices[i] = sv.u.adjoint();
    v_blocks[i] = sv.v.block(0, 0, h_eff.cols(), n_i);
    gains[i].assign(n_i, 0.0);
    for (std::size_t s = 0; s < n_i && s < sv.singular_values.size(); ++s) {
      gains[i][s] = sv.singular_values[s];
    }
  }
  const auto amps = loading_amplitudes(gains, loading, es, sigma2);
  out.second_filters.resize(k_users);
  out.stream_gains.resize(k_users);
  for (std::size_t i = 0; i < k_users; ++i) {
    out.second_filters[i] = scale_columns(v_blocks[i], amps[i]);
    out.stream_gains[i].resize(gains[i].size());
    for (std::size_t s = 0; s < gains[i].size(); ++s) {
      out.stream_gains[i][s] = gains[i][s] * amps[i][s];
    }
  }
  out.first_filters = first_filters;
  out.combined_precoder = assemble_combined(first_filters, out.second_filters,
                                            ch.tx_count());
  out.gamma = expected_gamma(out.combined_precoder, es);
}

// Shared scaffold of the inversion-based schemes. second(i, h_eff) returns
// the per-user filter and, for the lattice-reduced variants, the transform.
template <typename SecondStage>
PrecodingResult inversion_family(const ChannelSet& ch, double alpha, double es,
                                 SecondStage&& second, bool stores_transform) {
  PrecodingResult out;
  OpCounter ops;
  {
    CountScope scope(ops);
    out.first_filters = sgmi_first_filters(ch, alpha);
    const std::size_t k_users = ch.user_count();
    out.second_filters.resize(k_users);
    if (stores_transform) out.transforms.resize(k_users);
    for (std::size_t i = 0; i < k_users; ++i) {
      const CMatrix h_eff = ch.user(i) * out.first_filters[i];
      LrSecondStage st = second(h_eff);
      out.second_filters[i] = std::move(st.filter);
      if (stores_transform) out.transforms[i] = std::move(st.transform);
    }
    out.combined_precoder =
        assemble_combined(out.first_filters, out.second_filters, ch.tx_count());
    out.gamma = expected_gamma(out.combined_precoder, es);
  }
  out.flops = ops.flops();
  return out;
}

}  // namespace

bool supports_waterfill(PrecoderAlgo algo) {
  return algo == PrecoderAlgo::kBd || algo == PrecoderAlgo::kRbd ||
         algo == PrecoderAlgo::kQrsvdRbd;
}

ChannelSet ChannelSet::from_blocks(std::vector<CMatrix> blocks) {
  if (blocks.empty()) {
    throw std::invalid_argument("ChannelSet: no users");
  }
  const std::size_t n_tx = blocks.front().cols();
  std::size_t n_rx = 0;
  for (const CMatrix& b : blocks) {
    if (b.cols() != n_tx) {
      throw std::invalid_argument("ChannelSet: inconsistent antenna counts");
    }
    if (b.rows() == 0) {
      throw std::invalid_argument("ChannelSet: user with zero antennas");
    }
    n_rx += b.rows();
  }
  // Every interference matrix must have fewer rows than transmit antennas,
  // otherwise no user can be given an interference-free subspace.
  for (const CMatrix& b : blocks) {
    if (n_rx - b.rows() >= n_tx) {
      throw DimensionalityViolation(
          "ChannelSet: interference matrix of a user has " +
          std::to_string(n_rx - b.rows()) + " rows but only " +
          std::to_string(n_tx) + " transmit antennas are available");
    }
  }
  ChannelSet ch;
  ch.combined_ = CMatrix(n_rx, n_tx);
  std::size_t row = 0;
  ch.offsets_.reserve(blocks.size());
  for (CMatrix& b : blocks) {
    ch.offsets_.push_back(row);
    ch.combined_.set_block(row, 0, b);
    row += b.rows();
  }
  ch.per_user_ = std::move(blocks);
  return ch;
}

CMatrix ChannelSet::interference(std::size_t i) const {
  const std::size_t n_tx = tx_count();
  CMatrix out(rx_total() - per_user_[i].rows(), n_tx);
  std::size_t row = 0;
  for (std::size_t j = 0; j < per_user_.size(); ++j) {
    if (j == i) continue;
    out.set_block(row, 0, per_user_[j]);
    row += per_user_[j].rows();
  }
  return out;
}

double regularization_alpha(std::size_t rx_total, double sigma2, double es) {
  if (es <= 0.0) {
    throw std::invalid_argument("regularization_alpha: es must be positive");
  }
  return static_cast<double>(rx_total) * sigma2 / es;
}

std::vector<double> waterfill(const std::vector<double>& singular_values,
                              double total_power, double noise) {
  std::vector<double> inv_gain(singular_values.size(), 0.0);
  bool any_positive = false;
  double min_cost = 0.0;
  for (std::size_t k = 0; k < singular_values.size(); ++k) {
    const double s = singular_values[k];
    if (s > 0.0) {
      inv_gain[k] = noise / (s * s);
      min_cost = any_positive ? std::min(min_cost, inv_gain[k]) : inv_gain[k];
      any_positive = true;
    } else {
      inv_gain[k] = -1.0;  // marker: stream excluded
    }
  }
  if (!any_positive) {
    throw AllZeroChannels("waterfill: no positive subchannel gain");
  }
  std::vector<double> powers(singular_values.size(), 0.0);
  if (total_power <= 0.0) return powers;

  const auto allocated = [&](double mu) {
    double sum = 0.0;
    for (double c : inv_gain) {
      if (c >= 0.0 && mu > c) sum += mu - c;
    }
    return sum;
  };
  double lo = min_cost;
  double hi = min_cost + total_power;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (allocated(mid) < total_power) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-10 * (1.0 + std::abs(hi))) break;
  }
  const double mu = 0.5 * (lo + hi);
  double sum = 0.0;
  for (std::size_t k = 0; k < powers.size(); ++k) {
    if (inv_gain[k] >= 0.0 && mu > inv_gain[k]) {
      powers[k] = mu - inv_gain[k];
      sum += powers[k];
    }
  }
  // Exact budget: rescale away the bisection residue.
  if (sum > 0.0) {
    const double fix = total_power / sum;
    for (double& p : powers) p *= fix;
  }
  flopcost::add(10 * powers.size());
  return powers;
}

double compute_gamma(const CMatrix& p, const std::vector<cx>& d, double es) {
  if (es <= 0.0) {
    throw std::invalid_argument("compute_gamma: es must be positive");
  }
  const std::vector<cx> s = matvec(p, d);
  return norm2(s.data(), s.size()) / es;
}

PrecodingResult bd_precode(const ChannelSet& ch, PowerLoading loading,
                           double sigma2, double es) {
  PrecodingResult out;
  out.kind = {PrecoderAlgo::kBd, loading};
  OpCounter ops;
  {
    CountScope scope(ops);
    const std::size_t n_tx = ch.tx_count();
    std::vector<CMatrix> first(ch.user_count());
    for (std::size_t i = 0; i < ch.user_count(); ++i) {
      const CMatrix hbar = ch.interference(i);
      if (hbar.rows() == 0) {
        first[i] = CMatrix::identity(n_tx);
        continue;
      }
      const SvdResult sv = svd_partial(hbar, SvdFactor::kNone, SvdFactor::kFull);
      const std::size_t rank = numerical_rank(sv.singular_values);
      if (rank >= n_tx) {
        throw DimensionalityViolation(
            "bd_precode: interference spans all transmit dimensions");
      }
      first[i] = sv.v.block(0, rank, n_tx, n_tx - rank);
    }
    svd_second_stage(ch, first, loading, sigma2, es, out);
  }
  out.flops = ops.flops();
  return out;
}

PrecodingResult rbd_precode(const ChannelSet& ch, double alpha,
                            PowerLoading loading, double sigma2, double es) {
  PrecodingResult out;
  out.kind = {PrecoderAlgo::kRbd, loading};
  OpCounter ops;
  {
    CountScope scope(ops);
    const std::size_t n_tx = ch.tx_count();
    std::vector<CMatrix> first(ch.user_count());
    for (std::size_t i = 0; i < ch.user_count(); ++i) {
      const CMatrix hbar = ch.interference(i);
      CMatrix vbar = CMatrix::identity(n_tx);
      std::vector<double> sbar;
      if (hbar.rows() > 0) {
        SvdResult sv = svd_partial(hbar, SvdFactor::kNone, SvdFactor::kFull);
        vbar = std::move(sv.v);
        sbar = std::move(sv.singular_values);
      }
      const std::vector<double> w = inv_sqrt_diag_reg(sbar, alpha, n_tx);
      first[i] = scale_columns(vbar, w);
    }
    svd_second_stage(ch, first, loading, sigma2, es, out);
  }
  out.flops = ops.flops();
  return out;
}

PrecodingResult qrsvd_rbd_precode(const ChannelSet& ch, double alpha,
                                  PowerLoading loading, double sigma2,
                                  double es) {
  PrecodingResult out;
  out.kind = {PrecoderAlgo::kQrsvdRbd, loading};
  OpCounter ops;
  {
    CountScope scope(ops);
    const std::size_t n_tx = ch.tx_count();
    const double sqrt_alpha = std::sqrt(alpha);
    std::vector<CMatrix> first(ch.user_count());
    for (std::size_t i = 0; i < ch.user_count(); ++i) {
      const CMatrix hbar = ch.interference(i);
      const CMatrix stacked =
          vstack(hbar, cx(sqrt_alpha, 0.0) * CMatrix::identity(n_tx));
      try {
        const CMatrix r = qr_r_factor(stacked);
        first[i] = upper_tri_inverse(r);
      } catch (const RankDeficient&) {
        if (alpha == 0.0) {
          throw DivisionByZero(
              "qrsvd_rbd_precode: alpha is zero and the interference matrix "
              "does not span the transmit space");
        }
        throw;
      }
    }
    svd_second_stage(ch, first, loading, sigma2, es, out);
  }
  out.flops = ops.flops();
  return out;
}

std::vector<CMatrix> sgmi_first_filters(const ChannelSet& ch, double alpha) {
  const CMatrix hinv = regularized_inverse(ch.combined(), alpha);
  std::vector<CMatrix> filters(ch.user_count());
  for (std::size_t i = 0; i < ch.user_count(); ++i) {
    const std::size_t n_i = ch.user(i).rows();
    const CMatrix block =
        hinv.block(0, ch.user_row_offset(i), ch.tx_count(), n_i);
    filters[i] = qr_thin(block).q;
  }
  return filters;
}

CMatrix mmse_linear_filter(const CMatrix& h_eff, double alpha) {
  CMatrix gram = h_eff * h_eff.adjoint();
  for (std::size_t i = 0; i < gram.rows(); ++i) gram(i, i) += alpha;
  flopcost::add(flopcost::kReal * gram.rows());
  return herm_solve(gram, h_eff).adjoint();
}

LrSecondStage lr_zf_second_stage(const CMatrix& h_eff, double clll_delta) {
  ReductionResult red = clll_reduce(h_eff, clll_delta);
  const CMatrix gram = red.reduced * red.reduced.adjoint();
  CMatrix filter;
  try {
    filter = herm_solve(gram, red.reduced).adjoint();
  } catch (const NotPositiveDefinite&) {
    throw RankDeficient("lr_zf_second_stage: effective channel rank deficient");
  }
  return {std::move(filter), std::move(red.transform)};
}

LrSecondStage lr_mmse_second_stage(const CMatrix& h_eff, double alpha,
                                   double clll_delta) {
  const std::size_t rows = h_eff.rows();
  const CMatrix extended = hstack(
      h_eff, cx(std::sqrt(alpha), 0.0) * CMatrix::identity(rows));
  ReductionResult red = clll_reduce(extended, clll_delta);
  const CMatrix gram = red.reduced * red.reduced.adjoint();
  const CMatrix full = herm_solve(gram, red.reduced).adjoint();
  // Keep the rows acting on the unextended system.
  return {full.block(0, 0, h_eff.cols(), rows), std::move(red.transform)};
}

PrecodingResult sgmi_precode(const ChannelSet& ch, double alpha, double es) {
  PrecodingResult out = inversion_family(
      ch, alpha, es,
      [alpha](const CMatrix& h_eff) {
        return LrSecondStage{mmse_linear_filter(h_eff, alpha), CMatrix()};
      },
      /*stores_transform=*/false);
  out.kind = {PrecoderAlgo::kSgmi, PowerLoading::kUniform};
  return out;
}

PrecodingResult lr_sgmi_zf_precode(const ChannelSet& ch, double alpha,
                                   double clll_delta, double es) {
  PrecodingResult out = inversion_family(
      ch, alpha, es,
      [clll_delta](const CMatrix& h_eff) {
        return lr_zf_second_stage(h_eff, clll_delta);
      },
      /*stores_transform=*/true);
  out.kind = {PrecoderAlgo::kLrSgmiZf, PowerLoading::kUniform};
  return out;
}

PrecodingResult lr_sgmi_mmse_precode(const ChannelSet& ch, double alpha,
                                     double clll_delta, double es) {
  PrecodingResult out = inversion_family(
      ch, alpha, es,
      [alpha, clll_delta](const CMatrix& h_eff) {
        return lr_mmse_second_stage(h_eff, alpha, clll_delta);
      },
      /*stores_transform=*/true);
  out.kind = {PrecoderAlgo::kLrSgmiMmse, PowerLoading::kUniform};
  return out;
}

PrecodingResult precode(const ChannelSet& ch, PrecoderKind kind, double alpha,
                        double sigma2, double es, double clll_delta) {
  if (kind.loading == PowerLoading::kWaterfill &&
      !supports_waterfill(kind.algo)) {
    throw std::invalid_argument(
        "precode: water-filling requires an SVD-based scheme");
  }
  switch (kind.algo) {
    case PrecoderAlgo::kBd:
      return bd_precode(ch, kind.loading, sigma2, es);
    case PrecoderAlgo::kRbd:
      return rbd_precode(ch, alpha, kind.loading, sigma2, es);
    case PrecoderAlgo::kQrsvdRbd:
      return qrsvd_rbd_precode(ch, alpha, kind.loading, sigma2, es);
    case PrecoderAlgo::kSgmi:
      return sgmi_precode(ch, alpha, es);
    case PrecoderAlgo::kLrSgmiZf:
      return lr_sgmi_zf_precode(ch, alpha, clll_delta, es);
    case PrecoderAlgo::kLrSgmiMmse:
      return lr_sgmi_mmse_precode(ch, alpha, clll_delta, es);
  }
  throw std::logic_error("precode: unknown kind");
}

}  // namespace mimo
