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

#include "mimo/lattice.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mimo/errors.hpp"

namespace mimo {

namespace {

// Gram-Schmidt state for a row basis: orthogonal rows bstar, squared norms,
// and the projection coefficients mu(i,j) = <b_i, b*_j> / ||b*_j||^2.
struct GramSchmidt {
  std::vector<std::vector<cx>> bstar;
  std::vector<double> norm2s;
  CMatrix mu;
};

// Recompute the full Gram-Schmidt data. The bases here are at most a few
// rows wide, so recomputation after every basis change keeps the logic
// simple without a measurable cost.
GramSchmidt gram_schmidt(const CMatrix& b, double rank_floor) {
  const std::size_t n = b.rows();
  const std::size_t m = b.cols();
  GramSchmidt gs;
  gs.bstar.assign(n, std::vector<cx>(m));
  gs.norm2s.assign(n, 0.0);
  gs.mu = CMatrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<cx>& v = gs.bstar[i];
    for (std::size_t c = 0; c < m; ++c) v[c] = b(i, c);
    for (std::size_t j = 0; j < i; ++j) {
      const cx mu_ij =
          dot_conj(b.row_ptr(i), gs.bstar[j].data(), m) / gs.norm2s[j];
      gs.mu(i, j) = mu_ij;
      flopcost::add(flopcost::kDiv);
      for (std::size_t c = 0; c < m; ++c) v[c] -= mu_ij * gs.bstar[j][c];
      flopcost::add(flopcost::kMulAdd * m);
    }
    gs.norm2s[i] = norm2(v.data(), m);
    if (gs.norm2s[i] < rank_floor) {
      throw RankDeficient("clll_reduce: Gram-Schmidt norm underflow at row " +
                          std::to_string(i));
    }
  }
  return gs;
}

bool needs_size_reduction(cx mu) {
  return std::abs(mu.real()) > 0.5 + 1e-12 || std::abs(mu.imag()) > 0.5 + 1e-12;
}

// rows: b_k -= q * b_j, mirrored on the transform.
void row_axpy(CMatrix& m, std::size_t k, std::size_t j, cx q) {
  for (std::size_t c = 0; c < m.cols(); ++c) m(k, c) -= q * m(j, c);
  flopcost::add(flopcost::kMulAdd * m.cols());
}

void swap_rows(CMatrix& m, std::size_t a, std::size_t b) {
  for (std::size_t c = 0; c < m.cols(); ++c) std::swap(m(a, c), m(b, c));
}

}  // namespace

cx round_gaussian(cx z) {
  return cx(std::round(z.real()), std::round(z.imag()));
}

ReductionResult clll_reduce(const CMatrix& basis, double delta,
                            ReductionStats* stats) {
  if (!(delta > 0.5 && delta <= 1.0)) {
    throw InvalidDelta("clll_reduce: delta must be in (0.5, 1], got " +
                       std::to_string(delta));
  }
  const std::size_t n = basis.rows();
  const std::size_t m = basis.cols();
  if (n > m) {
    throw std::invalid_argument("clll_reduce: more rows than columns");
  }
  const double fro = basis.frobenius_norm();
  const double rank_floor = (1e-12 * fro) * (1e-12 * fro);

  CMatrix b = basis;
  CMatrix t = CMatrix::identity(n);
  ReductionStats local;
  ReductionStats& st = stats ? *stats : local;
  st.steps = 0;

  if (n <= 1) {
    gram_schmidt(b, rank_floor);  // rank check only
    return {std::move(b), std::move(t), delta};
  }

  GramSchmidt gs = gram_schmidt(b, rank_floor);
  const std::size_t budget = 10000 + 600 * n * n;
  std::size_t k = 1;
  while (k < n) {
    if (++st.steps > budget) {
      throw NoConvergence("clll_reduce: step budget exceeded");
    }
    if (needs_size_reduction(gs.mu(k, k - 1))) {
      const cx q = round_gaussian(gs.mu(k, k - 1));
      row_axpy(b, k, k - 1, q);
      row_axpy(t, k, k - 1, q);
      gs = gram_schmidt(b, rank_floor);
    }
    const double left = delta * gs.norm2s[k - 1];
    const cx mu = gs.mu(k, k - 1);
    const double right =
        gs.norm2s[k] + (mu.real() * mu.real() + mu.imag() * mu.imag()) *
                           gs.norm2s[k - 1];
    flopcost::add(8);
    if (left <= right) {
      // Lovasz condition holds: finish size-reducing row k and advance.
      for (std::size_t j = k - 1; j-- > 0;) {
        if (needs_size_reduction(gs.mu(k, j))) {
          const cx q = round_gaussian(gs.mu(k, j));
          row_axpy(b, k, j, q);
          row_axpy(t, k, j, q);
          gs = gram_schmidt(b, rank_floor);
        }
      }
      ++k;
    } else {
      swap_rows(b, k, k - 1);
      swap_rows(t, k, k - 1);
      gs = gram_schmidt(b, rank_floor);
      k = (k > 1) ? k - 1 : 1;
    }
  }
  return {std::move(b), std::move(t), delta};
}

double orthogonality_defect(const CMatrix& basis) {
  const std::size_t n = basis.rows();
  if (n == 0) return 1.0;
  CMatrix g = basis * basis.adjoint();
  // log det(B B^H) through an in-place Cholesky factor of the Gram matrix;
  // a failed pivot means the rows are dependent.
  double log_det = 0.0;
  for (std::size_t kk = 0; kk < n; ++kk) {
    double pivot = g(kk, kk).real();
    for (std::size_t j = 0; j < kk; ++j) pivot -= std::norm(g(kk, j));
    if (!(pivot > 0.0)) {
      throw RankDeficient("orthogonality_defect: singular Gram matrix");
    }
    const double lkk = std::sqrt(pivot);
    log_det += 2.0 * std::log(lkk);
    g(kk, kk) = cx(lkk, 0.0);
    const double inv = 1.0 / lkk;
    for (std::size_t i = kk + 1; i < n; ++i) {
      cx s = g(i, kk);
      for (std::size_t j = 0; j < kk; ++j) s -= g(i, j) * std::conj(g(kk, j));
      g(i, kk) = s * inv;
    }
    flopcost::add((flopcost::kMulAdd + flopcost::kAbs2) * kk * (n - kk) + 6);
  }
  double log_prod = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    log_prod += 0.5 * std::log(norm2(basis.row_ptr(i), basis.cols()));
  }
  flopcost::add(6 * n);
  return std::exp(log_prod - 0.5 * log_det);
}

}  // namespace mimo
