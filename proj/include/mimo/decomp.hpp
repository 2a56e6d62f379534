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
 * @file decomp.hpp
 * @brief Complex matrix factorizations: Householder QR, full SVD via
 *        bidiagonalization with implicit-shift iteration, Cholesky-based
 *        Hermitian solves and the regularized channel inverse.
 *
 * All routines charge their work to the active OpCounters (see cxmat.hpp).
 */

#pragma once

#include <cstddef>
#include <vector>

#include "mimo/cxmat.hpp"

namespace mimo {

struct QrResult {
  CMatrix q;  ///< m x n, orthonormal columns
  CMatrix r;  ///< n x n upper triangular, real positive diagonal
};

/// Thin QR factorization of an m x n matrix with m >= n. The diagonal of R
/// is phase-normalized to be real and positive, which makes the
/// factorization unique for full-rank input.
///
/// Throws RankDeficient when |R(k,k)| < 1e-10 * ||A||_F for some k.
QrResult qr_thin(const CMatrix& a);

/// R factor of the thin QR without forming Q. Same rank check and diagonal
/// phase normalization as qr_thin, at roughly half the cost.
CMatrix qr_r_factor(const CMatrix& a);

struct SvdResult {
  CMatrix u;                           ///< m x m unitary
  std::vector<double> singular_values; ///< length min(m,n), descending
  CMatrix v;                           ///< n x n unitary
};

/// Full singular value decomposition A = U diag(S) V^H. Uses Householder
/// bidiagonalization followed by implicit-shift QR iteration on the real
/// bidiagonal form. Throws NoConvergence if the iteration cap is exceeded.
SvdResult svd(const CMatrix& a);

enum class SvdFactor {
  kNone,  ///< do not accumulate this factor (result matrix left empty)
  kThin,  ///< only the first min(m, n) columns
  kFull,
};

/// SVD accumulating only the requested factors. The singular values are
/// always computed; skipping a factor skips its accumulation cost entirely.
SvdResult svd_partial(const CMatrix& a, SvdFactor want_u, SvdFactor want_v);

/// Solve A X = B for Hermitian positive definite A via Cholesky.
/// Throws NotPositiveDefinite when a pivot is <= 0.
CMatrix herm_solve(const CMatrix& a, const CMatrix& b);

/// Regularized left inverse (H^H H + alpha I)^{-1} H^H, computed through a
/// Hermitian positive definite solve; no explicit inverse is materialized.
/// Throws Singular when alpha == 0 and the Gram matrix is numerically
/// singular (pivot < 1e-12 * trace).
CMatrix regularized_inverse(const CMatrix& h, double alpha);

/// Entrywise (s_k^2 + alpha)^{-1/2} for k < s.size(), padded with
/// alpha^{-1/2} up to length n. Throws DivisionByZero when a padded entry
/// (or a zero s_k) would divide by zero at alpha == 0.
std::vector<double> inv_sqrt_diag_reg(const std::vector<double>& s,
                                      double alpha, std::size_t n);

/// Solve R X = B for upper triangular R (diagonal assumed well conditioned
/// by the caller). Throws Singular on a zero diagonal entry.
CMatrix upper_tri_solve(const CMatrix& r, const CMatrix& b);

/// Inverse of an upper triangular matrix, exploiting the triangular
/// structure of the result. Throws Singular on a zero diagonal entry.
CMatrix upper_tri_inverse(const CMatrix& r);

}  // namespace mimo
