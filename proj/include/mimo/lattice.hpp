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
 * @file lattice.hpp
 * @brief Complex LLL reduction of row bases over the Gaussian integers.
 *
 * The reducer operates on ROW bases: reduced = transform * input, where the
 * transform is a square unimodular matrix with Gaussian-integer entries.
 * Callers that need a column-reduced basis pass the transpose.
 */

#pragma once

#include <cstddef>

#include "mimo/cxmat.hpp"

namespace mimo {

struct ReductionResult {
  CMatrix reduced;    ///< rows span the same lattice as the input rows
  CMatrix transform;  ///< unimodular, Gaussian-integer entries
  double delta = 0.0; ///< reduction quality parameter actually used
};

struct ReductionStats {
  std::size_t steps = 0;  ///< main loop iterations
};

/// Complex LLL reduction of the rows of `basis` (n x m, n <= m, full row
/// rank) with quality parameter delta in (0.5, 1]. On return the rows are
/// size reduced (Gram-Schmidt coefficients have real and imaginary parts of
/// magnitude <= 1/2) and satisfy the complex Lovasz condition
///   delta ||b*_{k-1}||^2 <= ||b*_k||^2 + |mu_{k,k-1}|^2 ||b*_{k-1}||^2.
///
/// Throws InvalidDelta for delta outside (0.5, 1] and RankDeficient when a
/// Gram-Schmidt norm underflows (rows numerically dependent).
ReductionResult clll_reduce(const CMatrix& basis, double delta,
                            ReductionStats* stats = nullptr);

/// Orthogonality defect of a row basis: product of row norms divided by
/// sqrt(det(B B^H)). Equals 1 exactly when the rows are orthogonal.
/// Throws RankDeficient on a singular Gram matrix.
double orthogonality_defect(const CMatrix& basis);

/// Round real and imaginary parts to the nearest integers, ties away from
/// zero.
cx round_gaussian(cx z);

}  // namespace mimo
