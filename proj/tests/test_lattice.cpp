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

#include <cmath>
#include <random>

#include <doctest.h>

#include "mimo/errors.hpp"
#include "mimo/lattice.hpp"
#include "support/test_helpers.hpp"

using mimo::CMatrix;
using mimo::cx;
using namespace testsup;

namespace {

CMatrix random_gaussian_integer_basis(std::mt19937_64& rng, std::size_t n,
                                      int span) {
  std::uniform_int_distribution<int> d(-span, span);
  while (true) {
    CMatrix b(n, n);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) {
        b(r, c) = cx(d(rng), d(rng));
      }
    }
    if (std::abs(det_lu(b)) > 0.5) return b;
  }
}

double min_row_norm(const CMatrix& b) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < b.rows(); ++r) {
    best = std::min(best, std::sqrt(mimo::norm2(b.row_ptr(r), b.cols())));
  }
  return best;
}

// Exhaustive lattice minimum of a 2-row basis over Gaussian-integer
// coefficients with components in [-span, span].
double brute_force_minimum(const CMatrix& b, int span) {
  double best = std::numeric_limits<double>::infinity();
  for (int ar = -span; ar <= span; ++ar) {
    for (int ai = -span; ai <= span; ++ai) {
      for (int br = -span; br <= span; ++br) {
        for (int bi = -span; bi <= span; ++bi) {
          if (ar == 0 && ai == 0 && br == 0 && bi == 0) continue;
          const cx x1(ar, ai), x2(br, bi);
          double norm = 0.0;
          for (std::size_t c = 0; c < b.cols(); ++c) {
            norm += std::norm(x1 * b(0, c) + x2 * b(1, c));
          }
          best = std::min(best, std::sqrt(norm));
        }
      }
    }
  }
  return best;
}

bool entries_are_units_or_zero_diagonal_identity(const CMatrix& t) {
  // Identity up to unit-modulus Gaussian-integer column scaling.
  for (std::size_t r = 0; r < t.rows(); ++r) {
    for (std::size_t c = 0; c < t.cols(); ++c) {
      const double mag = std::abs(t(r, c));
      if (r == c) {
        if (std::abs(mag - 1.0) > 1e-12) return false;
      } else if (mag > 1e-12) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

TEST_CASE("clll: orthonormal input is already reduced") {
  const auto res = mimo::clll_reduce(CMatrix::identity(2), 0.75);
  CHECK(max_abs_diff(res.reduced, CMatrix::identity(2)) == 0.0);
  CHECK(max_abs_diff(res.transform, CMatrix::identity(2)) == 0.0);
}

TEST_CASE("clll: single size-reduction step") {
  const CMatrix b({{cx(1, 0), cx(0, 0)}, {cx(0.75, 0), cx(1, 0)}});
  const auto res = mimo::clll_reduce(b, 0.99);
  const CMatrix expected_reduced(
      {{cx(1, 0), cx(0, 0)}, {cx(-0.25, 0), cx(1, 0)}});
  const CMatrix expected_transform(
      {{cx(1, 0), cx(0, 0)}, {cx(-1, 0), cx(1, 0)}});
  CHECK(max_abs_diff(res.reduced, expected_reduced) < 1e-14);
  CHECK(max_abs_diff(res.transform, expected_transform) < 1e-14);
}

TEST_CASE("clll: transform reproduces the reduced basis and is unimodular") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + trial % 3;
    const std::size_t m = n + trial % 4;
    const CMatrix b = random_matrix(rng, n, m);
    const auto res = mimo::clll_reduce(b, 0.99);
    REQUIRE(fro_diff(res.transform * b, res.reduced) <
            1e-9 * (1.0 + b.frobenius_norm()));
    REQUIRE(is_gaussian_integer_matrix(res.transform));
    REQUIRE(std::abs(std::abs(det_lu(res.transform)) - 1.0) < 1e-6);
  }
}

TEST_CASE("clll: shortest reduced row reaches the lattice minimum (2x2)") {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 200; ++trial) {
    const CMatrix b = random_gaussian_integer_basis(rng, 2, 4);
    const auto res = mimo::clll_reduce(b, 1.0);
    const double reduced_min = min_row_norm(res.reduced);
    const double exhaustive = brute_force_minimum(b, 5);
    REQUIRE(reduced_min <= exhaustive * (1.0 + 1e-9));
    REQUIRE(reduced_min >= exhaustive * (1.0 - 1e-9));
  }
}

TEST_CASE("clll: size reduction and Lovasz condition hold on output") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + trial % 4;
    const double delta = 0.75 + 0.24 * ((trial % 5) / 4.0);
    const CMatrix b = random_matrix(rng, n, n + 1);
    const auto res = mimo::clll_reduce(b, delta);
    // Recompute Gram-Schmidt data of the output.
    std::vector<std::vector<cx>> bstar(n, std::vector<cx>(n + 1));
    std::vector<double> bn(n, 0.0);
    CMatrix mu(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < n + 1; ++c) bstar[i][c] = res.reduced(i, c);
      for (std::size_t j = 0; j < i; ++j) {
        const cx mij = mimo::dot_conj(res.reduced.row_ptr(i), bstar[j].data(),
                                      n + 1) /
                       bn[j];
        mu(i, j) = mij;
        for (std::size_t c = 0; c < n + 1; ++c) bstar[i][c] -= mij * bstar[j][c];
      }
      bn[i] = mimo::norm2(bstar[i].data(), n + 1);
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        REQUIRE(std::abs(mu(i, j).real()) <= 0.5 + 1e-9);
        REQUIRE(std::abs(mu(i, j).imag()) <= 0.5 + 1e-9);
      }
    }
    for (std::size_t k = 1; k < n; ++k) {
      const double lhs = delta * bn[k - 1];
      const double rhs = bn[k] + std::norm(mu(k, k - 1)) * bn[k - 1];
      REQUIRE(lhs <= rhs * (1.0 + 1e-9) + 1e-12);
    }
  }
}

TEST_CASE("clll: idempotent on reduced bases") {
  std::mt19937_64 rng(88);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 3;
    const CMatrix b = random_matrix(rng, n, n + 2);
    const auto first = mimo::clll_reduce(b, 0.99);
    const auto second = mimo::clll_reduce(first.reduced, 0.99);
    REQUIRE(entries_are_units_or_zero_diagonal_identity(second.transform));
    REQUIRE(max_abs_diff(second.reduced, first.reduced) == 0.0);
  }
}

TEST_CASE("clll: lattice preservation under the transform map") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> coef(-2, 2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 2;
    const CMatrix b = random_gaussian_integer_basis(rng, n, 3);
    const auto res = mimo::clll_reduce(b, 0.99);
    const CMatrix tinv = unimodular_inverse(res.transform);
    for (int rep = 0; rep < 10; ++rep) {
      CMatrix x(1, n);
      for (std::size_t c = 0; c < n; ++c) x(0, c) = cx(coef(rng), coef(rng));
      // x B-tilde lies in the row lattice of B via x T, and vice versa.
      REQUIRE(fro_diff(x * res.reduced, (x * res.transform) * b) < 1e-9);
      REQUIRE(fro_diff(x * b, (x * tinv) * res.reduced) < 1e-9);
    }
  }
}

TEST_CASE("clll: Gram determinant is invariant") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 3;
    const CMatrix b = random_matrix(rng, n, n + 1);
    const auto res = mimo::clll_reduce(b, 0.99);
    const double before = std::abs(det_lu(b * b.adjoint()));
    const double after = std::abs(det_lu(res.reduced * res.reduced.adjoint()));
    REQUIRE(std::abs(after - before) < 1e-6 * before);
  }
}

TEST_CASE("clll: orthogonality defect never increases (statistical)") {
  std::mt19937_64 rng(111);
  int ok = 0;
  const int trials = 1000;
  for (int trial = 0; trial < trials; ++trial) {
    const std::size_t n = 2 + trial % 3;
    const CMatrix b = random_matrix(rng, n, n + 2);
    const auto res = mimo::clll_reduce(b, 0.99);
    const double before = mimo::orthogonality_defect(b);
    const double after = mimo::orthogonality_defect(res.reduced);
    if (after <= before * (1.0 + 1e-9)) ++ok;
  }
  CHECK(ok >= trials * 99 / 100);
}

TEST_CASE("clll: termination within the step budget") {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 4;
    CMatrix b = random_matrix(rng, n, n + 1);
    // Skew the row norms to stress the swap phase.
    for (std::size_t c = 0; c < b.cols(); ++c) {
      b(0, c) = b(0, c) * 1e4;
      b(n - 1, c) = b(n - 1, c) * 1e-3;
    }
    mimo::ReductionStats stats;
    const auto res = mimo::clll_reduce(b, 0.99, &stats);
    double max_norm = 0.0, min_norm = std::numeric_limits<double>::max();
    for (std::size_t r = 0; r < n; ++r) {
      const double nr = std::sqrt(mimo::norm2(b.row_ptr(r), b.cols()));
      max_norm = std::max(max_norm, nr);
      min_norm = std::min(min_norm, nr);
    }
    const double budget = 10.0 * n * n * std::log(max_norm / min_norm) + 1000.0;
    REQUIRE(static_cast<double>(stats.steps) <= budget);
    REQUIRE(is_gaussian_integer_matrix(res.transform));
  }
}

TEST_CASE("clll: error paths") {
  CHECK_THROWS_AS(mimo::clll_reduce(CMatrix::identity(2), 0.5),
                  mimo::InvalidDelta);
  CHECK_THROWS_AS(mimo::clll_reduce(CMatrix::identity(2), 1.01),
                  mimo::InvalidDelta);
  const CMatrix dependent({{cx(1, 0), cx(0, 0)}, {cx(1, 0), cx(0, 0)}});
  CHECK_THROWS_AS(mimo::clll_reduce(dependent, 0.99), mimo::RankDeficient);
}

TEST_CASE("orthogonality defect: identity, known value, singular input") {
  CHECK(mimo::orthogonality_defect(CMatrix::identity(3)) ==
        doctest::Approx(1.0));
  const CMatrix b({{cx(1, 0), cx(0, 0)}, {cx(1, 0), cx(1, 0)}});
  CHECK(mimo::orthogonality_defect(b) == doctest::Approx(std::sqrt(2.0)));
  const CMatrix dependent({{cx(1, 0), cx(0, 0)}, {cx(2, 0), cx(0, 0)}});
  CHECK_THROWS_AS(mimo::orthogonality_defect(dependent), mimo::RankDeficient);
}
