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
#include <limits>

#include <doctest.h>

#include "mimo/cxmat.hpp"
#include "support/test_helpers.hpp"

using mimo::CMatrix;
using mimo::CountScope;
using mimo::cx;
using mimo::OpCounter;

TEST_CASE("construction validates shape and finiteness") {
  CHECK_THROWS_AS(CMatrix(2, 2, {cx(1, 0), cx(2, 0)}), std::invalid_argument);
  CHECK_THROWS_AS(
      CMatrix({{cx(1, 0), cx(std::numeric_limits<double>::quiet_NaN(), 0)}}),
      std::invalid_argument);
  CHECK_THROWS_AS(
      CMatrix({{cx(std::numeric_limits<double>::infinity(), 0)}}),
      std::invalid_argument);
  const CMatrix a({{cx(1, 2), cx(3, 4)}, {cx(5, 6), cx(7, 8)}});
  CHECK(a.rows() == 2);
  CHECK(a.cols() == 2);
  CHECK(a(1, 0) == cx(5, 6));
}

TEST_CASE("multiply and adjoint basics") {
  const CMatrix a({{cx(1, 1), cx(2, 0)}, {cx(0, 0), cx(0, 1)}});
  const CMatrix i2 = CMatrix::identity(2);
  CHECK(testsup::max_abs_diff(a * i2, a) == 0.0);
  CHECK(testsup::max_abs_diff(i2 * a, a) == 0.0);
  const CMatrix ah = a.adjoint();
  CHECK(ah(0, 1) == std::conj(a(1, 0)));
  // (AB)^H == B^H A^H
  std::mt19937_64 rng(7);
  const CMatrix x = testsup::random_matrix(rng, 3, 4);
  const CMatrix y = testsup::random_matrix(rng, 4, 2);
  CHECK(testsup::max_abs_diff((x * y).adjoint(), y.adjoint() * x.adjoint()) <
        1e-12);
}

TEST_CASE("stacking and blocks round-trip") {
  std::mt19937_64 rng(11);
  const CMatrix a = testsup::random_matrix(rng, 2, 3);
  const CMatrix b = testsup::random_matrix(rng, 4, 3);
  const CMatrix s = vstack(a, b);
  CHECK(s.rows() == 6);
  CHECK(testsup::max_abs_diff(s.block(0, 0, 2, 3), a) == 0.0);
  CHECK(testsup::max_abs_diff(s.block(2, 0, 4, 3), b) == 0.0);
  const CMatrix h = hstack(a.transpose(), b.transpose());
  CHECK(h.cols() == 6);
  CHECK(testsup::max_abs_diff(h.block(0, 2, 3, 4), b.transpose()) == 0.0);
}

TEST_CASE("operation counter: deterministic, zero when idle, matmul cost") {
  OpCounter c1;
  {
    CountScope scope(c1);
  }
  CHECK(c1.flops() == 0);

  std::mt19937_64 rng(3);
  const CMatrix a = testsup::random_matrix(rng, 3, 5);
  const CMatrix b = testsup::random_matrix(rng, 5, 4);
  OpCounter c2, c3;
  {
    CountScope scope(c2);
    const CMatrix p = a * b;
    (void)p;
  }
  CHECK(c2.flops() == 8u * 3u * 4u * 5u);
  {
    CountScope scope(c3);
    const CMatrix p = a * b;
    (void)p;
  }
  CHECK(c2.flops() == c3.flops());

  // Nested scopes observe the same kernels.
  OpCounter outer, inner;
  {
    CountScope so(outer);
    {
      CountScope si(inner);
      const CMatrix p = a * b;
      (void)p;
    }
  }
  CHECK(outer.flops() == inner.flops());
}

TEST_CASE("frobenius norm") {
  const CMatrix a({{cx(3, 0), cx(0, 4)}});
  CHECK(a.frobenius_norm() == doctest::Approx(5.0));
  CHECK(CMatrix(4, 7).frobenius_norm() == 0.0);
}

TEST_CASE("matvec matches multiply") {
  std::mt19937_64 rng(5);
  const CMatrix a = testsup::random_matrix(rng, 4, 6);
  const CMatrix x = testsup::random_matrix(rng, 6, 1);
  const std::vector<cx> y = matvec(a, x.col_vec(0));
  const CMatrix ref = a * x;
  for (std::size_t i = 0; i < y.size(); ++i) {
    CHECK(std::abs(y[i] - ref(i, 0)) < 1e-12);
  }
}
