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
 * @file cxmat.hpp
 * @brief Dense complex matrix type with built-in floating point operation
 *        accounting.
 *
 * Every arithmetic kernel in this library charges its cost to the OpCounters
 * that are active on the calling thread, using a uniform cost model:
 * complex multiply = 6 real flops, complex add = 2, fused multiply-add = 8,
 * complex division = 11, any real operation = 1. The model matters only in
 * that it is applied identically to every algorithm being compared.
 */

#pragma once

#include <cassert>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include "mimo/errors.hpp"

namespace mimo {

using cx = std::complex<double>;

/// Accumulates real floating point operations executed by the matrix kernels
/// while a CountScope referencing this counter is alive. One counter belongs
/// to one execution context (e.g. one simulation worker); counters are never
/// shared between threads.
class OpCounter {
 public:
  void add(std::uint64_t n) noexcept { flops_ += n; }
  std::uint64_t flops() const noexcept { return flops_; }
  void reset() noexcept { flops_ = 0; }

 private:
  std::uint64_t flops_ = 0;
};

/// RAII activation of an OpCounter on the current thread. Scopes nest: every
/// counter on the active stack observes the same kernel calls, so an outer
/// harness scope and an inner per-call scope both see consistent totals.
class CountScope {
 public:
  explicit CountScope(OpCounter& counter);
  ~CountScope();
  CountScope(const CountScope&) = delete;
  CountScope& operator=(const CountScope&) = delete;

 private:
  OpCounter* counter_;
};

namespace flopcost {

inline constexpr std::uint64_t kMul = 6;     ///< complex * complex
inline constexpr std::uint64_t kAdd = 2;     ///< complex + complex
inline constexpr std::uint64_t kMulAdd = 8;  ///< fused a*b + c
inline constexpr std::uint64_t kDiv = 11;    ///< complex / complex
inline constexpr std::uint64_t kAbs2 = 3;    ///< |z|^2
inline constexpr std::uint64_t kReal = 1;    ///< any scalar real op

/// Charge `n` real flops to every active counter on this thread.
void add(std::uint64_t n) noexcept;

}  // namespace flopcost

/// Dense complex matrix, row-major storage. Values are immutable in spirit:
/// all operations return new matrices, so instances can be shared freely
/// across threads once constructed. Entries are validated to be finite when
/// a matrix is built from user-provided data.
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}
  CMatrix(std::size_t rows, std::size_t cols, std::vector<cx> entries);
  CMatrix(std::initializer_list<std::initializer_list<cx>> rows);

  static CMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

  cx& operator()(std::size_t r, std::size_t c) {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }
  const cx& operator()(std::size_t r, std::size_t c) const {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }

  const std::vector<cx>& entries() const noexcept { return data_; }
  cx* row_ptr(std::size_t r) { return data_.data() + r * cols_; }
  const cx* row_ptr(std::size_t r) const { return data_.data() + r * cols_; }

  CMatrix adjoint() const;    // conjugate transpose, not counted
  CMatrix transpose() const;  // not counted
  CMatrix conjugate() const;  // not counted

  CMatrix block(std::size_t r0, std::size_t c0, std::size_t nrows,
                std::size_t ncols) const;
  void set_block(std::size_t r0, std::size_t c0, const CMatrix& b);
  std::vector<cx> col_vec(std::size_t c) const;
  std::vector<cx> row_vec(std::size_t r) const;

  /// Frobenius norm; counted.
  double frobenius_norm() const;

  /// Largest entry magnitude; not counted (used in tolerances and tests).
  double max_abs() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cx> data_;
};

CMatrix operator+(const CMatrix& a, const CMatrix& b);
CMatrix operator-(const CMatrix& a, const CMatrix& b);
CMatrix operator*(const CMatrix& a, const CMatrix& b);
CMatrix operator*(cx s, const CMatrix& a);
CMatrix operator*(double s, const CMatrix& a);

CMatrix hstack(const CMatrix& a, const CMatrix& b);
CMatrix vstack(const CMatrix& a, const CMatrix& b);

/// y = A x; counted.
std::vector<cx> matvec(const CMatrix& a, const std::vector<cx>& x);

/// sum_k a[k] * conj(b[k]); counted.
cx dot_conj(const cx* a, const cx* b, std::size_t n);

/// sum_k |a[k]|^2; counted.
double norm2(const cx* a, std::size_t n);

}  // namespace mimo
