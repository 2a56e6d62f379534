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

#include "mimo/cxmat.hpp"

#include <cmath>
#include <stdexcept>

namespace mimo {

namespace {

// Active counter stack for the current thread. Kernels report to every
// counter on the stack so nested measurement scopes stay consistent.
thread_local std::vector<OpCounter*> g_counters;

void check_finite(const std::vector<cx>& entries) {
  for (const cx& z : entries) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw std::invalid_argument("CMatrix: non-finite entry");
    }
  }
}

}  // namespace

CountScope::CountScope(OpCounter& counter) : counter_(&counter) {
  g_counters.push_back(counter_);
}

CountScope::~CountScope() {
  assert(!g_counters.empty() && g_counters.back() == counter_);
  g_counters.pop_back();
}

namespace flopcost {

void add(std::uint64_t n) noexcept {
  for (OpCounter* c : g_counters) c->add(n);
}

}  // namespace flopcost

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<cx> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows_ * cols_) {
    throw std::invalid_argument("CMatrix: entry count does not match shape");
  }
  check_finite(data_);
}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<cx>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) {
      throw std::invalid_argument("CMatrix: ragged initializer");
    }
    data_.insert(data_.end(), r.begin(), r.end());
  }
  check_finite(data_);
}

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = cx(1.0, 0.0);
  return m;
}

CMatrix CMatrix::adjoint() const {
  CMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) {
      out(c, r) = std::conj((*this)(r, c));
    }
  }
  return out;
}

CMatrix CMatrix::transpose() const {
  CMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
  }
  return out;
}

CMatrix CMatrix::conjugate() const {
  CMatrix out(rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) {
    out.data_[i] = std::conj(data_[i]);
  }
  return out;
}

CMatrix CMatrix::block(std::size_t r0, std::size_t c0, std::size_t nrows,
                       std::size_t ncols) const {
  assert(r0 + nrows <= rows_ && c0 + ncols <= cols_);
  CMatrix out(nrows, ncols);
  for (std::size_t r = 0; r < nrows; ++r) {
    for (std::size_t c = 0; c < ncols; ++c) out(r, c) = (*this)(r0 + r, c0 + c);
  }
  return out;
}

void CMatrix::set_block(std::size_t r0, std::size_t c0, const CMatrix& b) {
  assert(r0 + b.rows() <= rows_ && c0 + b.cols() <= cols_);
  for (std::size_t r = 0; r < b.rows(); ++r) {
    for (std::size_t c = 0; c < b.cols(); ++c) {
      (*this)(r0 + r, c0 + c) = b(r, c);
    }
  }
}

std::vector<cx> CMatrix::col_vec(std::size_t c) const {
  std::vector<cx> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

std::vector<cx> CMatrix::row_vec(std::size_t r) const {
  return std::vector<cx>(row_ptr(r), row_ptr(r) + cols_);
}

double CMatrix::frobenius_norm() const {
  return std::sqrt(norm2(data_.data(), data_.size()));
}

double CMatrix::max_abs() const {
  double m = 0.0;
  for (const cx& z : data_) m = std::max(m, std::abs(z));
  return m;
}

CMatrix operator+(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("CMatrix +: shape mismatch");
  }
  CMatrix out(a.rows(), a.cols());
  flopcost::add(flopcost::kAdd * a.rows() * a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = a(r, c) + b(r, c);
  }
  return out;
}

CMatrix operator-(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("CMatrix -: shape mismatch");
  }
  CMatrix out(a.rows(), a.cols());
  flopcost::add(flopcost::kAdd * a.rows() * a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = a(r, c) - b(r, c);
  }
  return out;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("CMatrix *: inner dimension mismatch");
  }
  CMatrix out(a.rows(), b.cols());
  flopcost::add(flopcost::kMulAdd * a.rows() * b.cols() * a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cx ark = a(r, k);
      const cx* brow = b.row_ptr(k);
      cx* orow = out.row_ptr(r);
      for (std::size_t c = 0; c < b.cols(); ++c) orow[c] += ark * brow[c];
    }
  }
  return out;
}

CMatrix operator*(cx s, const CMatrix& a) {
  CMatrix out(a.rows(), a.cols());
  flopcost::add(flopcost::kMul * a.rows() * a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = s * a(r, c);
  }
  return out;
}

CMatrix operator*(double s, const CMatrix& a) {
  CMatrix out(a.rows(), a.cols());
  flopcost::add(2 * flopcost::kReal * a.rows() * a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = s * a(r, c);
  }
  return out;
}

CMatrix hstack(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows()) {
    throw std::invalid_argument("hstack: row count mismatch");
  }
  CMatrix out(a.rows(), a.cols() + b.cols());
  out.set_block(0, 0, a);
  out.set_block(0, a.cols(), b);
  return out;
}

CMatrix vstack(const CMatrix& a, const CMatrix& b) {
  if (!a.empty() && !b.empty() && a.cols() != b.cols()) {
    throw std::invalid_argument("vstack: column count mismatch");
  }
  const std::size_t cols = a.empty() ? b.cols() : a.cols();
  CMatrix out(a.rows() + b.rows(), cols);
  if (!a.empty()) out.set_block(0, 0, a);
  if (!b.empty()) out.set_block(a.rows(), 0, b);
  return out;
}

std::vector<cx> matvec(const CMatrix& a, const std::vector<cx>& x) {
  if (a.cols() != x.size()) {
    throw std::invalid_argument("matvec: dimension mismatch");
  }
  std::vector<cx> y(a.rows(), cx(0.0, 0.0));
  flopcost::add(flopcost::kMulAdd * a.rows() * a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const cx* row = a.row_ptr(r);
    cx acc(0.0, 0.0);
    for (std::size_t c = 0; c < a.cols(); ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
  return y;
}

cx dot_conj(const cx* a, const cx* b, std::size_t n) {
  flopcost::add(flopcost::kMulAdd * n);
  cx acc(0.0, 0.0);
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * std::conj(b[i]);
  return acc;
}

double norm2(const cx* a, std::size_t n) {
  flopcost::add((flopcost::kAbs2 + flopcost::kReal) * n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
  }
  return acc;
}

}  // namespace mimo
