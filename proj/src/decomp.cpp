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

#include "mimo/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mimo {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Householder vector for the segment x (overwritten with v):
//   H = I - tau v v^H,  H x = beta e1,  beta = -phase(x0) * ||x||.
// Returns false for a zero segment (H = I).
bool make_householder(std::vector<cx>& x, double& tau, cx& beta) {
  const double nrm = std::sqrt(norm2(x.data(), x.size()));
  flopcost::add(flopcost::kReal);
  if (nrm == 0.0) {
    tau = 0.0;
    beta = cx(0.0, 0.0);
    return false;
  }
  const double a0 = std::abs(x[0]);
  const cx phase = (a0 == 0.0) ? cx(1.0, 0.0) : x[0] / a0;
  beta = -phase * nrm;
  x[0] -= beta;
  const double vn2 = norm2(x.data(), x.size());
  tau = 2.0 / vn2;
  flopcost::add(8);
  return true;
}

// work[r0.., col] over rows r0..r0+len-1 gets H applied from the left.
void reflect_col(CMatrix& m, std::size_t r0, std::size_t col,
                 const std::vector<cx>& v, double tau) {
  const std::size_t len = v.size();
  cx w(0.0, 0.0);
  for (std::size_t i = 0; i < len; ++i) w += std::conj(v[i]) * m(r0 + i, col);
  w *= tau;
  for (std::size_t i = 0; i < len; ++i) m(r0 + i, col) -= w * v[i];
  flopcost::add(2 * flopcost::kMulAdd * len + 2);
}

// Row r of m, columns c0..c0+len-1, gets H applied from the right.
void reflect_row(CMatrix& m, std::size_t r, std::size_t c0,
                 const std::vector<cx>& v, double tau) {
  const std::size_t len = v.size();
  cx w(0.0, 0.0);
  for (std::size_t j = 0; j < len; ++j) w += m(r, c0 + j) * v[j];
  w *= tau;
  for (std::size_t j = 0; j < len; ++j) m(r, c0 + j) -= w * std::conj(v[j]);
  flopcost::add(2 * flopcost::kMulAdd * len + 2);
}

void scale_col(CMatrix& m, std::size_t col, cx s) {
  for (std::size_t r = 0; r < m.rows(); ++r) m(r, col) *= s;
  flopcost::add(flopcost::kMul * m.rows());
}

void swap_cols(CMatrix& m, std::size_t c1, std::size_t c2) {
  for (std::size_t r = 0; r < m.rows(); ++r) std::swap(m(r, c1), m(r, c2));
}

// Real Givens rotation of columns (c1, c2): col1' = c*col1 + s*col2,
// col2' = c*col2 - s*col1.
void rotate_cols(CMatrix& m, std::size_t c1, std::size_t c2, double c,
                 double s) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const cx y = m(r, c1);
    const cx z = m(r, c2);
    m(r, c1) = y * c + z * s;
    m(r, c2) = z * c - y * s;
  }
  flopcost::add(12 * m.rows());
}

// Implicit-shift QR step on the bidiagonal block d[lo..hi], e[lo..hi-1],
// accumulating the rotations into the columns of u and v when present.
void bidiag_qr_step(std::vector<double>& d, std::vector<double>& e, int lo,
                    int hi, CMatrix* u, CMatrix* v) {
  double x = d[lo];
  double y = d[hi - 1];
  double z = d[hi];
  double g = (hi - 1 > lo) ? e[hi - 2] : 0.0;
  double h = e[hi - 1];
  double f = ((y - z) * (y + z) + (g - h) * (g + h)) / (2.0 * h * y);
  g = std::hypot(f, 1.0);
  f = ((x - z) * (x + z) + h * ((y / (f + std::copysign(g, f))) - h)) / x;
  double c = 1.0, s = 1.0;
  flopcost::add(25);
  for (int j = lo; j <= hi - 1; ++j) {
    const int i = j + 1;
    g = e[i - 1];
    y = d[i];
    h = s * g;
    g = c * g;
    z = std::hypot(f, h);
    if (j > lo) e[j - 1] = z;
    if (z != 0.0) {
      c = f / z;
      s = h / z;
    } else {
      c = 1.0;
      s = 0.0;
    }
    f = x * c + g * s;
    g = g * c - x * s;
    h = y * s;
    y *= c;
    if (v != nullptr) rotate_cols(*v, j, i, c, s);
    z = std::hypot(f, h);
    d[j] = z;
    if (z != 0.0) {
      const double inv = 1.0 / z;
      c = f * inv;
      s = h * inv;
    }
    f = c * g + s * y;
    x = c * y - s * g;
    if (u != nullptr) rotate_cols(*u, j, i, c, s);
    flopcost::add(30);
  }
  e[hi - 1] = f;
  d[hi] = x;
}

// Lower-triangular Cholesky factor of a Hermitian matrix. Pivots at or
// below min_pivot abort with NotPositiveDefinite.
CMatrix cholesky(const CMatrix& a, double min_pivot) {
  const std::size_t n = a.rows();
  CMatrix l(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    double pivot = a(k, k).real();
    for (std::size_t j = 0; j < k; ++j) {
      const cx lkj = l(k, j);
      pivot -= lkj.real() * lkj.real() + lkj.imag() * lkj.imag();
    }
    flopcost::add((flopcost::kAbs2 + flopcost::kReal) * k + flopcost::kReal);
    if (!(pivot > min_pivot)) {
      throw NotPositiveDefinite("cholesky: pivot " + std::to_string(pivot) +
                                " at index " + std::to_string(k));
    }
    const double lkk = std::sqrt(pivot);
    l(k, k) = cx(lkk, 0.0);
    const double inv = 1.0 / lkk;
    flopcost::add(2);
    for (std::size_t i = k + 1; i < n; ++i) {
      cx s = a(i, k);
      for (std::size_t j = 0; j < k; ++j) s -= l(i, j) * std::conj(l(k, j));
      l(i, k) = s * inv;
      flopcost::add(flopcost::kMulAdd * k + 2);
    }
  }
  return l;
}

}  // namespace

QrResult qr_thin(const CMatrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (m < n) {
    throw std::invalid_argument("qr_thin: requires rows >= cols");
  }
  const double fro = a.frobenius_norm();
  CMatrix work = a;
  std::vector<std::vector<cx>> vs(n);
  std::vector<double> taus(n, 0.0);
  std::vector<cx> hv;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t len = m - k;
    hv.resize(len);
    for (std::size_t i = 0; i < len; ++i) hv[i] = work(k + i, k);
    double tau;
    cx beta;
    if (!make_householder(hv, tau, beta)) continue;
    for (std::size_t j = k + 1; j < n; ++j) reflect_col(work, k, j, hv, tau);
    work(k, k) = beta;
    for (std::size_t i = 1; i < len; ++i) work(k + i, k) = cx(0.0, 0.0);
    vs[k] = hv;
    taus[k] = tau;
  }
  const double tol = 1e-10 * fro;
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(work(k, k)) <= tol) {
      throw RankDeficient("qr_thin: rank deficient at column " +
                          std::to_string(k));
    }
  }
  // Q = H_0 ... H_{n-1} applied to the first n columns of the identity.
  CMatrix q(m, n);
  for (std::size_t j = 0; j < n; ++j) q(j, j) = cx(1.0, 0.0);
  for (std::size_t k = n; k-- > 0;) {
    if (taus[k] == 0.0) continue;
    for (std::size_t j = k; j < n; ++j) reflect_col(q, k, j, vs[k], taus[k]);
  }
  // Phase-normalize the diagonal of R to real positive.
  CMatrix r(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const cx rkk = work(k, k);
    const cx phase = rkk / std::abs(rkk);
    scale_col(q, k, phase);
    r(k, k) = cx(std::abs(rkk), 0.0);
    for (std::size_t j = k + 1; j < n; ++j) {
      r(k, j) = std::conj(phase) * work(k, j);
    }
    flopcost::add(flopcost::kMul * (n - k) + 2);
  }
  return {std::move(q), std::move(r)};
}

CMatrix qr_r_factor(const CMatrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (m < n) {
    throw std::invalid_argument("qr_r_factor: requires rows >= cols");
  }
  const double fro = a.frobenius_norm();
  CMatrix work = a;
  std::vector<cx> hv;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t len = m - k;
    hv.resize(len);
    for (std::size_t i = 0; i < len; ++i) hv[i] = work(k + i, k);
    double tau;
    cx beta;
    if (!make_householder(hv, tau, beta)) continue;
    for (std::size_t j = k + 1; j < n; ++j) reflect_col(work, k, j, hv, tau);
    work(k, k) = beta;
    for (std::size_t i = 1; i < len; ++i) work(k + i, k) = cx(0.0, 0.0);
  }
  const double tol = 1e-10 * fro;
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(work(k, k)) <= tol) {
      throw RankDeficient("qr_r_factor: rank deficient at column " +
                          std::to_string(k));
    }
  }
  CMatrix r(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const cx rkk = work(k, k);
    const cx phase = rkk / std::abs(rkk);
    r(k, k) = cx(std::abs(rkk), 0.0);
    for (std::size_t j = k + 1; j < n; ++j) {
      r(k, j) = std::conj(phase) * work(k, j);
    }
    flopcost::add(flopcost::kMul * (n - k) + 2);
  }
  return r;
}

SvdResult svd(const CMatrix& a) {
  return svd_partial(a, SvdFactor::kFull, SvdFactor::kFull);
}

SvdResult svd_partial(const CMatrix& a, SvdFactor want_u, SvdFactor want_v) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (m == 0 || n == 0) {
    SvdResult empty;
    if (want_u != SvdFactor::kNone) empty.u = CMatrix::identity(m);
    if (want_v != SvdFactor::kNone) empty.v = CMatrix::identity(n);
    return empty;
  }
  if (m < n) {
    SvdResult t = svd_partial(a.adjoint(), want_v, want_u);
    return {std::move(t.v), std::move(t.singular_values), std::move(t.u)};
  }
  const bool keep_u = want_u != SvdFactor::kNone;
  const bool keep_v = want_v != SvdFactor::kNone;

  // Householder bidiagonalization; the reflectors are kept aside and only
  // the requested factors are assembled afterwards.
  CMatrix work = a;
  std::vector<std::vector<cx>> left_vs(n), right_vs(n);
  std::vector<double> left_taus(n, 0.0), right_taus(n, 0.0);
  std::vector<cx> hv;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t len = m - k;
    hv.resize(len);
    for (std::size_t i = 0; i < len; ++i) hv[i] = work(k + i, k);
    double tau;
    cx beta;
    if (make_householder(hv, tau, beta)) {
      for (std::size_t j = k + 1; j < n; ++j) reflect_col(work, k, j, hv, tau);
      work(k, k) = beta;
      for (std::size_t i = 1; i < len; ++i) work(k + i, k) = cx(0.0, 0.0);
      if (keep_u) {
        left_vs[k] = hv;
        left_taus[k] = tau;
      }
    }
    if (k + 2 < n) {
      const std::size_t rlen = n - (k + 1);
      hv.resize(rlen);
      for (std::size_t j = 0; j < rlen; ++j) {
        hv[j] = std::conj(work(k, k + 1 + j));
      }
      if (make_householder(hv, tau, beta)) {
        for (std::size_t r = k + 1; r < m; ++r) {
          reflect_row(work, r, k + 1, hv, tau);
        }
        work(k, k + 1) = std::conj(beta);
        for (std::size_t j = k + 2; j < n; ++j) work(k, j) = cx(0.0, 0.0);
        if (keep_v) {
          right_vs[k] = hv;
          right_taus[k] = tau;
        }
      }
    }
  }

  // Assemble the requested factors by applying the reflectors in reverse to
  // an identity block; untouched leading columns stay unit vectors, so each
  // reflector only needs to visit the trailing columns.
  CMatrix u, v;
  if (keep_u) {
    const std::size_t ucols = (want_u == SvdFactor::kFull) ? m : n;
    u = CMatrix(m, ucols);
    for (std::size_t j = 0; j < ucols; ++j) u(j, j) = cx(1.0, 0.0);
    for (std::size_t k = n; k-- > 0;) {
      if (left_taus[k] == 0.0) continue;
      for (std::size_t j = k; j < ucols; ++j) {
        reflect_col(u, k, j, left_vs[k], left_taus[k]);
      }
    }
  }
  if (keep_v) {
    v = CMatrix::identity(n);
    for (std::size_t k = n; k-- > 0;) {
      if (right_taus[k] == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) {
        reflect_col(v, k + 1, j, right_vs[k], right_taus[k]);
      }
    }
  }

  // Rotate the complex bidiagonal onto the real non-negative axis, pushing
  // the unit phases into the columns of U and V.
  std::vector<cx> dc(n), ec(n > 1 ? n - 1 : 0);
  for (std::size_t k = 0; k < n; ++k) dc[k] = work(k, k);
  for (std::size_t k = 0; k + 1 < n; ++k) ec[k] = work(k, k + 1);
  std::vector<double> d(n, 0.0), e(n > 1 ? n - 1 : 0, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double mag = std::abs(dc[k]);
    const cx p = (mag == 0.0) ? cx(1.0, 0.0) : dc[k] / mag;
    if (keep_u) scale_col(u, k, p);
    d[k] = mag;
    if (k + 1 < n) {
      ec[k] *= std::conj(p);
      const double emag = std::abs(ec[k]);
      const cx q = (emag == 0.0) ? cx(1.0, 0.0) : ec[k] / emag;
      if (keep_v) scale_col(v, k + 1, std::conj(q));
      e[k] = emag;
      dc[k + 1] *= std::conj(q);
      flopcost::add(20);
    }
  }

  // Implicit-shift iteration on the real bidiagonal form.
  double anorm = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double t = std::abs(d[k]);
    if (k + 1 < n) t += std::abs(e[k]);
    anorm = std::max(anorm, t);
  }
  const double tiny = kEps * anorm;
  auto negligible = [tiny](double x) { return std::abs(x) <= tiny; };

  for (int kk = static_cast<int>(n) - 1; kk >= 0; --kk) {
    for (int iter = 0;; ++iter) {
      if (iter > 100) {
        throw NoConvergence("svd: iteration cap exceeded");
      }
      int lo = 0;
      bool cancel = false;
      for (int ll = kk; ll >= 1; --ll) {
        if (negligible(e[ll - 1])) {
          e[ll - 1] = 0.0;
          lo = ll;
          break;
        }
        if (negligible(d[ll - 1])) {
          lo = ll;
          cancel = true;
          break;
        }
      }
      if (cancel) {
        // d[lo-1] is negligible: rotate the dangling superdiagonal away so
        // the block decouples.
        double c = 0.0, s = 1.0;
        for (int i = lo; i <= kk; ++i) {
          const double f = s * e[i - 1];
          e[i - 1] = c * e[i - 1];
          if (negligible(f)) break;
          const double g = d[i];
          const double h = std::hypot(f, g);
          d[i] = h;
          const double inv = 1.0 / h;
          c = g * inv;
          s = -f * inv;
          if (keep_u) rotate_cols(u, lo - 1, i, c, s);
          flopcost::add(8);
        }
      }
      if (lo == kk) {
        // 1x1 block: converged singular value.
        if (d[kk] < 0.0) {
          d[kk] = -d[kk];
          if (keep_v) {
            scale_col(v, kk, cx(-1.0, 0.0));
          } else if (keep_u) {
            scale_col(u, kk, cx(-1.0, 0.0));
          }
        }
        break;
      }
      bidiag_qr_step(d, e, lo, kk, keep_u ? &u : nullptr,
                     keep_v ? &v : nullptr);
    }
  }

  // Descending order.
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = i;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (d[j] > d[best]) best = j;
    }
    if (best != i) {
      std::swap(d[i], d[best]);
      if (keep_u) swap_cols(u, i, best);
      if (keep_v) swap_cols(v, i, best);
    }
  }
  return {std::move(u), std::move(d), std::move(v)};
}

CMatrix herm_solve(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != a.cols() || a.rows() != b.rows()) {
    throw std::invalid_argument("herm_solve: shape mismatch");
  }
  const std::size_t n = a.rows();
  const CMatrix l = cholesky(a, 0.0);
  const std::size_t k = b.cols();
  // Forward substitution L y = b.
  CMatrix y(n, k);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      cx s = b(i, c);
      for (std::size_t j = 0; j < i; ++j) s -= l(i, j) * y(j, c);
      y(i, c) = s / l(i, i).real();
      flopcost::add(flopcost::kMulAdd * i + 2);
    }
  }
  // Back substitution L^H x = y.
  CMatrix x(n, k);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t ii = n; ii-- > 0;) {
      cx s = y(ii, c);
      for (std::size_t j = ii + 1; j < n; ++j) {
        s -= std::conj(l(j, ii)) * x(j, c);
      }
      x(ii, c) = s / l(ii, ii).real();
      flopcost::add(flopcost::kMulAdd * (n - ii - 1) + 2);
    }
  }
  return x;
}

CMatrix regularized_inverse(const CMatrix& h, double alpha) {
  if (alpha < 0.0) {
    throw std::invalid_argument("regularized_inverse: negative alpha");
  }
  const std::size_t n = h.cols();
  const CMatrix hh = h.adjoint();
  CMatrix gram = hh * h;
  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    gram(i, i) += alpha;
    trace += gram(i, i).real();
  }
  flopcost::add(2 * flopcost::kReal * n);
  const double min_pivot = (alpha == 0.0) ? 1e-12 * trace : 0.0;
  try {
    const CMatrix l = cholesky(gram, min_pivot);
    // Reuse the factor for both substitutions on the n x rows(h) system.
    const std::size_t k = hh.cols();
    CMatrix y(n, k);
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t i = 0; i < n; ++i) {
        cx s = hh(i, c);
        for (std::size_t j = 0; j < i; ++j) s -= l(i, j) * y(j, c);
        y(i, c) = s / l(i, i).real();
        flopcost::add(flopcost::kMulAdd * i + 2);
      }
    }
    CMatrix x(n, k);
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t ii = n; ii-- > 0;) {
        cx s = y(ii, c);
        for (std::size_t j = ii + 1; j < n; ++j) {
          s -= std::conj(l(j, ii)) * x(j, c);
        }
        x(ii, c) = s / l(ii, ii).real();
        flopcost::add(flopcost::kMulAdd * (n - ii - 1) + 2);
      }
    }
    return x;
  } catch (const NotPositiveDefinite&) {
    if (alpha == 0.0) {
      throw Singular("regularized_inverse: Gram matrix numerically singular");
    }
    throw;
  }
}

std::vector<double> inv_sqrt_diag_reg(const std::vector<double>& s,
                                      double alpha, std::size_t n) {
  if (alpha < 0.0) {
    throw std::invalid_argument("inv_sqrt_diag_reg: negative alpha");
  }
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double sk = (k < s.size()) ? s[k] : 0.0;
    const double denom = sk * sk + alpha;
    if (denom <= 0.0) {
      throw DivisionByZero("inv_sqrt_diag_reg: zero spectrum entry at k=" +
                           std::to_string(k) + " with alpha=0");
    }
    out[k] = 1.0 / std::sqrt(denom);
  }
  flopcost::add(4 * flopcost::kReal * n);
  return out;
}

CMatrix upper_tri_solve(const CMatrix& r, const CMatrix& b) {
  if (r.rows() != r.cols() || r.rows() != b.rows()) {
    throw std::invalid_argument("upper_tri_solve: shape mismatch");
  }
  const std::size_t n = r.rows();
  const std::size_t k = b.cols();
  CMatrix x(n, k);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t ii = n; ii-- > 0;) {
      if (r(ii, ii) == cx(0.0, 0.0)) {
        throw Singular("upper_tri_solve: zero diagonal");
      }
      cx s = b(ii, c);
      for (std::size_t j = ii + 1; j < n; ++j) s -= r(ii, j) * x(j, c);
      x(ii, c) = s / r(ii, ii);
      flopcost::add(flopcost::kMulAdd * (n - ii - 1) + flopcost::kDiv);
    }
  }
  return x;
}

CMatrix upper_tri_inverse(const CMatrix& r) {
  if (r.rows() != r.cols()) {
    throw std::invalid_argument("upper_tri_inverse: not square");
  }
  const std::size_t n = r.rows();
  CMatrix x(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    if (r(c, c) == cx(0.0, 0.0)) {
      throw Singular("upper_tri_inverse: zero diagonal");
    }
    x(c, c) = cx(1.0, 0.0) / r(c, c);
    flopcost::add(flopcost::kDiv);
    for (std::size_t ii = c; ii-- > 0;) {
      cx s(0.0, 0.0);
      for (std::size_t j = ii + 1; j <= c; ++j) s += r(ii, j) * x(j, c);
      x(ii, c) = -s / r(ii, ii);
      flopcost::add(flopcost::kMulAdd * (c - ii) + flopcost::kDiv);
    }
  }
  return x;
}

}  // namespace mimo
