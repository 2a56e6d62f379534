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

// Test-only numerical oracles, kept independent of the library's own
// factorization paths: a two-sided Jacobi eigensolver for Hermitian
// matrices, an LU determinant, and exact inversion of Gaussian-integer
// unimodular matrices.

#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "mimo/cxmat.hpp"
#include "mimo/precoders.hpp"

namespace testsup {

using mimo::CMatrix;
using mimo::cx;

inline CMatrix random_matrix(std::mt19937_64& rng, std::size_t m,
                             std::size_t n, double component_sigma = 1.0) {
  std::normal_distribution<double> nd(0.0, component_sigma);
  CMatrix a(m, n);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < n; ++c) a(r, c) = cx(nd(rng), nd(rng));
  }
  return a;
}

inline mimo::ChannelSet random_channel(std::mt19937_64& rng,
                                       const std::vector<std::size_t>& users,
                                       std::size_t n_tx) {
  std::vector<CMatrix> blocks;
  blocks.reserve(users.size());
  for (std::size_t n_i : users) {
    blocks.push_back(random_matrix(rng, n_i, n_tx, 1.0 / std::sqrt(2.0)));
  }
  return mimo::ChannelSet::from_blocks(std::move(blocks));
}

inline double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    return std::numeric_limits<double>::infinity();
  }
  double m = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) {
      m = std::max(m, std::abs(a(r, c) - b(r, c)));
    }
  }
  return m;
}

inline double fro_diff(const CMatrix& a, const CMatrix& b) {
  double s = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) {
      s += std::norm(a(r, c) - b(r, c));
    }
  }
  return std::sqrt(s);
}

inline CMatrix diag_embed(const std::vector<double>& s, std::size_t m,
                          std::size_t n) {
  CMatrix d(m, n);
  for (std::size_t i = 0; i < s.size() && i < m && i < n; ++i) {
    d(i, i) = cx(s[i], 0.0);
  }
  return d;
}

/// || U diag(S) V^H - A ||_F
inline double svd_reconstruction_error(const CMatrix& a, const CMatrix& u,
                                       const std::vector<double>& s,
                                       const CMatrix& v) {
  const CMatrix recon =
      u * diag_embed(s, u.cols(), v.cols()) * v.adjoint();
  return fro_diff(recon, a);
}

inline double orthonormality_error(const CMatrix& q) {
  const CMatrix g = q.adjoint() * q;
  return fro_diff(g, CMatrix::identity(q.cols()));
}

/// Eigenvalues of a Hermitian matrix by two-sided complex Jacobi sweeps,
/// returned in descending order. Independent of the library SVD path.
inline std::vector<double> hermitian_eigenvalues(CMatrix a) {
  const std::size_t n = a.rows();
  if (n == 0) return {};
  double scale = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) scale = std::max(scale, std::abs(a(r, c)));
  }
  if (scale == 0.0) return std::vector<double>(n, 0.0);
  for (int sweep = 0; sweep < 200; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
    }
    if (off <= 1e-14 * scale) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cx apq = a(p, q);
        const double m = std::abs(apq);
        if (m <= 1e-15 * scale) continue;
        const cx phase = apq / m;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double zeta = (aqq - app) / (2.0 * m);
        const double t =
            (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const cx u = a(k, p);
          const cx v = a(k, q);
          a(k, p) = c * u - s * std::conj(phase) * v;
          a(k, q) = s * phase * u + c * v;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const cx u = a(p, k);
          const cx v = a(q, k);
          a(p, k) = c * u - s * phase * v;
          a(q, k) = s * std::conj(phase) * u + c * v;
        }
      }
    }
  }
  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i).real();
  std::sort(eig.begin(), eig.end(), std::greater<double>());
  return eig;
}

/// Determinant by LU with partial pivoting; test oracle only.
inline cx det_lu(CMatrix a) {
  const std::size_t n = a.rows();
  cx det(1.0, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t r = k + 1; r < n; ++r) {
      if (std::abs(a(r, k)) > std::abs(a(piv, k))) piv = r;
    }
    if (std::abs(a(piv, k)) == 0.0) return cx(0.0, 0.0);
    if (piv != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(k, c), a(piv, c));
      det = -det;
    }
    det *= a(k, k);
    for (std::size_t r = k + 1; r < n; ++r) {
      const cx f = a(r, k) / a(k, k);
      for (std::size_t c = k; c < n; ++c) a(r, c) -= f * a(k, c);
    }
  }
  return det;
}

inline bool is_gaussian_integer_matrix(const CMatrix& t, double tol = 1e-9) {
  for (std::size_t r = 0; r < t.rows(); ++r) {
    for (std::size_t c = 0; c < t.cols(); ++c) {
      const cx z = t(r, c);
      if (std::abs(z.real() - std::round(z.real())) > tol) return false;
      if (std::abs(z.imag() - std::round(z.imag())) > tol) return false;
    }
  }
  return true;
}

/// Exact inverse of a Gaussian-integer unimodular matrix; throws when the
/// rounded inverse fails to reproduce the identity.
inline CMatrix unimodular_inverse(const CMatrix& t) {
  const std::size_t n = t.rows();
  CMatrix aug(n, 2 * n);
  aug.set_block(0, 0, t);
  aug.set_block(0, n, CMatrix::identity(n));
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t r = k + 1; r < n; ++r) {
      if (std::abs(aug(r, k)) > std::abs(aug(piv, k))) piv = r;
    }
    if (std::abs(aug(piv, k)) == 0.0) {
      throw std::runtime_error("unimodular_inverse: singular transform");
    }
    if (piv != k) {
      for (std::size_t c = 0; c < 2 * n; ++c) std::swap(aug(k, c), aug(piv, c));
    }
    const cx d = aug(k, k);
    for (std::size_t c = 0; c < 2 * n; ++c) aug(k, c) /= d;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == k) continue;
      const cx f = aug(r, k);
      if (f == cx(0.0, 0.0)) continue;
      for (std::size_t c = 0; c < 2 * n; ++c) aug(r, c) -= f * aug(k, c);
    }
  }
  CMatrix inv(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const cx z = aug(r, n + c);
      inv(r, c) = cx(std::round(z.real()), std::round(z.imag()));
      if (std::abs(z - inv(r, c)) > 1e-6) {
        throw std::runtime_error("unimodular_inverse: non-integer inverse");
      }
    }
  }
  const CMatrix check = t * inv;
  if (fro_diff(check, CMatrix::identity(n)) > 1e-6) {
    throw std::runtime_error("unimodular_inverse: verification failed");
  }
  return inv;
}

}  // namespace testsup
