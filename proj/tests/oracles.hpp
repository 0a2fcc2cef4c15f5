// SPDX-License-Identifier: Apache-2.0
//
// ce3d: channel estimation laboratory for correlated MIMO-OFDM links
// Copyright (C) 2026 The ce3d authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Independent reference computations for the tests. These deliberately use the
// slow, obvious formulation: dense matrices, explicit inverses, nested loops.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "ce3d/grid.hpp"
#include "ce3d/linalg.hpp"

namespace ce3d::oracle {

using Big = boost::multiprecision::cpp_bin_float_50;

// sum_k (-1)^k (x/2)^(2k) / (k!)^2 in 50-digit arithmetic, summed until the terms
// stop contributing. Near x = 50 the largest term is ~1e20, so 50 digits leave
// roughly 30 correct digits after cancellation.
inline double j0_series(double x) {
  const Big q = Big(x) * Big(x) / 4;
  Big term = 1;
  Big sum = 1;
  for (int k = 1; k < 400; ++k) {
    term *= -q / (Big(k) * Big(k));
    sum += term;
    if (k > 2 * x && abs(term) < Big("1e-40")) break;
  }
  return static_cast<double>(sum);
}

template <typename M>
M kron_loops(const M& a, const M& b) {
  M out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index k = 0; k < b.rows(); ++k)
        for (Eigen::Index l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

inline CMat selection_dense(const SelectionMatrix& sel) {
  CMat a = CMat::Zero(sel.rows(), sel.cols());
  for (int r = 0; r < sel.rows(); ++r) a(r, sel.col_of(r)) = 1.0;
  return a;
}

// R A^T (A R A^T + s I)^-1 with an explicit inverse.
inline CMat lmmse(const CMat& r, const CMat& a, double sigma2) {
  const CMat gram = a * r * a.transpose() + sigma2 * CMat::Identity(a.rows(), a.rows());
  return r * a.transpose() * gram.inverse();
}

// trace(E[(W A h + W w - h)(...)^H]) / dim, expanded directly.
inline double mse(const CMat& w, const CMat& r, const CMat& a, double sigma2) {
  const CMat e = w * a - CMat::Identity(r.rows(), r.cols());
  const CMat cov = e * r * e.adjoint() + sigma2 * w * w.adjoint();
  return cov.trace().real() / static_cast<double>(r.rows());
}

inline CMat random_cmat(std::mt19937_64& gen, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> nd;
  CMat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = cplx(nd(gen), nd(gen));
  return m;
}

inline CMat random_psd(std::mt19937_64& gen, Eigen::Index n) {
  const CMat g = random_cmat(gen, n, n);
  CMat r = g * g.adjoint();
  // unit diagonal
  const RVec d = r.diagonal().real().cwiseSqrt().cwiseInverse();
  r = d.asDiagonal() * r * d.asDiagonal();
  return (r + r.adjoint()) / 2.0;
}

inline double rel_fro(const CMat& a, const CMat& b) { return (a - b).norm() / b.norm(); }

}  // namespace ce3d::oracle
