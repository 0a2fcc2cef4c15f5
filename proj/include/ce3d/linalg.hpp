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

#pragma once

#include <complex>

#include <Eigen/Dense>

namespace ce3d {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

// Diagonal loading applied when a Gram matrix is not numerically positive definite.
inline constexpr double kSolveJitter = 1e-10;

template <typename A, typename B>
auto kron(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  using Scalar = typename Eigen::ScalarBinaryOpTraits<typename A::Scalar, typename B::Scalar>::ReturnType;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// Returns cross * (gram + sigma2 I)^-1 for Hermitian PSD `gram`, using a Cholesky
// solve. Falls back to kSolveJitter diagonal loading when the factorization fails
// or is numerically singular; `regularized` reports whether that happened.
CMat hermitian_right_solve(const CMat& cross, const CMat& gram, double sigma2, bool* regularized = nullptr);

// Smallest eigenvalue of a Hermitian matrix.
double min_eigenvalue(const CMat& m);

// Hermitian square root factor L with L L^H = m, via eigendecomposition.
// Eigenvalues in [-tol, 0) are clamped to zero; anything more negative throws.
CMat psd_sqrt(const CMat& m, double tol = 1e-10);

}  // namespace ce3d
