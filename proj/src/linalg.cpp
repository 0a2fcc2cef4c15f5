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

#include "ce3d/linalg.hpp"

#include <string>

#include "ce3d/errors.hpp"

namespace ce3d {

CMat hermitian_right_solve(const CMat& cross, const CMat& gram, double sigma2, bool* regularized) {
  if (gram.rows() != gram.cols() || cross.cols() != gram.rows()) {
    throw DimensionError("hermitian_right_solve: cross is " + std::to_string(cross.rows()) + "x" +
                         std::to_string(cross.cols()) + ", gram is " + std::to_string(gram.rows()) + "x" +
                         std::to_string(gram.cols()));
  }
  CMat loaded = gram;
  loaded.diagonal().array() += sigma2;

  bool jittered = false;
  Eigen::LLT<CMat> llt(loaded);
  if (llt.info() != Eigen::Success || llt.rcond() < 1e-14) {
    loaded.diagonal().array() += kSolveJitter;
    llt.compute(loaded);
    jittered = true;
    if (llt.info() != Eigen::Success) {
      throw DecompositionError("Gram matrix is not positive semidefinite (Cholesky failed after jitter)");
    }
  }
  if (regularized != nullptr) *regularized = jittered;
  // W G = C  <=>  G W^H = C^H  (G Hermitian)
  CMat rhs = cross.adjoint();
  return llt.solve(rhs).adjoint();
}

double min_eigenvalue(const CMat& m) {
  Eigen::SelfAdjointEigenSolver<CMat> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

CMat psd_sqrt(const CMat& m, double tol) {
  Eigen::SelfAdjointEigenSolver<CMat> es(m);
  if (es.info() != Eigen::Success) throw DecompositionError("eigendecomposition failed");
  RVec ev = es.eigenvalues();
  if (ev.minCoeff() < -tol) {
    throw DecompositionError("matrix is not PSD: min eigenvalue " + std::to_string(ev.minCoeff()));
  }
  ev = ev.cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal();
}

}  // namespace ce3d
