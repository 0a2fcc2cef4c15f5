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

namespace ce3d {

/// Bessel function of the first kind, order zero.
///
/// Minimax rational approximations on (0, 4] and (4, 8] written around the first
/// two zeros, and the Hankel asymptotic form with rational P0/Q0 beyond 8.
/// Absolute error is below 1e-15 on |x| <= 50. Throws DomainError for non-finite x.
double bessel_j0(double x);

}  // namespace ce3d
