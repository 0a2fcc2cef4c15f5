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

#include <span>
#include <string>
#include <vector>

#include "ce3d/grid.hpp"
#include "ce3d/linalg.hpp"

namespace ce3d {

struct SpatialCorrConfig {
  double alpha_tx = 0.0;
  double alpha_rx = 0.0;
};

struct DopplerConfig {
  double max_doppler_hz = 0.0;
};

/// Tapped power delay profile. Powers are linear.
struct PowerDelayProfile {
  std::string name;
  std::vector<double> delays_s;
  std::vector<double> powers;

  static PowerDelayProfile from_db(std::string name, std::span<const double> delays_ns,
                                   std::span<const double> powers_db);

  double total_power() const;
  // Copy with powers scaled to sum to one.
  PowerDelayProfile normalized() const;
  // Throws ConfigError on empty / mismatched / negative / decreasing entries.
  void validate() const;
};

/// Reads the preset file format:
///
///   # comment
///   profile ETU
///     0     -1.0        <- delay in ns, power in dB
///     50    -1.0
///   end
std::vector<PowerDelayProfile> load_pdp_presets(const std::string& path);
PowerDelayProfile find_pdp_preset(const std::string& path, const std::string& name);
// Presets shipped with the library (data/pdp_presets.txt).
std::string default_preset_path();

/// Exponential correlation, entries alpha^|i-j|. Throws DomainError unless 0 <= alpha < 1.
RMat spatial_corr(double alpha, int n);

/// Jakes time correlation, R[i][j] = J0(2 pi f_d |t_i - t_j|). Times must be strictly increasing.
RMat time_corr(const DopplerConfig& doppler, std::span<const double> symbol_times);

/// Frequency correlation, R[i][j] = sum_l p_l exp(-j 2 pi tau_l (i - j) df).
///
/// The imaginary unit in the exponent is required: the frequency correlation is the
/// Fourier transform of the delay profile, and a real decaying exponential would
/// not be a valid (PSD) correlation function. Unnormalized profiles are normalized
/// with a note on stderr.
CMat freq_corr(const PowerDelayProfile& pdp, double subcarrier_spacing_hz, int n_c);

struct CorrelationFactors {
  CMat r_s_rx;
  CMat r_s_tx;
  CMat r_t;  // all N_s symbols
  CMat r_f;
};

/// R_3D = (R_s,r (x) R_s,t) (x) (R_t (x) R_f), never stored densely unless asked for.
class CorrelationSet {
 public:
  // Validates dimensions against the grid, enforces exact Hermitian symmetry and
  // checks PSD. A factor with a negative eigenvalue gets a 1e-12 diagonal jitter;
  // if that is not enough (min eigenvalue < -1e-10) DecompositionError is thrown.
  static CorrelationSet assemble(CorrelationFactors factors, const GridConfig& grid);

  const CMat& r_s_rx() const { return f_.r_s_rx; }
  const CMat& r_s_tx() const { return f_.r_s_tx; }
  const CMat& r_t() const { return f_.r_t; }
  const CMat& r_f() const { return f_.r_f; }
  const CMat& r_s() const { return r_s_; }
  const CMat& r_tf() const { return r_tf_; }
  const GridConfig& grid() const { return grid_; }

  // Dense R_3D, size (N N_r N_t)^2.
  CMat r_3d() const;
  cplx entry(Eigen::Index i, Eigen::Index j) const;
  Eigen::Index dim() const { return r_s_.rows() * r_tf_.rows(); }
  double trace() const;

  // R_3D A^T and A R_3D A^T without forming R_3D.
  CMat cross(const SelectionMatrix& sel) const;
  CMat gram(const SelectionMatrix& sel) const;

  // K x K time correlation between the given (DMRS) symbols.
  CMat r_t_restricted(std::span<const int> symbols) const;

  bool unit_diagonal(double tol = 1e-11) const;
  bool jittered() const { return jittered_; }

 private:
  CorrelationSet() = default;

  CorrelationFactors f_;
  CMat r_s_;
  CMat r_tf_;
  GridConfig grid_;
  bool jittered_ = false;
};

CorrelationSet build_correlation(const GridConfig& grid, const SpatialCorrConfig& spatial,
                                 const DopplerConfig& doppler, const PowerDelayProfile& pdp);

}  // namespace ce3d
