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

#include <cstdint>
#include <vector>

#include "ce3d/correlation.hpp"
#include "ce3d/grid.hpp"
#include "ce3d/linalg.hpp"

namespace ce3d {

struct ChannelRealization {
  CVec h;  // stacked per GridConfig's vectorization, length N N_r N_t
  std::uint64_t seed = 0;
  GridConfig grid;
};

struct PilotObservation {
  CVec y;                              // (rx, tx, pilot) stacking, length K N_p N_r N_t
  std::vector<CVec> pilot_diagonals;   // diag(P_n) per port
  double noise_power = 0.0;
  int n_rx = 0;
  int n_tx = 0;
};

/// Draws h = (L_rx (x) L_tx (x) L_t (x) L_f) g with i.i.d. CN(0,1) g, applying each
/// square-root factor along its own axis. Square roots are computed once.
class ChannelSampler {
 public:
  explicit ChannelSampler(const CorrelationSet& corr);

  ChannelRealization draw(std::uint64_t seed) const;
  // Same as draw() but writes into `h`, reusing its storage.
  void draw_into(std::uint64_t seed, CVec& h) const;

 private:
  GridConfig grid_;
  CMat l_s_;  // L_rx (x) L_tx
  CMat l_t_;
  CMat l_f_;
};

ChannelRealization draw_channel(const CorrelationSet& corr, std::uint64_t seed);

/// Per-port unit-modulus QPSK pilots {(+-1 +- j)/sqrt 2}, K N_p per port.
std::vector<CVec> generate_pilots(const DmrsPattern& pattern, std::uint64_t seed);

/// y_{m,n} = P_n A_n h_{m,n} + w_{m,n}, w ~ CN(0, noise_power I). Throws DomainError
/// for negative noise power.
PilotObservation observe(const ChannelRealization& chan, const std::vector<CVec>& pilots,
                         const DmrsPattern& pattern, double noise_power, std::uint64_t seed);

/// (P_n^H P_n)^-1 P_n^H y_{m,n} for every antenna pair. Throws DomainError on a zero pilot.
CVec ls_estimate(const PilotObservation& obs);

}  // namespace ce3d
