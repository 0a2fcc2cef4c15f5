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

#include "ce3d/channel_sim.hpp"

#include <cmath>
#include <numbers>

#include "ce3d/errors.hpp"
#include "ce3d/rng.hpp"

namespace ce3d {

ChannelSampler::ChannelSampler(const CorrelationSet& corr)
    : grid_(corr.grid()),
      l_s_(kron(psd_sqrt(corr.r_s_rx()), psd_sqrt(corr.r_s_tx()))),
      l_t_(psd_sqrt(corr.r_t())),
      l_f_(psd_sqrt(corr.r_f())) {}

ChannelRealization ChannelSampler::draw(std::uint64_t seed) const {
  ChannelRealization out{CVec(), seed, grid_};
  draw_into(seed, out.h);
  return out;
}

void ChannelSampler::draw_into(std::uint64_t seed, CVec& h) const {
  const int nc = grid_.n_subcarriers;
  const int ns = grid_.n_symbols;
  const int n = grid_.res_per_pair();
  const int pairs = grid_.n_pairs();
  CounterRng rng(seed);

  // Time-frequency colouring per pair: X = L_f G L_t^T with G an N_c x N_s block.
  CMat tf(n, pairs);
  CMat g(nc, ns);
  for (int p = 0; p < pairs; ++p) {
    for (int t = 0; t < ns; ++t) {
      for (int f = 0; f < nc; ++f) g(f, t) = rng.complex_normal();
    }
    const CMat x = l_f_ * g * l_t_.transpose();
    tf.col(p) = Eigen::Map<const CVec>(x.data(), n);
  }
  // Spatial colouring across pair columns.
  const CMat mixed = tf * l_s_.transpose();
  h.resize(grid_.total_res());
  for (int p = 0; p < pairs; ++p) h.segment(static_cast<Eigen::Index>(p) * n, n) = mixed.col(p);
}

ChannelRealization draw_channel(const CorrelationSet& corr, std::uint64_t seed) {
  return ChannelSampler(corr).draw(seed);
}

std::vector<CVec> generate_pilots(const DmrsPattern& pattern, std::uint64_t seed) {
  CounterRng rng(seed);
  const double a = std::numbers::sqrt2 / 2.0;
  std::vector<CVec> out;
  for (int port = 0; port < pattern.n_ports(); ++port) {
    CVec p(pattern.pilots_per_port());
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      const std::uint64_t bits = rng.next_u64();
      p(i) = cplx((bits & 1U) ? -a : a, (bits & 2U) ? -a : a);
    }
    out.push_back(std::move(p));
  }
  return out;
}

PilotObservation observe(const ChannelRealization& chan, const std::vector<CVec>& pilots,
                         const DmrsPattern& pattern, double noise_power, std::uint64_t seed) {
  if (!(noise_power >= 0.0)) throw DomainError("noise power must be nonnegative");
  const GridConfig& grid = chan.grid;
  if (chan.h.size() != grid.total_res()) throw DimensionError("channel length does not match its grid");
  if (static_cast<int>(pilots.size()) != grid.n_tx) throw DimensionError("one pilot vector per port required");

  const int per_port = pattern.pilots_per_port();
  const int n = grid.res_per_pair();
  const double sigma = std::sqrt(noise_power);
  CounterRng rng(seed);

  PilotObservation obs{CVec(static_cast<Eigen::Index>(per_port) * grid.n_pairs()), pilots, noise_power, grid.n_rx,
                       grid.n_tx};
  for (int m = 0; m < grid.n_rx; ++m) {
    for (int t = 0; t < grid.n_tx; ++t) {
      const auto& res = pattern.port_res(t);
      const auto& p = pilots[static_cast<std::size_t>(t)];
      if (p.size() != per_port) throw DimensionError("pilot vector length differs from K N_p");
      const int pair = grid.pair_index(m, t);
      for (int r = 0; r < per_port; ++r) {
        const auto& re = res[static_cast<std::size_t>(r)];
        const cplx hv = chan.h(static_cast<Eigen::Index>(pair) * n + grid.re_index(re.symbol, re.subcarrier));
        cplx w{0.0, 0.0};
        if (sigma > 0.0) w = sigma * rng.complex_normal();
        obs.y(static_cast<Eigen::Index>(pair) * per_port + r) = p(r) * hv + w;
      }
    }
  }
  return obs;
}

CVec ls_estimate(const PilotObservation& obs) {
  const auto n_tx = static_cast<std::size_t>(obs.n_tx);
  if (obs.pilot_diagonals.size() != n_tx || n_tx == 0) throw DimensionError("observation has no pilot diagonals");
  const Eigen::Index per_port = obs.pilot_diagonals.front().size();
  if (obs.y.size() != per_port * obs.n_rx * obs.n_tx) throw DimensionError("observation length mismatch");

  CVec out(obs.y.size());
  for (int m = 0; m < obs.n_rx; ++m) {
    for (int t = 0; t < obs.n_tx; ++t) {
      const auto& p = obs.pilot_diagonals[static_cast<std::size_t>(t)];
      const Eigen::Index base = (static_cast<Eigen::Index>(m) * obs.n_tx + t) * per_port;
      for (Eigen::Index r = 0; r < per_port; ++r) {
        const double mag2 = std::norm(p(r));
        if (mag2 == 0.0) throw DomainError("zero pilot symbol at port " + std::to_string(t));
        out(base + r) = std::conj(p(r)) * obs.y(base + r) / mag2;
      }
    }
  }
  return out;
}

}  // namespace ce3d
