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

#include "ce3d/correlation.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <numeric>
#include <sstream>

#include "ce3d/bessel.hpp"
#include "ce3d/errors.hpp"

namespace ce3d {

PowerDelayProfile PowerDelayProfile::from_db(std::string name, std::span<const double> delays_ns,
                                             std::span<const double> powers_db) {
  if (delays_ns.size() != powers_db.size()) {
    throw ConfigError("profile " + name + ": delay and power lists differ in length");
  }
  PowerDelayProfile pdp{std::move(name), {}, {}};
  for (std::size_t i = 0; i < delays_ns.size(); ++i) {
    pdp.delays_s.push_back(delays_ns[i] * 1e-9);
    pdp.powers.push_back(std::pow(10.0, powers_db[i] / 10.0));
  }
  pdp.validate();
  return pdp;
}

double PowerDelayProfile::total_power() const { return std::accumulate(powers.begin(), powers.end(), 0.0); }

PowerDelayProfile PowerDelayProfile::normalized() const {
  validate();
  PowerDelayProfile out = *this;
  const double total = total_power();
  for (double& p : out.powers) p /= total;
  return out;
}

void PowerDelayProfile::validate() const {
  if (delays_s.empty() || delays_s.size() != powers.size()) {
    throw ConfigError("profile '" + name + "' needs at least one tap and matching delay/power lists");
  }
  for (std::size_t i = 0; i < delays_s.size(); ++i) {
    if (!(delays_s[i] >= 0.0) || !(powers[i] >= 0.0)) {
      throw ConfigError("profile '" + name + "': delays and powers must be nonnegative");
    }
    if (i > 0 && delays_s[i] < delays_s[i - 1]) {
      throw ConfigError("profile '" + name + "': delays must be nondecreasing");
    }
  }
  if (!(total_power() > 0.0)) throw ConfigError("profile '" + name + "' has zero total power");
}

std::vector<PowerDelayProfile> load_pdp_presets(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open power delay profile presets: " + path);

  std::vector<PowerDelayProfile> out;
  std::string line;
  int line_no = 0;
  bool inside = false;
  std::string name;
  std::vector<double> delays_ns, powers_db;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    const auto where = path + ":" + std::to_string(line_no);
    if (first == "profile") {
      if (inside) throw ConfigError(where + ": nested 'profile'");
      if (!(ls >> name)) throw ConfigError(where + ": profile needs a name");
      inside = true;
      delays_ns.clear();
      powers_db.clear();
    } else if (first == "end") {
      if (!inside) throw ConfigError(where + ": 'end' without 'profile'");
      out.push_back(PowerDelayProfile::from_db(name, delays_ns, powers_db));
      inside = false;
    } else {
      if (!inside) throw ConfigError(where + ": tap outside a profile block");
      double power_db = 0.0;
      try {
        delays_ns.push_back(std::stod(first));
      } catch (const std::exception&) {
        throw ConfigError(where + ": bad delay '" + first + "'");
      }
      if (!(ls >> power_db)) throw ConfigError(where + ": expected '<delay_ns> <power_db>'");
      powers_db.push_back(power_db);
    }
  }
  if (inside) throw ConfigError(path + ": profile '" + name + "' is missing 'end'");
  return out;
}

PowerDelayProfile find_pdp_preset(const std::string& path, const std::string& name) {
  for (auto& p : load_pdp_presets(path)) {
    if (p.name == name) return p;
  }
  throw ConfigError("no power delay profile named '" + name + "' in " + path);
}

std::string default_preset_path() { return std::string(CE3D_DATA_DIR) + "/pdp_presets.txt"; }

RMat spatial_corr(double alpha, int n) {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw DomainError("spatial correlation alpha must lie in [0, 1), got " + std::to_string(alpha));
  }
  if (n < 1) throw DomainError("spatial correlation size must be >= 1");
  RMat r(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) r(i, j) = std::pow(alpha, std::abs(i - j));
  }
  return r;
}

RMat time_corr(const DopplerConfig& doppler, std::span<const double> symbol_times) {
  if (!(doppler.max_doppler_hz >= 0.0)) throw DomainError("max Doppler must be nonnegative");
  for (std::size_t i = 1; i < symbol_times.size(); ++i) {
    if (!(symbol_times[i] > symbol_times[i - 1])) throw DomainError("symbol times must be strictly increasing");
  }
  const auto n = static_cast<Eigen::Index>(symbol_times.size());
  RMat r(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    r(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double dt = symbol_times[static_cast<std::size_t>(i)] - symbol_times[static_cast<std::size_t>(j)];
      r(i, j) = r(j, i) = bessel_j0(2.0 * std::numbers::pi * doppler.max_doppler_hz * dt);
    }
  }
  return r;
}

CMat freq_corr(const PowerDelayProfile& pdp, double subcarrier_spacing_hz, int n_c) {
  if (n_c < 1) throw DomainError("frequency correlation size must be >= 1");
  pdp.validate();
  PowerDelayProfile p = pdp;
  if (std::abs(p.total_power() - 1.0) > 1e-12) {
    std::clog << "[ce3d] note: power delay profile '" << p.name << "' has total power " << p.total_power()
              << "; normalizing to 1\n";
    p = p.normalized();
  }
  // Toeplitz: only the lag matters.
  std::vector<cplx> lag(static_cast<std::size_t>(n_c));
  for (int k = 0; k < n_c; ++k) {
    cplx acc{0.0, 0.0};
    for (std::size_t l = 0; l < p.delays_s.size(); ++l) {
      acc += p.powers[l] * std::polar(1.0, -2.0 * std::numbers::pi * p.delays_s[l] * k * subcarrier_spacing_hz);
    }
    lag[static_cast<std::size_t>(k)] = acc;
  }
  CMat r(n_c, n_c);
  for (int i = 0; i < n_c; ++i) {
    r(i, i) = cplx(1.0, 0.0);
    for (int j = 0; j < i; ++j) {
      r(i, j) = lag[static_cast<std::size_t>(i - j)];
      r(j, i) = std::conj(r(i, j));
    }
  }
  return r;
}

namespace {

void check_square(const CMat& m, Eigen::Index n, const char* what) {
  if (m.rows() != n || m.cols() != n) {
    throw DimensionError(std::string(what) + " is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                         ", grid needs " + std::to_string(n) + "x" + std::to_string(n));
  }
}

// Exact Hermitian symmetrization plus the PSD guard.
bool condition_factor(CMat& m, const char* what) {
  m = (0.5 * (m + m.adjoint())).eval();
  for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, i) = cplx(m(i, i).real(), 0.0);
  if (min_eigenvalue(m) >= 0.0) return false;
  m.diagonal().array() += 1e-12;
  if (const double ev = min_eigenvalue(m); ev < -1e-10) {
    throw DecompositionError(std::string(what) + " is not PSD (min eigenvalue " + std::to_string(ev) + ")");
  }
  return true;
}

}  // namespace

CorrelationSet CorrelationSet::assemble(CorrelationFactors factors, const GridConfig& grid) {
  grid.validate();
  check_square(factors.r_s_rx, grid.n_rx, "R_s,rx");
  check_square(factors.r_s_tx, grid.n_tx, "R_s,tx");
  check_square(factors.r_t, grid.n_symbols, "R_t");
  check_square(factors.r_f, grid.n_subcarriers, "R_f");

  CorrelationSet cs;
  cs.jittered_ |= condition_factor(factors.r_s_rx, "R_s,rx");
  cs.jittered_ |= condition_factor(factors.r_s_tx, "R_s,tx");
  cs.jittered_ |= condition_factor(factors.r_t, "R_t");
  cs.jittered_ |= condition_factor(factors.r_f, "R_f");
  cs.f_ = std::move(factors);
  cs.grid_ = grid;
  cs.r_s_ = kron(cs.f_.r_s_rx, cs.f_.r_s_tx);
  cs.r_tf_ = kron(cs.f_.r_t, cs.f_.r_f);
  return cs;
}

CMat CorrelationSet::r_3d() const { return kron(r_s_, r_tf_); }

cplx CorrelationSet::entry(Eigen::Index i, Eigen::Index j) const {
  const Eigen::Index n = r_tf_.rows();
  return r_s_(i / n, j / n) * r_tf_(i % n, j % n);
}

double CorrelationSet::trace() const { return r_s_.trace().real() * r_tf_.trace().real(); }

CMat CorrelationSet::cross(const SelectionMatrix& sel) const {
  if (sel.cols() != dim()) throw DimensionError("selection does not match the stacked channel length");
  CMat out(dim(), sel.rows());
  for (int r = 0; r < sel.rows(); ++r) {
    const Eigen::Index c = sel.col_of(r);
    for (Eigen::Index i = 0; i < dim(); ++i) out(i, r) = entry(i, c);
  }
  return out;
}

CMat CorrelationSet::gram(const SelectionMatrix& sel) const {
  if (sel.cols() != dim()) throw DimensionError("selection does not match the stacked channel length");
  CMat out(sel.rows(), sel.rows());
  for (int a = 0; a < sel.rows(); ++a) {
    for (int b = 0; b < sel.rows(); ++b) out(a, b) = entry(sel.col_of(a), sel.col_of(b));
  }
  return out;
}

CMat CorrelationSet::r_t_restricted(std::span<const int> symbols) const {
  const auto k = static_cast<Eigen::Index>(symbols.size());
  CMat out(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) {
      out(a, b) = f_.r_t(symbols[static_cast<std::size_t>(a)], symbols[static_cast<std::size_t>(b)]);
    }
  }
  return out;
}

bool CorrelationSet::unit_diagonal(double tol) const {
  auto unit = [tol](const CMat& m) { return (m.diagonal().array() - cplx(1.0, 0.0)).abs().maxCoeff() <= tol; };
  return unit(f_.r_s_rx) && unit(f_.r_s_tx) && unit(f_.r_t) && unit(f_.r_f);
}

CorrelationSet build_correlation(const GridConfig& grid, const SpatialCorrConfig& spatial,
                                 const DopplerConfig& doppler, const PowerDelayProfile& pdp) {
  grid.validate();
  const auto times = grid.symbol_times();
  CorrelationFactors f{
      spatial_corr(spatial.alpha_rx, grid.n_rx).cast<cplx>(),
      spatial_corr(spatial.alpha_tx, grid.n_tx).cast<cplx>(),
      time_corr(doppler, times).cast<cplx>(),
      freq_corr(pdp, grid.subcarrier_spacing_hz, grid.n_subcarriers),
  };
  return CorrelationSet::assemble(std::move(f), grid);
}

}  // namespace ce3d
