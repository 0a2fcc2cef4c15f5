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

#include <compare>
#include <string>
#include <utility>
#include <vector>

#include "ce3d/linalg.hpp"

namespace ce3d {

/// Resource grid geometry of one subframe and the antenna configuration.
///
/// Vectorization used throughout the library:
///   * one antenna pair: RE index = symbol * n_subcarriers + subcarrier
///     (frequency fastest, i.e. vec of an N_c x N_s matrix);
///   * antenna pairs: pair index = rx * n_tx + tx (transmit fastest);
///   * stacked channel: pair index * res_per_pair() + RE index.
struct GridConfig {
  int n_subcarriers = 12;
  int n_symbols = 14;
  int n_rx = 2;
  int n_tx = 2;
  double subcarrier_spacing_hz = 15e3;
  double symbol_duration_s = 1e-3 / 14.0;

  int res_per_pair() const { return n_subcarriers * n_symbols; }
  int n_pairs() const { return n_rx * n_tx; }
  int total_res() const { return res_per_pair() * n_pairs(); }

  int re_index(int symbol, int subcarrier) const { return symbol * n_subcarriers + subcarrier; }
  int pair_index(int rx, int tx) const { return rx * n_tx + tx; }

  // OFDM symbol start times, t_i = i * symbol_duration_s.
  std::vector<double> symbol_times() const;

  // Throws ConfigError.
  void validate() const;

  bool operator==(const GridConfig&) const = default;
};

struct ResourceElement {
  int symbol = 0;
  int subcarrier = 0;
  auto operator<=>(const ResourceElement&) const = default;
};

/// Per-port DMRS placement. Pilot REs of each port are kept sorted symbol-major
/// (symbol, then subcarrier), which is also the row order of its selection matrix.
class DmrsPattern {
 public:
  // `shared` patterns let every port reuse the same REs (ports separated by
  // code rather than frequency); otherwise ports must be disjoint per RE.
  DmrsPattern(const GridConfig& grid, std::vector<int> dmrs_symbols,
              std::vector<std::vector<ResourceElement>> per_port_res, bool shared = false);

  int n_ports() const { return static_cast<int>(per_port_.size()); }
  const std::vector<int>& dmrs_symbols() const { return dmrs_symbols_; }
  int n_dmrs_symbols() const { return static_cast<int>(dmrs_symbols_.size()); }
  const std::vector<ResourceElement>& port_res(int port) const;
  bool shared() const { return shared_; }

  // K * N_p, identical for every port.
  int pilots_per_port() const { return pilots_per_port_; }
  // N_p when every DMRS symbol carries the same count, otherwise -1.
  int pilots_per_symbol() const;
  // N - K N_p: REs of one antenna pair that must be interpolated.
  int data_res_per_port() const { return n_res_ - pilots_per_port_; }
  // Distinct pilot-bearing REs over all ports, and the remaining data REs.
  int pilot_res_total() const;
  int data_res_total() const { return n_res_ - pilot_res_total(); }

  // True when the port's pilot set is (DMRS symbols) x (one subcarrier set).
  bool is_separable(int port) const;
  bool all_ports_identical() const;

 private:
  std::vector<int> dmrs_symbols_;
  std::vector<std::vector<ResourceElement>> per_port_;
  bool shared_ = false;
  int pilots_per_port_ = 0;
  int n_res_ = 0;
};

// Evenly spread DMRS symbols, floor((i + 1/2) N_s / K); gives {3, 10} for N_s = 14, K = 2.
std::vector<int> default_dmrs_symbols(int n_symbols, int k_dmrs_symbols);

/// Comb pattern: port n occupies subcarriers n + s * (N_c / N_p), s < N_p, in every
/// DMRS symbol, so every port's set is a cyclic frequency shift of port 0's.
DmrsPattern build_default_pattern(const GridConfig& grid, int k_dmrs_symbols, int n_p_per_symbol);
DmrsPattern build_default_pattern(const GridConfig& grid, std::vector<int> dmrs_symbols, int n_p_per_symbol);

/// All ports share port 0's comb.
DmrsPattern build_shared_pattern(const GridConfig& grid, std::vector<int> dmrs_symbols, int n_p_per_symbol);

/// Comb whose offset advances by `stagger` subcarriers on each successive DMRS
/// symbol. Not separable for stagger % stride != 0.
DmrsPattern build_staggered_pattern(const GridConfig& grid, std::vector<int> dmrs_symbols, int n_p_per_symbol,
                                    int stagger);

/// 0/1 matrix with a single one per row, stored as the row -> column map.
class SelectionMatrix {
 public:
  SelectionMatrix() = default;
  // Throws DimensionError if a column is out of range or repeated.
  SelectionMatrix(int cols, std::vector<int> row_to_col);

  static SelectionMatrix identity(int n);

  int rows() const { return static_cast<int>(row_to_col_.size()); }
  int cols() const { return cols_; }
  int col_of(int row) const { return row_to_col_[static_cast<std::size_t>(row)]; }
  const std::vector<int>& row_to_col() const { return row_to_col_; }

  RMat dense() const;

  // A x
  CVec select(const CVec& x) const;
  // A^T y
  CVec scatter(const CVec& y) const;
  // A M A^T
  CMat restrict(const CMat& m) const;
  // M A^T
  CMat take_columns(const CMat& m) const;

  // A A^T = I, checked combinatorially.
  bool rows_orthonormal() const;

  bool operator==(const SelectionMatrix&) const = default;

 private:
  int cols_ = 0;
  std::vector<int> row_to_col_;
};

SelectionMatrix kron(const SelectionMatrix& a, const SelectionMatrix& b);

/// A_n: (K N_p) x N, selecting port `port`'s pilots from one antenna pair's grid.
SelectionMatrix selection_matrix_port(const DmrsPattern& pattern, int port, const GridConfig& grid);

/// A = I_{N_r} (x) Diag[A_1, ..., A_{N_t}].
SelectionMatrix selection_matrix_full(const DmrsPattern& pattern, const GridConfig& grid);

/// (A_nt, A_nf) of sizes K x N_s and N_p x N_c with A_n = A_nt (x) A_nf.
/// Throws SeparabilityError for non-separable ports.
std::pair<SelectionMatrix, SelectionMatrix> selection_matrices_1d(const DmrsPattern& pattern, int port,
                                                                  const GridConfig& grid);

/// One text row per subcarrier (0 on top), one column per symbol. Pilot REs
/// show the owning port digit ('*' when several ports share the RE), data REs '.'.
std::string render_ascii(const DmrsPattern& pattern, const GridConfig& grid);

}  // namespace ce3d
