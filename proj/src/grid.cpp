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

#include "ce3d/grid.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "ce3d/errors.hpp"

namespace ce3d {

std::vector<double> GridConfig::symbol_times() const {
  std::vector<double> t(static_cast<std::size_t>(n_symbols));
  for (int i = 0; i < n_symbols; ++i) t[static_cast<std::size_t>(i)] = i * symbol_duration_s;
  return t;
}

void GridConfig::validate() const {
  if (n_subcarriers < 1 || n_symbols < 1 || n_rx < 1 || n_tx < 1) {
    throw ConfigError("grid dimensions must be >= 1 (n_subcarriers=" + std::to_string(n_subcarriers) +
                      ", n_symbols=" + std::to_string(n_symbols) + ", n_rx=" + std::to_string(n_rx) +
                      ", n_tx=" + std::to_string(n_tx) + ")");
  }
  if (!(subcarrier_spacing_hz > 0.0) || !(symbol_duration_s > 0.0)) {
    throw ConfigError("subcarrier_spacing_hz and symbol_duration_s must be positive");
  }
}

DmrsPattern::DmrsPattern(const GridConfig& grid, std::vector<int> dmrs_symbols,
                         std::vector<std::vector<ResourceElement>> per_port_res, bool shared)
    : dmrs_symbols_(std::move(dmrs_symbols)), per_port_(std::move(per_port_res)), shared_(shared) {
  grid.validate();
  n_res_ = grid.res_per_pair();
  if (static_cast<int>(per_port_.size()) != grid.n_tx) {
    throw ConfigError("pattern defines " + std::to_string(per_port_.size()) + " ports, grid has n_tx=" +
                      std::to_string(grid.n_tx));
  }
  if (dmrs_symbols_.empty()) throw ConfigError("pattern needs at least one DMRS symbol");
  if (!std::is_sorted(dmrs_symbols_.begin(), dmrs_symbols_.end()) ||
      std::adjacent_find(dmrs_symbols_.begin(), dmrs_symbols_.end()) != dmrs_symbols_.end()) {
    throw ConfigError("DMRS symbol indices must be strictly increasing");
  }
  if (dmrs_symbols_.front() < 0 || dmrs_symbols_.back() >= grid.n_symbols) {
    throw ConfigError("DMRS symbol index outside [0, n_symbols)");
  }
  const std::set<int> symbol_set(dmrs_symbols_.begin(), dmrs_symbols_.end());

  std::set<ResourceElement> used;
  for (std::size_t port = 0; port < per_port_.size(); ++port) {
    auto& res = per_port_[port];
    std::sort(res.begin(), res.end());
    if (std::adjacent_find(res.begin(), res.end()) != res.end()) {
      throw ConfigError("port " + std::to_string(port) + " lists a pilot RE twice");
    }
    for (const auto& re : res) {
      if (re.subcarrier < 0 || re.subcarrier >= grid.n_subcarriers || !symbol_set.contains(re.symbol)) {
        throw ConfigError("port " + std::to_string(port) + " pilot (" + std::to_string(re.symbol) + "," +
                          std::to_string(re.subcarrier) + ") is not on a DMRS symbol of the grid");
      }
    }
    if (port == 0) {
      pilots_per_port_ = static_cast<int>(res.size());
      if (pilots_per_port_ == 0) throw ConfigError("port 0 has no pilots");
    } else if (static_cast<int>(res.size()) != pilots_per_port_) {
      throw ConfigError("all ports must carry the same number of pilots");
    }
    if (!shared_) {
      for (const auto& re : res) {
        if (!used.insert(re).second) {
          throw ConfigError("pilot REs of distinct ports overlap at (" + std::to_string(re.symbol) + "," +
                            std::to_string(re.subcarrier) + ")");
        }
      }
    }
  }
}

const std::vector<ResourceElement>& DmrsPattern::port_res(int port) const {
  if (port < 0 || port >= n_ports()) throw DimensionError("port " + std::to_string(port) + " out of range");
  return per_port_[static_cast<std::size_t>(port)];
}

int DmrsPattern::pilots_per_symbol() const {
  int common = -1;
  for (const auto& res : per_port_) {
    for (int sym : dmrs_symbols_) {
      const auto count = static_cast<int>(
          std::count_if(res.begin(), res.end(), [sym](const ResourceElement& re) { return re.symbol == sym; }));
      if (common < 0) {
        common = count;
      } else if (count != common) {
        return -1;
      }
    }
  }
  return common;
}

int DmrsPattern::pilot_res_total() const {
  std::set<ResourceElement> all;
  for (const auto& res : per_port_) all.insert(res.begin(), res.end());
  return static_cast<int>(all.size());
}

bool DmrsPattern::is_separable(int port) const {
  const auto& res = port_res(port);
  std::set<int> subcarriers;
  for (const auto& re : res) {
    if (re.symbol == dmrs_symbols_.front()) subcarriers.insert(re.subcarrier);
  }
  if (subcarriers.size() * dmrs_symbols_.size() != res.size()) return false;
  std::set<ResourceElement> have(res.begin(), res.end());
  for (int sym : dmrs_symbols_) {
    for (int sc : subcarriers) {
      if (!have.contains({sym, sc})) return false;
    }
  }
  return true;
}

bool DmrsPattern::all_ports_identical() const {
  return std::all_of(per_port_.begin(), per_port_.end(), [this](const auto& r) { return r == per_port_.front(); });
}

std::vector<int> default_dmrs_symbols(int n_symbols, int k_dmrs_symbols) {
  if (k_dmrs_symbols < 1 || k_dmrs_symbols > n_symbols) {
    throw ConfigError("need 1 <= K <= n_symbols, got K=" + std::to_string(k_dmrs_symbols));
  }
  std::vector<int> out;
  for (int i = 0; i < k_dmrs_symbols; ++i) {
    out.push_back(static_cast<int>((2 * i + 1) * n_symbols / (2 * k_dmrs_symbols)));
  }
  return out;
}

namespace {

int comb_stride(const GridConfig& grid, int n_p, int n_ports) {
  if (n_p < 1) throw ConfigError("pilots_per_symbol must be >= 1");
  if (n_p * n_ports > grid.n_subcarriers) {
    throw ConfigError("pilots exceed subcarriers: pilots_per_symbol * ports = " + std::to_string(n_p * n_ports) +
                      " > n_subcarriers = " + std::to_string(grid.n_subcarriers));
  }
  return grid.n_subcarriers / n_p;
}

DmrsPattern build_comb(const GridConfig& grid, std::vector<int> dmrs_symbols, int n_p, int stagger, bool shared) {
  grid.validate();
  if (static_cast<int>(dmrs_symbols.size()) > grid.n_symbols) {
    throw ConfigError("more DMRS symbols than OFDM symbols");
  }
  const int stride = comb_stride(grid, n_p, shared ? 1 : grid.n_tx);
  std::vector<std::vector<ResourceElement>> ports(static_cast<std::size_t>(grid.n_tx));
  for (int port = 0; port < grid.n_tx; ++port) {
    const int offset = shared ? 0 : port;
    for (std::size_t k = 0; k < dmrs_symbols.size(); ++k) {
      for (int s = 0; s < n_p; ++s) {
        const int sc = (offset + s * stride + static_cast<int>(k) * stagger) % grid.n_subcarriers;
        ports[static_cast<std::size_t>(port)].push_back({dmrs_symbols[k], sc});
      }
    }
  }
  return DmrsPattern(grid, std::move(dmrs_symbols), std::move(ports), shared);
}

}  // namespace

DmrsPattern build_default_pattern(const GridConfig& grid, int k_dmrs_symbols, int n_p_per_symbol) {
  if (k_dmrs_symbols > grid.n_symbols) throw ConfigError("k_dmrs_symbols exceeds n_symbols");
  return build_default_pattern(grid, default_dmrs_symbols(grid.n_symbols, k_dmrs_symbols), n_p_per_symbol);
}

DmrsPattern build_default_pattern(const GridConfig& grid, std::vector<int> dmrs_symbols, int n_p_per_symbol) {
  return build_comb(grid, std::move(dmrs_symbols), n_p_per_symbol, 0, false);
}

DmrsPattern build_shared_pattern(const GridConfig& grid, std::vector<int> dmrs_symbols, int n_p_per_symbol) {
  return build_comb(grid, std::move(dmrs_symbols), n_p_per_symbol, 0, true);
}

DmrsPattern build_staggered_pattern(const GridConfig& grid, std::vector<int> dmrs_symbols, int n_p_per_symbol,
                                    int stagger) {
  return build_comb(grid, std::move(dmrs_symbols), n_p_per_symbol, stagger, false);
}

SelectionMatrix::SelectionMatrix(int cols, std::vector<int> row_to_col) : cols_(cols), row_to_col_(std::move(row_to_col)) {
  std::vector<bool> seen(static_cast<std::size_t>(std::max(cols_, 0)), false);
  for (int c : row_to_col_) {
    if (c < 0 || c >= cols_) throw DimensionError("selection column " + std::to_string(c) + " out of range");
    if (seen[static_cast<std::size_t>(c)]) throw DimensionError("selection column " + std::to_string(c) + " repeated");
    seen[static_cast<std::size_t>(c)] = true;
  }
}

SelectionMatrix SelectionMatrix::identity(int n) {
  std::vector<int> map(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) map[static_cast<std::size_t>(i)] = i;
  return SelectionMatrix(n, std::move(map));
}

RMat SelectionMatrix::dense() const {
  RMat a = RMat::Zero(rows(), cols_);
  for (int r = 0; r < rows(); ++r) a(r, col_of(r)) = 1.0;
  return a;
}

CVec SelectionMatrix::select(const CVec& x) const {
  if (x.size() != cols_) throw DimensionError("select: vector length does not match selection columns");
  CVec out(rows());
  for (int r = 0; r < rows(); ++r) out(r) = x(col_of(r));
  return out;
}

CVec SelectionMatrix::scatter(const CVec& y) const {
  if (y.size() != rows()) throw DimensionError("scatter: vector length does not match selection rows");
  CVec out = CVec::Zero(cols_);
  for (int r = 0; r < rows(); ++r) out(col_of(r)) = y(r);
  return out;
}

CMat SelectionMatrix::restrict(const CMat& m) const {
  if (m.rows() != cols_ || m.cols() != cols_) throw DimensionError("restrict: matrix must be cols x cols");
  CMat out(rows(), rows());
  for (int i = 0; i < rows(); ++i) {
    for (int j = 0; j < rows(); ++j) out(i, j) = m(col_of(i), col_of(j));
  }
  return out;
}

CMat SelectionMatrix::take_columns(const CMat& m) const {
  if (m.cols() != cols_) throw DimensionError("take_columns: matrix column count mismatch");
  CMat out(m.rows(), rows());
  for (int r = 0; r < rows(); ++r) out.col(r) = m.col(col_of(r));
  return out;
}

bool SelectionMatrix::rows_orthonormal() const {
  // (A A^T)_{ij} = [col(i) == col(j)]
  std::vector<int> sorted = row_to_col_;
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

SelectionMatrix kron(const SelectionMatrix& a, const SelectionMatrix& b) {
  std::vector<int> map;
  map.reserve(static_cast<std::size_t>(a.rows()) * static_cast<std::size_t>(b.rows()));
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < b.rows(); ++j) map.push_back(a.col_of(i) * b.cols() + b.col_of(j));
  }
  return SelectionMatrix(a.cols() * b.cols(), std::move(map));
}

SelectionMatrix selection_matrix_port(const DmrsPattern& pattern, int port, const GridConfig& grid) {
  if (port < 0 || port >= grid.n_tx || port >= pattern.n_ports()) {
    throw DimensionError("port " + std::to_string(port) + " out of range [0, " + std::to_string(grid.n_tx) + ")");
  }
  std::vector<int> map;
  for (const auto& re : pattern.port_res(port)) map.push_back(grid.re_index(re.symbol, re.subcarrier));
  return SelectionMatrix(grid.res_per_pair(), std::move(map));
}

SelectionMatrix selection_matrix_full(const DmrsPattern& pattern, const GridConfig& grid) {
  const int n = grid.res_per_pair();
  std::vector<SelectionMatrix> ports;
  for (int t = 0; t < grid.n_tx; ++t) ports.push_back(selection_matrix_port(pattern, t, grid));
  std::vector<int> map;
  for (int m = 0; m < grid.n_rx; ++m) {
    for (int t = 0; t < grid.n_tx; ++t) {
      const int base = grid.pair_index(m, t) * n;
      for (int c : ports[static_cast<std::size_t>(t)].row_to_col()) map.push_back(base + c);
    }
  }
  return SelectionMatrix(grid.total_res(), std::move(map));
}

std::pair<SelectionMatrix, SelectionMatrix> selection_matrices_1d(const DmrsPattern& pattern, int port,
                                                                  const GridConfig& grid) {
  if (!pattern.is_separable(port)) {
    throw SeparabilityError("port " + std::to_string(port) +
                            " pilots are not a symbols x subcarriers product; use the 2D path");
  }
  const auto& res = pattern.port_res(port);
  std::vector<int> subcarriers;
  for (const auto& re : res) {
    if (re.symbol == pattern.dmrs_symbols().front()) subcarriers.push_back(re.subcarrier);
  }
  return {SelectionMatrix(grid.n_symbols, pattern.dmrs_symbols()),
          SelectionMatrix(grid.n_subcarriers, std::move(subcarriers))};
}

std::string render_ascii(const DmrsPattern& pattern, const GridConfig& grid) {
  std::vector<std::string> rows(static_cast<std::size_t>(grid.n_subcarriers),
                                std::string(static_cast<std::size_t>(grid.n_symbols), '.'));
  for (int port = 0; port < pattern.n_ports(); ++port) {
    const char mark = port < 10 ? static_cast<char>('0' + port) : '#';
    for (const auto& re : pattern.port_res(port)) {
      char& cell = rows[static_cast<std::size_t>(re.subcarrier)][static_cast<std::size_t>(re.symbol)];
      cell = (cell == '.') ? mark : '*';
    }
  }
  std::ostringstream os;
  for (const auto& r : rows) os << r << '\n';
  return os.str();
}

}  // namespace ce3d
