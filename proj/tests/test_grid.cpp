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

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "ce3d/errors.hpp"
#include "ce3d/grid.hpp"
#include "oracles.hpp"

using namespace ce3d;

namespace {

GridConfig grid_4tx() {
  GridConfig g;
  g.n_rx = 2;
  g.n_tx = 4;
  return g;
}

std::set<int> subcarriers_on(const DmrsPattern& p, int port, int symbol) {
  std::set<int> out;
  for (const auto& re : p.port_res(port))
    if (re.symbol == symbol) out.insert(re.subcarrier);
  return out;
}

}  // namespace

TEST_CASE("default symbols spread over the subframe") {
  CHECK(default_dmrs_symbols(14, 2) == std::vector<int>{3, 10});
  CHECK(default_dmrs_symbols(14, 1) == std::vector<int>{7});
  CHECK(default_dmrs_symbols(14, 14).size() == 14);
}

TEST_CASE("comb pattern for four ports") {
  const GridConfig g = grid_4tx();
  const DmrsPattern p = build_default_pattern(g, std::vector<int>{3, 10}, 3);
  CHECK(p.n_ports() == 4);
  CHECK(p.pilots_per_port() == 6);
  CHECK(p.pilots_per_symbol() == 3);
  CHECK(p.data_res_per_port() == 168 - 6);
  for (int s : {3, 10}) {
    CHECK(subcarriers_on(p, 0, s) == std::set<int>{0, 4, 8});
    CHECK(subcarriers_on(p, 1, s) == std::set<int>{1, 5, 9});
  }
  // disjoint and cyclic shifts of port 0
  std::set<ResourceElement> all;
  for (int n = 0; n < 4; ++n) {
    for (const auto& re : p.port_res(n)) CHECK(all.insert(re).second);
    for (int s : {3, 10}) {
      std::set<int> shifted;
      for (int c : subcarriers_on(p, 0, s)) shifted.insert((c + n) % 12);
      CHECK(subcarriers_on(p, n, s) == shifted);
    }
  }
  CHECK(p.pilot_res_total() == 24);
}

TEST_CASE("two-port desk comb uses the full stride") {
  const DmrsPattern p = build_default_pattern(GridConfig{}, std::vector<int>{3, 10}, 3);
  CHECK(subcarriers_on(p, 0, 3) == std::set<int>{0, 4, 8});
  CHECK(subcarriers_on(p, 1, 3) == std::set<int>{1, 5, 9});
}

TEST_CASE("full-pilot degenerate pattern") {
  GridConfig g;
  g.n_rx = 1;
  g.n_tx = 1;
  const DmrsPattern p = build_default_pattern(g, g.n_symbols, g.n_subcarriers);
  CHECK(p.data_res_per_port() == 0);
  CHECK(p.data_res_total() == 0);
  const SelectionMatrix a = selection_matrix_port(p, 0, g);
  CHECK(a == SelectionMatrix::identity(g.res_per_pair()));
  CHECK(selection_matrix_full(p, g) == a);
}

TEST_CASE("pattern errors") {
  const GridConfig g = grid_4tx();
  CHECK_THROWS_AS(build_default_pattern(g, std::vector<int>{3, 10}, 4), ConfigError);
  CHECK_THROWS_AS(build_default_pattern(g, std::vector<int>{3, 14}, 3), ConfigError);
  CHECK_THROWS_AS(build_default_pattern(g, std::vector<int>{10, 3}, 3), ConfigError);
  CHECK_THROWS_AS(build_default_pattern(g, 15, 3), ConfigError);
  GridConfig bad = g;
  bad.n_subcarriers = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  // overlapping ports without the shared flag
  std::vector<std::vector<ResourceElement>> res(2, {{3, 0}, {10, 0}});
  CHECK_THROWS_AS(DmrsPattern(GridConfig{}, {3, 10}, res), ConfigError);
  CHECK_NOTHROW(DmrsPattern(GridConfig{}, {3, 10}, res, true));
}

TEST_CASE("port selection matrices are column permutations of each other") {
  const GridConfig g = grid_4tx();
  const DmrsPattern p = build_default_pattern(g, std::vector<int>{3, 10}, 3);
  const CMat a0 = oracle::selection_dense(selection_matrix_port(p, 0, g));
  for (int n = 1; n < 4; ++n) {
    const CMat an = oracle::selection_dense(selection_matrix_port(p, n, g));
    // cyclic shift by n within each symbol block
    CMat perm = CMat::Zero(g.res_per_pair(), g.res_per_pair());
    for (int s = 0; s < g.n_symbols; ++s)
      for (int c = 0; c < g.n_subcarriers; ++c)
        perm(g.re_index(s, c), g.re_index(s, (c + n) % g.n_subcarriers)) = 1.0;
    CHECK((a0 * perm - an).norm() == 0.0);
  }
  CHECK_THROWS(selection_matrix_port(p, 4, g));
}

TEST_CASE("selection matrices have orthonormal rows") {
  const GridConfig g = grid_4tx();
  std::vector<DmrsPattern> patterns{build_default_pattern(g, std::vector<int>{3, 10}, 3),
                                    build_shared_pattern(g, {2, 7, 11}, 2),
                                    build_staggered_pattern(g, {3, 10}, 3, 1)};
  for (const auto& p : patterns) {
    for (int n = 0; n < g.n_tx; ++n) {
      const SelectionMatrix a = selection_matrix_port(p, n, g);
      CHECK(a.rows_orthonormal());
      const CMat d = oracle::selection_dense(a);
      CHECK((d * d.transpose() - CMat::Identity(a.rows(), a.rows())).norm() == 0.0);
    }
    CHECK(selection_matrix_full(p, g).rows_orthonormal());
  }
  CHECK_THROWS_AS(SelectionMatrix(4, {0, 0}), DimensionError);
  CHECK_THROWS_AS(SelectionMatrix(4, {4}), DimensionError);
}

TEST_CASE("full selection matrix is block diagonal over antenna pairs") {
  const GridConfig g = grid_4tx();
  const DmrsPattern p = build_default_pattern(g, std::vector<int>{3, 10}, 3);
  const SelectionMatrix full = selection_matrix_full(p, g);
  CHECK(full.rows() == 2 * 3 * 8);
  CHECK(full.cols() == g.total_res());
  const CMat dense = oracle::selection_dense(full);
  const int kp = p.pilots_per_port();
  for (int m = 0; m < g.n_rx; ++m) {
    for (int n = 0; n < g.n_tx; ++n) {
      const int pair = g.pair_index(m, n);
      const CMat block = dense.block(pair * kp, pair * g.res_per_pair(), kp, g.res_per_pair());
      CHECK((block - oracle::selection_dense(selection_matrix_port(p, n, g))).norm() == 0.0);
      // nothing outside the diagonal block
      CHECK(dense.block(pair * kp, 0, kp, g.total_res()).cwiseAbs().sum() == doctest::Approx(kp));
    }
  }
}

TEST_CASE("shared pattern gives I (x) A_1") {
  const GridConfig g;
  const DmrsPattern p = build_shared_pattern(g, {3, 10}, 3);
  const SelectionMatrix a1 = selection_matrix_port(p, 0, g);
  CHECK(selection_matrix_full(p, g) == kron(SelectionMatrix::identity(g.n_pairs()), a1));
  CHECK(p.all_ports_identical());
}

TEST_CASE("one-dimensional selection factors") {
  const GridConfig g = grid_4tx();
  const DmrsPattern p = build_default_pattern(g, std::vector<int>{3, 10}, 3);
  for (int n = 0; n < g.n_tx; ++n) {
    const auto [at, af] = selection_matrices_1d(p, n, g);
    CHECK(at.rows() == 2);
    CHECK(at.cols() == g.n_symbols);
    CHECK(af.rows() == 3);
    CHECK(af.cols() == g.n_subcarriers);
    const CMat rebuilt = oracle::kron_loops(oracle::selection_dense(at), oracle::selection_dense(af));
    CHECK((rebuilt - oracle::selection_dense(selection_matrix_port(p, n, g))).norm() == 0.0);
  }
  // applying the factors to a vectorized grid picks the pilot REs
  CVec grid_vec(g.res_per_pair());
  for (int i = 0; i < grid_vec.size(); ++i) grid_vec(i) = cplx(i, 0);
  const auto [at, af] = selection_matrices_1d(p, 2, g);
  const CVec picked = kron(at, af).select(grid_vec);
  const auto& res = p.port_res(2);
  for (std::size_t r = 0; r < res.size(); ++r)
    CHECK(picked(static_cast<Eigen::Index>(r)).real() == g.re_index(res[r].symbol, res[r].subcarrier));

  const DmrsPattern staggered = build_staggered_pattern(g, {3, 10}, 3, 1);
  CHECK_FALSE(staggered.is_separable(0));
  CHECK_THROWS_AS(selection_matrices_1d(staggered, 0, g), SeparabilityError);

  const DmrsPattern single = build_default_pattern(g, 1, 3);
  const auto [at1, af1] = selection_matrices_1d(single, 0, g);
  CHECK(at1.rows() == 1);
  CHECK(at1.col_of(0) == 7);
}

TEST_CASE("selection helpers agree with dense products") {
  std::mt19937_64 gen(11);
  const SelectionMatrix a(7, {5, 1, 3});
  const CMat d = oracle::selection_dense(a);
  const CMat m = oracle::random_cmat(gen, 7, 7);
  const CVec x = oracle::random_cmat(gen, 7, 1);
  const CVec y = oracle::random_cmat(gen, 3, 1);
  CHECK((a.select(x) - d * x).norm() == 0.0);
  CHECK((a.scatter(y) - d.transpose() * y).norm() == 0.0);
  CHECK((a.restrict(m) - d * m * d.transpose()).norm() == 0.0);
  CHECK((a.take_columns(m) - m * d.transpose()).norm() == 0.0);
}

TEST_CASE("ascii rendering") {
  const GridConfig g;
  const std::string art = render_ascii(build_default_pattern(g, std::vector<int>{3, 10}, 3), g);
  CHECK(std::count(art.begin(), art.end(), '\n') == 12);
  CHECK(std::count(art.begin(), art.end(), '0') == 6);
  CHECK(std::count(art.begin(), art.end(), '1') == 6);
  CHECK(std::count(art.begin(), art.end(), '.') == 168 - 12);
  const std::string shared = render_ascii(build_shared_pattern(g, {3, 10}, 3), g);
  CHECK(std::count(shared.begin(), shared.end(), '*') == 6);
}
