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

#include <sstream>

#include "ce3d/config.hpp"
#include "ce3d/errors.hpp"

using namespace ce3d;

namespace {

CliConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test.cfg");
}

}  // namespace

TEST_CASE("empty config keeps defaults") {
  const CliConfig c = parse("# nothing\n\n");
  CHECK(c.sweep.grid == GridConfig{});
  CHECK(c.sweep.n_trials == 1000);
  CHECK(c.export_samples == 512);
}

TEST_CASE("shipped desk config matches the defaults") {
  const CliConfig c = load_config(std::string(CE3D_CONFIG_DIR) + "/desk.cfg");
  const SweepConfig d;
  CHECK(c.sweep.grid == d.grid);
  CHECK(c.sweep.pattern.dmrs_symbols == d.pattern.dmrs_symbols);
  CHECK(c.sweep.pattern.pilots_per_symbol == d.pattern.pilots_per_symbol);
  CHECK(c.sweep.channel.profile == d.channel.profile);
  CHECK(c.sweep.channel.alpha_tx == d.channel.alpha_tx);
  CHECK(c.sweep.snr_db == d.snr_db);
  CHECK(c.sweep.fingerprint() == d.fingerprint());
  CHECK(c.sweep.estimators.size() == default_estimators().size());
  for (std::size_t i = 0; i < c.sweep.estimators.size(); ++i)
    CHECK(c.sweep.estimators[i].label() == default_estimators()[i].label());
}

TEST_CASE("all sections parse") {
  const CliConfig c = parse(R"([grid]
n_subcarriers = 24
n_symbols = 7
n_rx = 1
n_tx = 4
subcarrier_spacing_hz = 30e3
symbol_duration_s = 3.5e-5
dmrs_symbols = 1, 5
pilots_per_symbol = 2
[pattern]
shared = yes
stagger = 0
[channel]
profile = custom
doppler_hz = 10
alpha_tx = 0.1
alpha_rx = 0.2
custom_delays_ns = 0, 100
custom_powers_db = 0, -3
[sweep]
snr_db = -5, 0, inf
estimators = OPT3D, 2D+1D:family=0.3
trials = 12
seed = 99
split_grid_points = 5
threads = 2
[export]
samples = 64
)");
  const auto& s = c.sweep;
  CHECK(s.grid.n_subcarriers == 24);
  CHECK(s.grid.n_tx == 4);
  CHECK(s.grid.subcarrier_spacing_hz == 30e3);
  CHECK(s.pattern.dmrs_symbols == std::vector<int>{1, 5});
  CHECK(s.pattern.pilots_per_symbol == 2);
  CHECK(s.pattern.shared);
  CHECK(s.channel.custom_powers_db == std::vector<double>{0.0, -3.0});
  CHECK(s.snr_db.size() == 3);
  CHECK(std::isinf(s.snr_db[2]));
  CHECK(s.estimators.size() == 2);
  CHECK(s.estimators[1].family_fraction == 0.3);
  CHECK(s.n_trials == 12);
  CHECK(s.seed == 99);
  CHECK(s.split_grid_points == 5);
  CHECK(s.threads == 2);
  CHECK(c.export_samples == 64);
}

TEST_CASE("unknown keys are rejected with the line number") {
  CHECK_THROWS_WITH_AS(parse("[grid]\nn_rx = 2\nn_antennas = 4\n"), doctest::Contains("test.cfg:3"), ConfigError);
  CHECK_THROWS_WITH_AS(parse("[grid]\nn_rx = 2\nn_antennas = 4\n"), doctest::Contains("grid.n_antennas"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse("[nope]\nx = 1\n"), doctest::Contains("test.cfg:2"), ConfigError);
}

TEST_CASE("malformed lines and values") {
  CHECK_THROWS_WITH_AS(parse("n_rx = 2\n"), doctest::Contains("outside"), ConfigError);
  CHECK_THROWS_WITH_AS(parse("[grid\n"), doctest::Contains("test.cfg:1"), ConfigError);
  CHECK_THROWS_WITH_AS(parse("[grid]\nn_rx 2\n"), doctest::Contains("test.cfg:2"), ConfigError);
  CHECK_THROWS_WITH_AS(parse("[grid]\nn_rx = two\n"), doctest::Contains("test.cfg:2"), ConfigError);
  CHECK_THROWS_AS(parse("[grid]\nn_rx = 2.5\n"), ConfigError);
  CHECK_THROWS_AS(parse("[grid]\nn_rx =\n"), ConfigError);
  CHECK_THROWS_AS(parse("[pattern]\nshared = maybe\n"), ConfigError);
  CHECK_THROWS_AS(parse("[sweep]\nsnr_db = 1,,2\n"), ConfigError);
  CHECK_THROWS_AS(parse("[sweep]\nestimators = OPT4D\n"), ConfigError);
  CHECK_THROWS_AS(parse("[sweep]\nseed = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[export]\nsamples = 0\n"), ConfigError);
}

TEST_CASE("missing file names the path") {
  CHECK_THROWS_WITH_AS(load_config("/no/such/dir/run.cfg"), doctest::Contains("/no/such/dir/run.cfg"), ConfigError);
}

TEST_CASE("schema lists every section") {
  const auto keys = config_keys();
  for (const char* k : {"grid.n_subcarriers", "pattern.dmrs_symbols", "channel.profile", "sweep.trials",
                        "export.samples"})
    CHECK(std::find(keys.begin(), keys.end(), k) != keys.end());
}
