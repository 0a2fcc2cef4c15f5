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

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <sstream>

#include "ce3d/channel_sim.hpp"
#include "ce3d/dataset.hpp"
#include "ce3d/errors.hpp"
#include "ce3d/harness.hpp"
#include "ce3d/rng.hpp"

using namespace ce3d;

namespace {

std::string csv_of(const SweepReport& r) {
  std::ostringstream os;
  r.write_csv(os, false);
  return os.str();
}

SweepConfig quick(int trials) {
  SweepConfig cfg;
  cfg.n_trials = trials;
  cfg.snr_db = {10.0};
  return cfg;
}

}  // namespace

TEST_CASE("estimator spec parsing") {
  CHECK(parse_estimator_spec("OPT3D").policy == SplitPolicy::kNone);
  CHECK(parse_estimator_spec("2D+1D").policy == SplitPolicy::kEqual);
  CHECK(parse_estimator_spec("2d+1d:naive").policy == SplitPolicy::kNaive);
  CHECK(parse_estimator_spec("3x1D:small_s").policy == SplitPolicy::kSmallSpatial);
  const auto fam = parse_estimator_spec("2D+1D:family=0.25");
  CHECK(fam.policy == SplitPolicy::kFamily);
  CHECK(fam.family_fraction == 0.25);
  CHECK(fam.label() == "2D+1D:family=0.2500");
  CHECK_THROWS_AS(parse_estimator_spec("OPT3D:equal"), ConfigError);
  CHECK_THROWS_AS(parse_estimator_spec("2D+1D:half"), ConfigError);
  CHECK_THROWS_AS(parse_estimator_spec("2D+1D:family=1.5"), ConfigError);
  CHECK_THROWS_AS(parse_estimator_spec("2D+1D:family=x"), ConfigError);
}

TEST_CASE("split policies") {
  const double w = 1.0;
  const auto eq = resolve_split(parse_estimator_spec("2D+1D:equal"), w);
  CHECK(eq.sigma_s2 == doctest::Approx(0.414214).epsilon(1e-6));
  CHECK(eq.sigma_tf2 == eq.sigma_s2);
  CHECK(eq.sigma_t2 == doctest::Approx(split_noise_equal(eq.sigma_tf2)));
  const auto naive = resolve_split(parse_estimator_spec("2D+1D:naive"), w);
  CHECK(naive.sigma_s2 == w);
  CHECK(naive.sigma_tf2 == w);
  const auto small = resolve_split(parse_estimator_spec("2D+1D:small_s"), 0.5);
  CHECK(small.sigma_s2 == doctest::Approx(0.05));
  CHECK(small.sigma_tf2 == 0.5);
  const auto fam = resolve_split(parse_estimator_spec("2D+1D:family=0.5"), 2.0);
  CHECK(std::abs(split_residual({2.0, fam.sigma_s2, fam.sigma_tf2})) < 1e-15);
  CHECK(noise_power_from_snr_db(10.0) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(noise_power_from_snr_db(std::numeric_limits<double>::infinity()) == 0.0);
}

TEST_CASE("pairwise sum") {
  std::vector<double> x(1001);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = 0.1 * static_cast<double>(i);
  CHECK(pairwise_sum(x.data(), x.size()) == doctest::Approx(0.1 * 1000 * 1001 / 2).epsilon(1e-15));
  CHECK(pairwise_sum(x.data(), 0) == 0.0);
}

TEST_CASE("thread count resolution") {
  CHECK(resolve_threads(3) == 3);
  ::setenv("CE3D_THREADS", "2", 1);
  CHECK(resolve_threads(0) == 2);
  ::unsetenv("CE3D_THREADS");
  CHECK(resolve_threads(0) >= 1);
}

TEST_CASE("config validation") {
  SweepConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.snr_db.clear();
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SweepConfig{};
  cfg.n_trials = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SweepConfig{};
  cfg.channel.alpha_rx = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SweepConfig{};
  cfg.snr_db = {std::nan("")};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  SweepConfig a, b;
  CHECK(a.fingerprint() == b.fingerprint());
  b.channel.doppler_hz = 200.0;
  CHECK(a.fingerprint() != b.fingerprint());
}

TEST_CASE("noiseless full-pilot sweep is exact") {
  SweepConfig cfg;
  cfg.n_trials = 20;
  cfg.snr_db = {std::numeric_limits<double>::infinity()};
  cfg.pattern.shared = true;
  cfg.pattern.pilots_per_symbol = 12;
  cfg.pattern.dmrs_symbols.clear();
  for (int s = 0; s < 14; ++s) cfg.pattern.dmrs_symbols.push_back(s);
  // enough taps and Doppler spread for full-rank correlations
  cfg.channel.profile = "custom";
  cfg.channel.doppler_hz = 3000.0;
  for (int l = 0; l < 14; ++l) {
    cfg.channel.custom_delays_ns.push_back(5000.0 * l);
    cfg.channel.custom_powers_db.push_back(-0.5 * l);
  }
  const SweepReport r = run_sweep(cfg);
  REQUIRE_FALSE(r.has_errors());
  CHECK(r.rows.size() == 5);
  for (const auto& row : r.rows) {
    CHECK_FALSE(row.regularized);
    CHECK(row.analytic_mse <= 1e-12);
    CHECK(row.mc_mse <= 1e-12);
  }
}

TEST_CASE("no spatial correlation makes genie optimal") {
  SweepConfig cfg = quick(10);
  cfg.channel.alpha_tx = cfg.channel.alpha_rx = 0.0;
  cfg.snr_db = {0.0, 10.0, 20.0};
  const SweepReport r = run_sweep(cfg);
  for (double snr : cfg.snr_db) {
    const double opt = r.find(snr, "OPT3D", "-")->analytic_mse;
    const double gen = r.find(snr, "GENIE2D", "-")->analytic_mse;
    CHECK(std::abs(opt - gen) <= 1e-9 * opt);
  }
}

TEST_CASE("Monte Carlo agrees with the analytic MSE") {
  SweepConfig cfg = quick(4000);
  cfg.channel.profile = "custom";
  cfg.channel.custom_delays_ns = {0.0, 1000.0};
  cfg.channel.custom_powers_db = {0.0, -3.0};
  const SweepReport r = run_sweep(cfg);
  const SweepRow* opt = r.find(10.0, "OPT3D", "-");
  REQUIRE(opt != nullptr);
  CHECK(std::abs(opt->mc_mse - opt->analytic_mse) <= 3.0 * opt->mc_stderr);
  for (const auto& row : r.rows) {
    CHECK(row.trials == 4000);
    CHECK(row.consistent());
  }
}

TEST_CASE("sweeps are deterministic and independent of the thread count") {
  SweepConfig cfg = quick(300);
  cfg.snr_db = {0.0, 15.0};
  cfg.seed = 7;
  cfg.threads = 1;
  const std::string serial = csv_of(run_sweep(cfg));
  CHECK(serial == csv_of(run_sweep(cfg)));
  cfg.threads = 3;
  CHECK(serial == csv_of(run_sweep(cfg)));
  cfg.seed = 8;
  CHECK(serial != csv_of(run_sweep(cfg)));
}

TEST_CASE("estimator ordering at the desk operating point") {
  const SweepReport r = run_sweep(quick(10));
  const double opt = r.find(10.0, "OPT3D", "-")->analytic_mse;
  const double eq = r.find(10.0, "2D+1D", "equal")->analytic_mse;
  const double naive = r.find(10.0, "2D+1D", "naive")->analytic_mse;
  CHECK(opt <= eq);
  CHECK(eq <= naive);
}

TEST_CASE("filters are cached across sweeps") {
  FilterCache cache;
  const SweepConfig cfg = quick(5);
  run_sweep(cfg, &cache);
  const std::size_t built = cache.size();
  CHECK(built == 5);
  run_sweep(cfg, &cache);
  CHECK(cache.size() == built);
  CHECK(cache.hits() == built);
}

TEST_CASE("failing estimator yields an error row") {
  SweepConfig cfg = quick(5);
  cfg.pattern.stagger = 1;
  const SweepReport r = run_sweep(cfg);
  CHECK(r.has_errors());
  const SweepRow* bad = r.find(10.0, "3x1D", "equal");
  REQUIRE(bad != nullptr);
  CHECK(bad->error.has_value());
  CHECK(bad->trials == 0);
  CHECK_FALSE(r.find(10.0, "OPT3D", "-")->error.has_value());
  const std::string csv = csv_of(r);
  CHECK(csv.find("10,3x1D,equal,nan,nan,nan,nan,0,") != std::string::npos);
}

TEST_CASE("csv layout") {
  const SweepReport r = run_sweep(quick(5));
  std::ostringstream os;
  r.write_csv(os);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "snr_db,estimator,split_policy,analytic_mse,analytic_mse_db,mc_mse,mc_stderr,trials,wall_time_s");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 8);
  }
  CHECK(rows == 5);
}

TEST_CASE("noise split study") {
  SweepConfig cfg = quick(200);
  cfg.snr_db = {0.0, 5.0, 10.0};
  const SweepReport r = noise_split_study(cfg);
  CHECK(r.rows.size() == 3 * (5 + 11));
  for (double snr : cfg.snr_db) {
    int best = 0;
    double best_mse = 1e300;
    for (const auto& row : r.rows) {
      if (row.snr_db != snr) continue;
      if (row.estimator == "2D+1D") best_mse = std::min(best_mse, row.analytic_mse);
      if (row.best) {
        ++best;
        CHECK(row.estimator == "2D+1D");
      }
    }
    CHECK(best == 1);
    for (const auto& row : r.rows)
      if (row.snr_db == snr && row.best) CHECK(row.analytic_mse == best_mse);
    CHECK(r.find(snr, "2D+1D", "equal")->analytic_mse <= r.find(snr, "2D+1D", "naive")->analytic_mse);
    CHECK(r.find(snr, "OPT3D", "-")->analytic_mse <= best_mse);
  }
  const SweepRow* f0 = r.find(10.0, "2D+1D", "family=0.0000");
  REQUIRE(f0 != nullptr);
  CHECK(f0->split.sigma_s2 == 0.0);
  CHECK(f0->split.sigma_tf2 == doctest::Approx(0.1));
}

TEST_CASE("split policies converge as the noise vanishes") {
  SweepConfig cfg = quick(2);
  double prev_spread = 1e300;
  for (double snr : {20.0, 40.0, 60.0}) {
    cfg.snr_db = {snr};
    const SweepReport r = noise_split_study(cfg);
    double lo = 1e300, hi = 0.0;
    for (const auto& row : r.rows) {
      if (row.estimator != "2D+1D") continue;
      lo = std::min(lo, row.analytic_mse);
      hi = std::max(hi, row.analytic_mse);
    }
    CHECK(hi - lo < prev_spread);
    prev_spread = hi - lo;
  }
  CHECK(prev_spread < 1e-4);
}

TEST_CASE("high-SNR equal split against the naive split") {
  // On the desk setup the naive split overtakes the equal split above roughly
  // 15 dB; this records the measured gap rather than asserting a direction.
  SweepConfig cfg = quick(2);
  cfg.snr_db = {15.0, 20.0};
  const SweepReport r = run_sweep(cfg);
  for (double snr : cfg.snr_db) {
    const double gap = r.find(snr, "2D+1D", "equal")->analytic_mse_db() - r.find(snr, "2D+1D", "naive")->analytic_mse_db();
    MESSAGE("SNR " << snr << " dB: equal - naive = " << gap << " dB");
    CHECK(std::abs(gap) < 0.5);
  }
}

TEST_CASE("dataset export") {
  SweepConfig cfg;
  cfg.snr_db = {0.0, 20.0};
  cfg.seed = 3;
  const std::string path = "harness_export_test.bin";
  export_dataset(cfg, 16, path);
  const Dataset d = read_dataset(path);
  CHECK(d.dims == DatasetDims{16, 2, 2, 14, 12, 2, 3});
  CHECK(std::filesystem::file_size(path) == dataset_file_size(d.dims));
  CHECK(std::filesystem::file_size(path) == kDatasetHeaderBytes + 16 * (4 * (2 * 672 + 2 * 24 + 1) + 8));

  const Scenario sc = Scenario::build(cfg);
  const ChannelSampler sampler(sc.corr);
  for (const auto& s : d.samples) {
    CHECK(s.noise_power >= 0.01f * 0.9999f);
    CHECK(s.noise_power <= 1.0f);
    // the stored seed regenerates the channel
    const CVec h = sampler.draw(substream_key(s.seed, 0, Stream::kChannel)).h;
    for (Eigen::Index i = 0; i < h.size(); ++i) {
      CHECK(s.channel[static_cast<std::size_t>(2 * i)] == static_cast<float>(h(i).real()));
      CHECK(s.channel[static_cast<std::size_t>(2 * i + 1)] == static_cast<float>(h(i).imag()));
    }
  }
  const std::string again = "harness_export_test2.bin";
  export_dataset(cfg, 16, again);
  const Dataset d2 = read_dataset(again);
  CHECK(d2.samples == d.samples);
  std::filesystem::remove(path);
  std::filesystem::remove(again);
  CHECK_THROWS(export_dataset(cfg, 4, "/nonexistent_dir/x.bin"));
}
