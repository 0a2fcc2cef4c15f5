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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ce3d/correlation.hpp"
#include "ce3d/estimators.hpp"
#include "ce3d/grid.hpp"

namespace ce3d {

enum class SplitPolicy {
  kNone,          // estimator has no split (OPT3D, GENIE2D)
  kEqual,         // sigma_s^2 = sigma_tf^2 = sqrt(sigma_w^2 + 1) - 1
  kNaive,         // sigma_s^2 = sigma_tf^2 = sigma_w^2
  kSmallSpatial,  // sigma_tf^2 = sigma_w^2, sigma_s^2 = 0.1 sigma_w^2
  kFamily,        // sigma_s^2 = fraction * sigma_w^2, sigma_tf^2 from the budget relation
};

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::kOpt3d;
  SplitPolicy policy = SplitPolicy::kNone;
  double family_fraction = 0.0;

  std::string policy_label() const;
  std::string label() const;  // "2D+1D:equal", "OPT3D", ...
};

// "OPT3D", "GENIE2D", "2D+1D[:equal|naive|small_s|family=<fraction>]", "3x1D[:...]".
EstimatorSpec parse_estimator_spec(const std::string& text);

/// Regularizers for one estimator at one noise power. Time/frequency shares of
/// sigma_tf^2 use the equal split of the same budget relation.
struct SplitValues {
  double sigma_s2 = 0.0;
  double sigma_tf2 = 0.0;
  double sigma_t2 = 0.0;
  double sigma_f2 = 0.0;
};
SplitValues resolve_split(const EstimatorSpec& spec, double sigma_w2);

struct ChannelConfig {
  std::string profile = "ETU";  // preset name or "custom"
  double doppler_hz = 100.0;
  double alpha_tx = 0.3;
  double alpha_rx = 0.3;
  std::string preset_file;  // empty: shipped presets
  std::vector<double> custom_delays_ns;
  std::vector<double> custom_powers_db;
};

struct PatternConfig {
  std::vector<int> dmrs_symbols{3, 10};
  int pilots_per_symbol = 3;
  bool shared = false;
  int stagger = 0;
};

struct SweepConfig {
  GridConfig grid;
  PatternConfig pattern;
  ChannelConfig channel;
  std::vector<double> snr_db{0.0, 5.0, 10.0, 15.0, 20.0};
  std::vector<EstimatorSpec> estimators;  // empty: default set
  int n_trials = 1000;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: CE3D_THREADS or hardware concurrency
  int split_grid_points = 11;

  void validate() const;
  // Hash of everything that determines the correlation model and pattern.
  std::string fingerprint() const;
};

std::vector<EstimatorSpec> default_estimators();

// sigma_w^2 = 10^(-SNR/10) for unit channel and pilot power.
double noise_power_from_snr_db(double snr_db);

DmrsPattern build_pattern(const GridConfig& grid, const PatternConfig& cfg);
PowerDelayProfile resolve_profile(const ChannelConfig& cfg);

/// Everything a sweep needs that does not depend on the SNR.
struct Scenario {
  GridConfig grid;
  DmrsPattern pattern;
  CorrelationSet corr;
  SelectionMatrix sel;

  static Scenario build(const SweepConfig& cfg);
};

struct SweepRow {
  double snr_db = 0.0;
  std::string estimator;
  std::string split_policy;
  double analytic_mse = 0.0;
  double mc_mse = 0.0;
  double mc_stderr = 0.0;
  int trials = 0;
  double wall_time_s = 0.0;
  SplitValues split;
  bool regularized = false;
  bool best = false;                  // best split of its SNR (noise-split study)
  std::optional<std::string> error;   // construction failure

  double analytic_mse_db() const;
  double mc_mse_db() const;
  // |mc - analytic| <= 4 stderr
  bool consistent() const;
};

struct SweepReport {
  std::vector<SweepRow> rows;

  bool has_errors() const;
  static std::string csv_header();
  // `with_wall_time = false` blanks the timing column so payloads can be compared.
  void write_csv(std::ostream& os, bool with_wall_time = true) const;
  const SweepRow* find(double snr_db, const std::string& estimator, const std::string& policy) const;
};

/// Worker count: CE3D_THREADS when set, otherwise hardware concurrency.
int resolve_threads(int requested);

/// Sum with pairwise (cascade) reduction; result is independent of thread layout.
double pairwise_sum(const double* x, std::size_t n);

/// Analytic and Monte Carlo MSE for every estimator at every SNR. Trials use
/// independent per-trial streams and are shared across estimators (common random
/// numbers). A failing estimator produces an error row.
SweepReport run_sweep(const SweepConfig& cfg, FilterCache* cache = nullptr);

/// (2D+1D) over the budget-consistent family sigma_s^2 = f sigma_w^2,
/// f in linspace(0, 1, split_grid_points), plus the naive, equal and small-spatial
/// policies, with OPT3D and GENIE2D reference rows. The best (2D+1D) split per SNR
/// is marked.
SweepReport noise_split_study(const SweepConfig& cfg, FilterCache* cache = nullptr);

/// Writes n_samples (true channel, LS estimate) pairs with per-sample SNR drawn
/// uniformly from [min snr_db, max snr_db].
void export_dataset(const SweepConfig& cfg, std::size_t n_samples, const std::string& path);

}  // namespace ce3d
