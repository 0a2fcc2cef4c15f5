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

#include "ce3d/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

#include "ce3d/channel_sim.hpp"
#include "ce3d/dataset.hpp"
#include "ce3d/errors.hpp"
#include "ce3d/rng.hpp"

namespace ce3d {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt_double(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

}  // namespace

std::string EstimatorSpec::policy_label() const {
  switch (policy) {
    case SplitPolicy::kNone:
      return "-";
    case SplitPolicy::kEqual:
      return "equal";
    case SplitPolicy::kNaive:
      return "naive";
    case SplitPolicy::kSmallSpatial:
      return "small_s";
    case SplitPolicy::kFamily:
      return "family=" + fmt_double("%.4f", family_fraction);
  }
  return "?";
}

std::string EstimatorSpec::label() const {
  return policy == SplitPolicy::kNone ? to_string(kind) : to_string(kind) + ":" + policy_label();
}

EstimatorSpec parse_estimator_spec(const std::string& text) {
  const auto colon = text.find(':');
  EstimatorSpec spec;
  spec.kind = parse_estimator_kind(text.substr(0, colon));
  const bool splits = spec.kind == EstimatorKind::kTwoPlusOneD || spec.kind == EstimatorKind::kThreeByOneD;
  if (colon == std::string::npos) {
    spec.policy = splits ? SplitPolicy::kEqual : SplitPolicy::kNone;
    return spec;
  }
  if (!splits) throw ConfigError("estimator " + to_string(spec.kind) + " takes no split policy");
  const std::string policy = text.substr(colon + 1);
  if (policy == "equal") {
    spec.policy = SplitPolicy::kEqual;
  } else if (policy == "naive") {
    spec.policy = SplitPolicy::kNaive;
  } else if (policy == "small_s") {
    spec.policy = SplitPolicy::kSmallSpatial;
  } else if (policy.rfind("family=", 0) == 0) {
    spec.policy = SplitPolicy::kFamily;
    try {
      spec.family_fraction = std::stod(policy.substr(7));
    } catch (const std::exception&) {
      throw ConfigError("bad family fraction in '" + text + "'");
    }
    if (!(spec.family_fraction >= 0.0 && spec.family_fraction <= 1.0)) {
      throw ConfigError("family fraction must lie in [0, 1] in '" + text + "'");
    }
  } else {
    throw ConfigError("unknown split policy '" + policy + "' (equal, naive, small_s, family=<f>)");
  }
  return spec;
}

SplitValues resolve_split(const EstimatorSpec& spec, double sigma_w2) {
  SplitValues v;
  switch (spec.policy) {
    case SplitPolicy::kNone:
      return v;
    case SplitPolicy::kEqual:
      v.sigma_s2 = v.sigma_tf2 = split_noise_equal(sigma_w2);
      break;
    case SplitPolicy::kNaive:
      v.sigma_s2 = v.sigma_tf2 = sigma_w2;
      break;
    case SplitPolicy::kSmallSpatial:
      v.sigma_s2 = 0.1 * sigma_w2;
      v.sigma_tf2 = sigma_w2;
      break;
    case SplitPolicy::kFamily:
      v.sigma_s2 = spec.family_fraction * sigma_w2;
      v.sigma_tf2 = split_tf_given_spatial(sigma_w2, v.sigma_s2);
      break;
  }
  if (spec.policy == SplitPolicy::kNaive) {
    v.sigma_t2 = v.sigma_f2 = v.sigma_tf2;
  } else {
    v.sigma_t2 = v.sigma_f2 = split_noise_equal(v.sigma_tf2);
  }
  return v;
}

std::vector<EstimatorSpec> default_estimators() {
  return {parse_estimator_spec("OPT3D"), parse_estimator_spec("2D+1D:equal"), parse_estimator_spec("2D+1D:naive"),
          parse_estimator_spec("3x1D:equal"), parse_estimator_spec("GENIE2D")};
}

double noise_power_from_snr_db(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

void SweepConfig::validate() const {
  grid.validate();
  if (snr_db.empty()) throw ConfigError("SNR list must not be empty");
  if (n_trials < 1) throw ConfigError("trials must be >= 1");
  if (split_grid_points < 2) throw ConfigError("split_grid_points must be >= 2");
  if (!(channel.alpha_tx >= 0.0 && channel.alpha_tx < 1.0) || !(channel.alpha_rx >= 0.0 && channel.alpha_rx < 1.0)) {
    throw ConfigError("alpha_tx and alpha_rx must lie in [0, 1)");
  }
  if (!(channel.doppler_hz >= 0.0)) throw ConfigError("doppler_hz must be nonnegative");
  for (double s : snr_db) {
    // +inf is allowed and means a noiseless observation.
    if (std::isnan(s) || s == -std::numeric_limits<double>::infinity()) {
      throw ConfigError("SNR values must be finite or +inf");
    }
  }
}

std::string SweepConfig::fingerprint() const {
  std::ostringstream os;
  os.precision(17);
  os << grid.n_subcarriers << ',' << grid.n_symbols << ',' << grid.n_rx << ',' << grid.n_tx << ','
     << grid.subcarrier_spacing_hz << ',' << grid.symbol_duration_s << '|';
  for (int s : pattern.dmrs_symbols) os << s << ',';
  os << pattern.pilots_per_symbol << ',' << pattern.shared << ',' << pattern.stagger << '|' << channel.profile << ','
     << channel.doppler_hz << ',' << channel.alpha_tx << ',' << channel.alpha_rx << ',' << channel.preset_file;
  for (double d : channel.custom_delays_ns) os << ',' << d;
  for (double p : channel.custom_powers_db) os << ',' << p;
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016zx", std::hash<std::string>{}(os.str()));
  return buf;
}

DmrsPattern build_pattern(const GridConfig& grid, const PatternConfig& cfg) {
  if (cfg.shared) {
    if (cfg.stagger != 0) throw ConfigError("stagger is not supported for shared patterns");
    return build_shared_pattern(grid, cfg.dmrs_symbols, cfg.pilots_per_symbol);
  }
  if (cfg.stagger != 0) return build_staggered_pattern(grid, cfg.dmrs_symbols, cfg.pilots_per_symbol, cfg.stagger);
  return build_default_pattern(grid, cfg.dmrs_symbols, cfg.pilots_per_symbol);
}

PowerDelayProfile resolve_profile(const ChannelConfig& cfg) {
  if (cfg.profile == "custom") {
    return PowerDelayProfile::from_db("custom", cfg.custom_delays_ns, cfg.custom_powers_db).normalized();
  }
  const std::string path = cfg.preset_file.empty() ? default_preset_path() : cfg.preset_file;
  return find_pdp_preset(path, cfg.profile).normalized();
}

Scenario Scenario::build(const SweepConfig& cfg) {
  cfg.validate();
  DmrsPattern pattern = build_pattern(cfg.grid, cfg.pattern);
  CorrelationSet corr = build_correlation(cfg.grid, SpatialCorrConfig{cfg.channel.alpha_tx, cfg.channel.alpha_rx},
                                          DopplerConfig{cfg.channel.doppler_hz}, resolve_profile(cfg.channel));
  SelectionMatrix sel = selection_matrix_full(pattern, cfg.grid);
  return Scenario{cfg.grid, std::move(pattern), std::move(corr), std::move(sel)};
}

double SweepRow::analytic_mse_db() const { return 10.0 * std::log10(analytic_mse); }

double SweepRow::mc_mse_db() const { return 10.0 * std::log10(mc_mse); }

bool SweepRow::consistent() const {
  if (error) return false;
  return std::abs(mc_mse - analytic_mse) <= 4.0 * mc_stderr;
}

bool SweepReport::has_errors() const {
  return std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.error.has_value(); });
}

std::string SweepReport::csv_header() {
  return "snr_db,estimator,split_policy,analytic_mse,analytic_mse_db,mc_mse,mc_stderr,trials,wall_time_s";
}

void SweepReport::write_csv(std::ostream& os, bool with_wall_time) const {
  os << csv_header() << '\n';
  for (const auto& r : rows) {
    os << fmt_double("%g", r.snr_db) << ',' << r.estimator << ',' << r.split_policy << ',';
    if (r.error) {
      os << "nan,nan,nan,nan," << r.trials << ',';
    } else {
      os << fmt_double("%.12e", r.analytic_mse) << ',' << fmt_double("%.6f", r.analytic_mse_db()) << ','
         << fmt_double("%.12e", r.mc_mse) << ',' << fmt_double("%.6e", r.mc_stderr) << ',' << r.trials << ',';
    }
    if (with_wall_time) os << fmt_double("%.4f", r.wall_time_s);
    os << '\n';
  }
}

const SweepRow* SweepReport::find(double snr_db, const std::string& estimator, const std::string& policy) const {
  for (const auto& r : rows) {
    if (r.snr_db == snr_db && r.estimator == estimator && r.split_policy == policy) return &r;
  }
  return nullptr;
}

int resolve_threads(int requested) {
  int n = requested;
  if (n <= 0) {
    if (const char* env = std::getenv("CE3D_THREADS"); env != nullptr && *env != '\0') {
      n = std::atoi(env);
    }
  }
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  return std::max(n, 1);
}

double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

namespace {

EstimatorFilter build_filter(const Scenario& sc, const EstimatorSpec& spec, double sigma_w2) {
  const SplitValues v = resolve_split(spec, sigma_w2);
  switch (spec.kind) {
    case EstimatorKind::kOpt3d:
      return build_w3d(sc.corr, sc.sel, sigma_w2);
    case EstimatorKind::kTwoPlusOneD:
      return build_2d1d(sc.corr, sc.pattern, v.sigma_s2, v.sigma_tf2);
    case EstimatorKind::kThreeByOneD:
      return build_3x1d(sc.corr, sc.pattern, v.sigma_s2, v.sigma_t2, v.sigma_f2);
    case EstimatorKind::kGenie2d:
      return build_genie_2d(sc.corr, sc.pattern, sigma_w2);
  }
  throw ConfigError("unhandled estimator kind");
}

struct Slot {
  EstimatorSpec spec;
  std::shared_ptr<const EstimatorFilter> filter;
  SweepRow row;
  std::vector<double> errors;  // per trial
  double apply_seconds = 0.0;
};

// Per-trial squared errors for all filters at one noise power.
void run_trials(const Scenario& sc, const ChannelSampler& sampler, std::vector<Slot>& slots, double sigma_w2,
                std::uint64_t seed, std::uint64_t snr_index, int n_trials, int n_threads) {
  std::vector<std::size_t> live;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].filter) {
      live.push_back(i);
      slots[i].errors.assign(static_cast<std::size_t>(n_trials), 0.0);
    }
  }
  if (live.empty()) return;
  const double m = static_cast<double>(sc.grid.total_res());
  const int workers = std::clamp(n_threads, 1, n_trials);
  std::vector<std::vector<double>> apply_time(static_cast<std::size_t>(workers),
                                              std::vector<double>(slots.size(), 0.0));

  auto work = [&](int worker) {
    CVec h;
    for (int t = worker; t < n_trials; t += workers) {
      const std::uint64_t trial = (snr_index << 32) | static_cast<std::uint64_t>(t);
      sampler.draw_into(substream_key(seed, trial, Stream::kChannel), h);
      ChannelRealization chan{h, 0, sc.grid};
      const auto pilots = generate_pilots(sc.pattern, substream_key(seed, trial, Stream::kPilots));
      const auto obs = observe(chan, pilots, sc.pattern, sigma_w2, substream_key(seed, trial, Stream::kNoise));
      const CVec ls = ls_estimate(obs);
      for (std::size_t i : live) {
        const auto t0 = Clock::now();
        const CVec est = slots[i].filter->apply(ls);
        apply_time[static_cast<std::size_t>(worker)][i] += seconds_since(t0);
        slots[i].errors[static_cast<std::size_t>(t)] = (est - h).squaredNorm() / m;
      }
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  for (std::size_t i : live) {
    for (const auto& per_worker : apply_time) slots[i].apply_seconds += per_worker[i];
  }
}

SweepReport evaluate(const SweepConfig& cfg, const std::vector<EstimatorSpec>& specs, FilterCache* cache) {
  const Scenario sc = Scenario::build(cfg);
  const ChannelSampler sampler(sc.corr);
  const int threads = resolve_threads(cfg.threads);
  const std::string fp = cfg.fingerprint();
  FilterCache local_cache;
  FilterCache& filters = cache != nullptr ? *cache : local_cache;

  SweepReport report;
  for (std::size_t s = 0; s < cfg.snr_db.size(); ++s) {
    const double snr = cfg.snr_db[s];
    const double sigma_w2 = noise_power_from_snr_db(snr);
    std::vector<Slot> slots;
    for (const auto& spec : specs) {
      Slot slot;
      slot.spec = spec;
      slot.row.snr_db = snr;
      slot.row.estimator = to_string(spec.kind);
      slot.row.split_policy = spec.policy_label();
      const auto t0 = Clock::now();
      try {
        slot.row.split = resolve_split(spec, sigma_w2);
        const std::string key = fp + "|" + fmt_double("%.17g", snr) + "|" + spec.label();
        slot.filter = filters.get_or_build(key, [&] { return build_filter(sc, spec, sigma_w2); });
        slot.row.regularized = slot.filter->regularized();
        slot.row.analytic_mse = analytic_mse(*slot.filter, sc.corr, sc.sel, sigma_w2);
      } catch (const std::exception& e) {
        slot.filter.reset();
        slot.row.error = e.what();
      }
      slot.row.wall_time_s = seconds_since(t0);
      slots.push_back(std::move(slot));
    }

    run_trials(sc, sampler, slots, sigma_w2, cfg.seed, s, cfg.n_trials, threads);

    for (auto& slot : slots) {
      auto& row = slot.row;
      if (!row.error) {
        const std::size_t n = slot.errors.size();
        row.trials = static_cast<int>(n);
        row.mc_mse = pairwise_sum(slot.errors.data(), n) / static_cast<double>(n);
        if (n > 1) {
          std::vector<double> dev(n);
          for (std::size_t i = 0; i < n; ++i) dev[i] = (slot.errors[i] - row.mc_mse) * (slot.errors[i] - row.mc_mse);
          const double var = pairwise_sum(dev.data(), n) / static_cast<double>(n - 1);
          row.mc_stderr = std::sqrt(var / static_cast<double>(n));
        }
        row.wall_time_s += slot.apply_seconds;
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

}  // namespace

SweepReport run_sweep(const SweepConfig& cfg, FilterCache* cache) {
  const auto specs = cfg.estimators.empty() ? default_estimators() : cfg.estimators;
  return evaluate(cfg, specs, cache);
}

SweepReport noise_split_study(const SweepConfig& cfg, FilterCache* cache) {
  cfg.validate();
  std::vector<EstimatorSpec> specs{parse_estimator_spec("OPT3D"), parse_estimator_spec("GENIE2D"),
                                   parse_estimator_spec("2D+1D:naive"), parse_estimator_spec("2D+1D:equal"),
                                   parse_estimator_spec("2D+1D:small_s")};
  for (int i = 0; i < cfg.split_grid_points; ++i) {
    EstimatorSpec spec;
    spec.kind = EstimatorKind::kTwoPlusOneD;
    spec.policy = SplitPolicy::kFamily;
    spec.family_fraction = static_cast<double>(i) / (cfg.split_grid_points - 1);
    specs.push_back(spec);
  }
  SweepReport report = evaluate(cfg, specs, cache);

  for (double snr : cfg.snr_db) {
    SweepRow* best = nullptr;
    for (auto& r : report.rows) {
      if (r.snr_db != snr || r.error || r.estimator != to_string(EstimatorKind::kTwoPlusOneD)) continue;
      if (best == nullptr || r.analytic_mse < best->analytic_mse) best = &r;
    }
    if (best != nullptr) best->best = true;
  }
  return report;
}

void export_dataset(const SweepConfig& cfg, std::size_t n_samples, const std::string& path) {
  const Scenario sc = Scenario::build(cfg);
  const ChannelSampler sampler(sc.corr);
  const int n_p = sc.pattern.pilots_per_symbol();
  if (n_p < 1) throw ConfigError("dataset export needs the same pilot count on every DMRS symbol");
  if (n_samples > std::numeric_limits<std::uint32_t>::max()) throw ConfigError("too many samples");

  const auto [snr_lo, snr_hi] = std::minmax_element(cfg.snr_db.begin(), cfg.snr_db.end());
  Dataset data;
  data.dims = DatasetDims{static_cast<std::uint32_t>(n_samples),
                          static_cast<std::uint32_t>(sc.grid.n_rx),
                          static_cast<std::uint32_t>(sc.grid.n_tx),
                          static_cast<std::uint32_t>(sc.grid.n_symbols),
                          static_cast<std::uint32_t>(sc.grid.n_subcarriers),
                          static_cast<std::uint32_t>(sc.pattern.n_dmrs_symbols()),
                          static_cast<std::uint32_t>(n_p)};
  data.samples.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    // Each sample is reproducible from its own seed.
    const std::uint64_t sample_seed = substream_key(cfg.seed, i, Stream::kChannel);
    CounterRng snr_rng(substream_key(sample_seed, 0, Stream::kSnr));
    const double snr = *snr_lo + (*snr_hi - *snr_lo) * snr_rng.uniform();
    const double sigma_w2 = noise_power_from_snr_db(snr);

    const ChannelRealization chan = sampler.draw(substream_key(sample_seed, 0, Stream::kChannel));
    const auto pilots = generate_pilots(sc.pattern, substream_key(sample_seed, 0, Stream::kPilots));
    const auto obs = observe(chan, pilots, sc.pattern, sigma_w2, substream_key(sample_seed, 0, Stream::kNoise));
    const CVec ls = ls_estimate(obs);

    DatasetSample s;
    s.channel.reserve(static_cast<std::size_t>(2 * chan.h.size()));
    for (const auto& z : chan.h) {
      s.channel.push_back(static_cast<float>(z.real()));
      s.channel.push_back(static_cast<float>(z.imag()));
    }
    s.ls.reserve(static_cast<std::size_t>(2 * ls.size()));
    for (const auto& z : ls) {
      s.ls.push_back(static_cast<float>(z.real()));
      s.ls.push_back(static_cast<float>(z.imag()));
    }
    s.noise_power = static_cast<float>(sigma_w2);
    s.seed = sample_seed;
    data.samples.push_back(std::move(s));
  }
  write_dataset(path, data);
}

}  // namespace ce3d
