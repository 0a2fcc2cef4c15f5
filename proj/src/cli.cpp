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

#include "ce3d/cli.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <string>

#include <CLI11.hpp>

#include "ce3d/config.hpp"
#include "ce3d/dataset.hpp"
#include "ce3d/errors.hpp"
#include "ce3d/harness.hpp"

namespace ce3d {

namespace {

struct Options {
  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int trials = 0;
  bool large = false;
  std::size_t samples = 0;
};

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

bool given(CLI::App& sub, const std::string& name) {
  const CLI::Option* o = sub.get_option_no_throw(name);
  return o != nullptr && o->count() > 0;
}

CliConfig resolve_config(const Options& opt, CLI::App& sub) {
  CliConfig cfg = opt.config_path.empty() ? CliConfig{} : load_config(opt.config_path);
  if (given(sub, "--seed")) cfg.sweep.seed = opt.seed;
  if (given(sub, "--trials")) cfg.sweep.n_trials = opt.trials;
  if (given(sub, "--samples")) cfg.export_samples = opt.samples;
  if (opt.large) {
    cfg.sweep.grid.n_rx = 4;
    cfg.sweep.grid.n_tx = 4;
  } else if (cfg.sweep.grid.n_pairs() > 4) {
    throw ConfigError("configurations above 2x2 antennas need --large");
  }
  cfg.sweep.validate();
  return cfg;
}

void write_csv_output(const SweepReport& report, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    report.write_csv(out);
    return;
  }
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open output file '" + path + "'");
  report.write_csv(f);
  if (!f) throw ConfigError("failed writing '" + path + "'");
}

void print_errors(const SweepReport& report, std::ostream& err) {
  for (const auto& r : report.rows) {
    if (r.error) err << "error: SNR " << fmt("%g", r.snr_db) << " dB, " << r.estimator << ": " << *r.error << '\n';
  }
}

int cmd_sweep(const CliConfig& cfg, const Options& opt, std::ostream& out, std::ostream& err) {
  const SweepReport report = run_sweep(cfg.sweep);
  write_csv_output(report, opt.out_path, out);

  out << "MSE gain over GENIE2D (dB, positive is better)\n";
  out << "  SNR_dB  estimator            analytic_dB    mc_dB   gain_dB\n";
  for (const auto& r : report.rows) {
    if (r.error) continue;
    const SweepRow* genie = report.find(r.snr_db, "GENIE2D", "-");
    char line[160];
    const std::string label = r.split_policy == "-" ? r.estimator : r.estimator + ":" + r.split_policy;
    if (genie != nullptr && !genie->error) {
      std::snprintf(line, sizeof(line), "%8g  %-20s %10.3f %8.3f %9.3f%s\n", r.snr_db, label.c_str(),
                    r.analytic_mse_db(), r.mc_mse_db(), genie->analytic_mse_db() - r.analytic_mse_db(),
                    r.consistent() ? "" : "  (mc off)");
    } else {
      std::snprintf(line, sizeof(line), "%8g  %-20s %10.3f %8.3f %9s\n", r.snr_db, label.c_str(),
                    r.analytic_mse_db(), r.mc_mse_db(), "n/a");
    }
    out << line;
  }
  if (report.has_errors()) {
    print_errors(report, err);
    return 2;
  }
  return 0;
}

int cmd_noise_split(const CliConfig& cfg, const Options& opt, std::ostream& out, std::ostream& err) {
  const SweepReport report = noise_split_study(cfg.sweep);
  if (!opt.out_path.empty()) write_csv_output(report, opt.out_path, out);

  for (double snr : cfg.sweep.snr_db) {
    const double sigma_w2 = noise_power_from_snr_db(snr);
    out << "SNR " << fmt("%g", snr) << " dB  sigma_w^2 = " << fmt("%.6f", sigma_w2)
        << "  sigma_*^2 = " << fmt("%.6f", split_noise_equal(sigma_w2)) << '\n';
    const SweepRow* naive = report.find(snr, "2D+1D", "naive");
    char line[200];
    std::snprintf(line, sizeof(line), "  %-22s %12s %12s %12s %12s\n", "policy", "sigma_s^2", "sigma_tf^2", "mse_dB",
                  "vs_naive_dB");
    out << line;
    for (const auto& r : report.rows) {
      if (r.snr_db != snr) continue;
      const std::string label = r.split_policy == "-" ? r.estimator : r.estimator + ":" + r.split_policy;
      if (r.error) {
        out << "  " << label << "  error\n";
        continue;
      }
      const bool has_split = r.estimator == "2D+1D";
      const double gain =
          naive != nullptr && !naive->error ? naive->analytic_mse_db() - r.analytic_mse_db() : std::nan("");
      std::snprintf(line, sizeof(line), "  %-22s %12s %12s %12.4f %12.4f%s\n", label.c_str(),
                    has_split ? fmt("%.6f", r.split.sigma_s2).c_str() : "-",
                    has_split ? fmt("%.6f", r.split.sigma_tf2).c_str() : "-", r.analytic_mse_db(), gain,
                    r.best ? "  <- best" : "");
      out << line;
    }
  }
  if (report.has_errors()) {
    print_errors(report, err);
    return 2;
  }
  return 0;
}

int cmd_export(const CliConfig& cfg, const Options& opt, std::ostream& out) {
  if (opt.out_path.empty()) throw ConfigError("export needs --out <path>");
  export_dataset(cfg.sweep, cfg.export_samples, opt.out_path);
  std::uint32_t version = 0;
  const DatasetDims d = read_dataset_header(opt.out_path, &version);
  out << "wrote " << opt.out_path << " (" << dataset_file_size(d) << " bytes)\n"
      << "version " << version << "\n"
      << "n_samples " << d.n_samples << "\nn_rx " << d.n_rx << "\nn_tx " << d.n_tx << "\nn_symbols " << d.n_symbols
      << "\nn_subcarriers " << d.n_subcarriers << "\nk " << d.k << "\nn_p " << d.n_p << '\n';
  return 0;
}

int cmd_validate(const CliConfig& cfg, std::ostream& out) {
  const auto& g = cfg.sweep.grid;
  const DmrsPattern pattern = build_pattern(g, cfg.sweep.pattern);
  out << "grid " << g.n_subcarriers << " subcarriers x " << g.n_symbols << " symbols, " << g.n_rx << "x" << g.n_tx
      << " antennas\n";
  out << "DMRS symbols";
  for (int s : pattern.dmrs_symbols()) out << ' ' << s;
  out << "\n";
  for (int p = 0; p < pattern.n_ports(); ++p) {
    out << "port " << p << ": " << pattern.pilots_per_port() << " pilots (" << pattern.pilots_per_symbol()
        << " per DMRS symbol), " << (pattern.is_separable(p) ? "separable" : "not separable") << '\n';
  }
  out << "pilot REs " << pattern.pilot_res_total() << ", data REs " << pattern.data_res_total() << '\n';
  out << render_ascii(pattern, g);
  // Building the correlation model checks the channel section too.
  (void)Scenario::build(cfg.sweep);
  out << "config OK (" << cfg.sweep.fingerprint() << ")\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"ce3d: LMMSE channel estimation laboratory for correlated MIMO-OFDM", "ce3d"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "Config file ([section] key = value)");
    sub->add_option("--seed", opt.seed, "Master seed (overrides sweep.seed)");
    sub->add_option("--trials", opt.trials, "Monte Carlo trials per point")->check(CLI::PositiveNumber);
    sub->add_flag("--large", opt.large, "Run the 4x4 antenna setup");
  };
  CLI::App* sweep = app.add_subcommand("sweep", "Analytic and Monte Carlo MSE per SNR and estimator");
  add_common(sweep);
  sweep->add_option("--out", opt.out_path, "CSV output path (default: stdout)");
  CLI::App* split = app.add_subcommand("noise-split", "Compare noise-power splits of the 2D+1D estimator");
  add_common(split);
  split->add_option("--out", opt.out_path, "CSV output path");
  CLI::App* exp = app.add_subcommand("export", "Write a binary (channel, LS) training dataset");
  add_common(exp);
  exp->add_option("--out", opt.out_path, "Dataset path")->required();
  exp->add_option("--samples", opt.samples, "Number of samples")->check(CLI::PositiveNumber);
  CLI::App* val = app.add_subcommand("validate", "Check a config and print the pilot grid");
  add_common(val);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    CLI::App* chosen = app.get_subcommands().front();
    const CliConfig cfg = resolve_config(opt, *chosen);
    if (chosen == sweep) return cmd_sweep(cfg, opt, out, err);
    if (chosen == split) return cmd_noise_split(cfg, opt, out, err);
    if (chosen == exp) return cmd_export(cfg, opt, out);
    return cmd_validate(cfg, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace ce3d
