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

#include "ce3d/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <sstream>

#include "ce3d/errors.hpp"

namespace ce3d {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw std::invalid_argument("empty list entry");
    out.push_back(item);
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

long long to_int(const std::string& s) {
  long long v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw std::invalid_argument("expected an integer, got '" + s + "'");
  return v;
}

int to_int32(const std::string& s) {
  const long long v = to_int(s);
  if (v < -2147483647LL || v > 2147483647LL) throw std::invalid_argument("integer out of range: '" + s + "'");
  return static_cast<int>(v);
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("expected a number, got '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument("expected a finite number, got '" + s + "'");
  return v;
}

bool to_bool(const std::string& s) {
  std::string l = s;
  std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return std::tolower(c); });
  if (l == "true" || l == "yes" || l == "1") return true;
  if (l == "false" || l == "no" || l == "0") return false;
  throw std::invalid_argument("expected true/false, got '" + s + "'");
}

std::vector<double> to_doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split_list(s)) out.push_back(to_double(item));
  return out;
}

std::vector<int> to_ints(const std::string& s) {
  std::vector<int> out;
  for (const auto& item : split_list(s)) out.push_back(to_int32(item));
  return out;
}

using Setter = std::function<void(CliConfig&, const std::string&)>;

const std::map<std::string, Setter>& schema() {
  static const std::map<std::string, Setter> keys = [] {
    std::map<std::string, Setter> m;
    m["grid.n_subcarriers"] = [](CliConfig& c, const std::string& v) { c.sweep.grid.n_subcarriers = to_int32(v); };
    m["grid.n_symbols"] = [](CliConfig& c, const std::string& v) { c.sweep.grid.n_symbols = to_int32(v); };
    m["grid.n_rx"] = [](CliConfig& c, const std::string& v) { c.sweep.grid.n_rx = to_int32(v); };
    m["grid.n_tx"] = [](CliConfig& c, const std::string& v) { c.sweep.grid.n_tx = to_int32(v); };
    m["grid.subcarrier_spacing_hz"] = [](CliConfig& c, const std::string& v) {
      c.sweep.grid.subcarrier_spacing_hz = to_double(v);
    };
    m["grid.symbol_duration_s"] = [](CliConfig& c, const std::string& v) {
      c.sweep.grid.symbol_duration_s = to_double(v);
    };
    m["pattern.dmrs_symbols"] = [](CliConfig& c, const std::string& v) { c.sweep.pattern.dmrs_symbols = to_ints(v); };
    m["pattern.pilots_per_symbol"] = [](CliConfig& c, const std::string& v) {
      c.sweep.pattern.pilots_per_symbol = to_int32(v);
    };
    m["pattern.shared"] = [](CliConfig& c, const std::string& v) { c.sweep.pattern.shared = to_bool(v); };
    m["pattern.stagger"] = [](CliConfig& c, const std::string& v) { c.sweep.pattern.stagger = to_int32(v); };
    // Pattern keys are also accepted inside [grid].
    m["grid.dmrs_symbols"] = m["pattern.dmrs_symbols"];
    m["grid.pilots_per_symbol"] = m["pattern.pilots_per_symbol"];
    m["channel.profile"] = [](CliConfig& c, const std::string& v) { c.sweep.channel.profile = v; };
    m["channel.doppler_hz"] = [](CliConfig& c, const std::string& v) { c.sweep.channel.doppler_hz = to_double(v); };
    m["channel.alpha_tx"] = [](CliConfig& c, const std::string& v) { c.sweep.channel.alpha_tx = to_double(v); };
    m["channel.alpha_rx"] = [](CliConfig& c, const std::string& v) { c.sweep.channel.alpha_rx = to_double(v); };
    m["channel.preset_file"] = [](CliConfig& c, const std::string& v) { c.sweep.channel.preset_file = v; };
    m["channel.custom_delays_ns"] = [](CliConfig& c, const std::string& v) {
      c.sweep.channel.custom_delays_ns = to_doubles(v);
    };
    m["channel.custom_powers_db"] = [](CliConfig& c, const std::string& v) {
      c.sweep.channel.custom_powers_db = to_doubles(v);
    };
    m["sweep.snr_db"] = [](CliConfig& c, const std::string& v) {
      c.sweep.snr_db.clear();
      for (const auto& item : split_list(v)) {
        c.sweep.snr_db.push_back(item == "inf" ? std::numeric_limits<double>::infinity() : to_double(item));
      }
    };
    m["sweep.estimators"] = [](CliConfig& c, const std::string& v) {
      c.sweep.estimators.clear();
      for (const auto& item : split_list(v)) c.sweep.estimators.push_back(parse_estimator_spec(item));
    };
    m["sweep.trials"] = [](CliConfig& c, const std::string& v) { c.sweep.n_trials = to_int32(v); };
    m["sweep.seed"] = [](CliConfig& c, const std::string& v) {
      const long long s = to_int(v);
      if (s < 0) throw std::invalid_argument("seed must be nonnegative");
      c.sweep.seed = static_cast<std::uint64_t>(s);
    };
    m["sweep.split_grid_points"] = [](CliConfig& c, const std::string& v) {
      c.sweep.split_grid_points = to_int32(v);
    };
    m["sweep.threads"] = [](CliConfig& c, const std::string& v) { c.sweep.threads = to_int32(v); };
    m["export.samples"] = [](CliConfig& c, const std::string& v) {
      const long long n = to_int(v);
      if (n < 1) throw std::invalid_argument("samples must be >= 1");
      c.export_samples = static_cast<std::size_t>(n);
    };
    return m;
  }();
  return keys;
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& [k, _] : schema()) out.push_back(k);
  return out;
}

CliConfig parse_config(std::istream& in, const std::string& source) {
  CliConfig cfg;
  std::string section;
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& msg) -> ConfigError {
    return ConfigError(source + ":" + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw fail("malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw fail("expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) throw fail("key '" + key + "' outside of a [section]");
    const std::string full = section + "." + key;
    const auto it = schema().find(full);
    if (it == schema().end()) throw fail("unknown key '" + full + "'");
    if (value.empty()) throw fail("empty value for '" + full + "'");
    try {
      it->second(cfg, value);
    } catch (const ConfigError& e) {
      throw fail(full + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw fail(full + ": " + e.what());
    }
  }
  return cfg;
}

CliConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

}  // namespace ce3d
