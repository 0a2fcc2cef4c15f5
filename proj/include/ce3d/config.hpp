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

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "ce3d/harness.hpp"

namespace ce3d {

/// Parsed run configuration: the sweep settings plus CLI-only knobs.
struct CliConfig {
  SweepConfig sweep;
  std::size_t export_samples = 512;
};

/// Plain-text `key = value` format with `[section]` headers and `#` comments.
/// Sections: grid, pattern, channel, sweep, export. Every key is checked against
/// the schema; unknown keys and malformed values throw ConfigError naming
/// `source` and the line number. Keys left out keep their defaults.
CliConfig parse_config(std::istream& in, const std::string& source);

/// Throws ConfigError naming `path` if the file cannot be opened.
CliConfig load_config(const std::string& path);

/// Every accepted key as "section.key".
std::vector<std::string> config_keys();

}  // namespace ce3d
