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
#include <cstdint>
#include <string>
#include <vector>

namespace ce3d {

inline constexpr char kDatasetMagic[4] = {'C', 'E', '3', 'D'};
inline constexpr std::uint32_t kDatasetVersion = 1;

/// Binary dataset, all little-endian:
///
///   "CE3D" | version u32 | n_samples N_r N_t N_s N_c K N_p (u32 each)
///   per sample:
///     channel  f32[N_r N_t N_s N_c][2]   (re, im), stacked rx, tx, symbol, subcarrier
///     ls       f32[N_r N_t K N_p][2]     (re, im), stacked rx, tx, DMRS symbol, pilot
///     noise    f32
///     seed     u64
struct DatasetDims {
  std::uint32_t n_samples = 0;
  std::uint32_t n_rx = 0;
  std::uint32_t n_tx = 0;
  std::uint32_t n_symbols = 0;
  std::uint32_t n_subcarriers = 0;
  std::uint32_t k = 0;
  std::uint32_t n_p = 0;

  std::size_t channel_floats() const;
  std::size_t ls_floats() const;
  std::size_t sample_bytes() const;
  bool operator==(const DatasetDims&) const = default;
};

struct DatasetSample {
  std::vector<float> channel;
  std::vector<float> ls;
  float noise_power = 0.0f;
  std::uint64_t seed = 0;
  bool operator==(const DatasetSample&) const = default;
};

struct Dataset {
  std::uint32_t version = kDatasetVersion;
  DatasetDims dims;
  std::vector<DatasetSample> samples;
};

inline constexpr std::size_t kDatasetHeaderBytes = 4 + 4 + 7 * 4;

std::size_t dataset_file_size(const DatasetDims& dims);

// Throws std::runtime_error naming the path (and field) on failure.
void write_dataset(const std::string& path, const Dataset& data);
Dataset read_dataset(const std::string& path);
DatasetDims read_dataset_header(const std::string& path, std::uint32_t* version = nullptr);

}  // namespace ce3d
