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

#include <complex>
#include <cstdint>

namespace ce3d {

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

enum class Stream : std::uint64_t { kChannel = 1, kPilots = 2, kNoise = 3, kSnr = 4 };

/// Key of an independent random stream for one Monte Carlo trial. Depends only on
/// (master seed, trial index, stream tag), never on evaluation order.
std::uint64_t substream_key(std::uint64_t master_seed, std::uint64_t trial, Stream tag);

/// Counter-based generator: the i-th draw is mix64(key + i * golden), so a stream
/// is a pure function of its key.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  // Circularly symmetric complex Gaussian with E|z|^2 = 1.
  std::complex<double> complex_normal();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ce3d
