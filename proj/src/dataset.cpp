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

#include "ce3d/dataset.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace ce3d {

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f32(std::ostream& os, float f) { put_u32(os, std::bit_cast<std::uint32_t>(f)); }

class Reader {
 public:
  Reader(std::istream& is, std::string path) : is_(is), path_(std::move(path)) {}

  std::uint32_t u32(const char* field) {
    unsigned char b[4];
    read(b, 4, field);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }
  std::uint64_t u64(const char* field) {
    unsigned char b[8];
    read(b, 8, field);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }
  float f32(const char* field) { return std::bit_cast<float>(u32(field)); }

  void read(unsigned char* dst, std::size_t n, const char* field) {
    is_.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is_.gcount()) != n) {
      throw std::runtime_error(path_ + ": truncated while reading " + field);
    }
  }

 private:
  std::istream& is_;
  std::string path_;
};

DatasetDims read_header(Reader& r, const std::string& path, std::uint32_t* version) {
  unsigned char magic[4];
  r.read(magic, 4, "magic");
  if (std::memcmp(magic, kDatasetMagic, 4) != 0) throw std::runtime_error(path + ": bad magic (expected CE3D)");
  const std::uint32_t v = r.u32("version");
  if (v != kDatasetVersion) throw std::runtime_error(path + ": unsupported version " + std::to_string(v));
  if (version != nullptr) *version = v;
  DatasetDims d;
  d.n_samples = r.u32("n_samples");
  d.n_rx = r.u32("n_rx");
  d.n_tx = r.u32("n_tx");
  d.n_symbols = r.u32("n_symbols");
  d.n_subcarriers = r.u32("n_subcarriers");
  d.k = r.u32("k");
  d.n_p = r.u32("n_p");
  if (d.n_rx == 0 || d.n_tx == 0 || d.n_symbols == 0 || d.n_subcarriers == 0 || d.k == 0 || d.n_p == 0) {
    throw std::runtime_error(path + ": header has a zero dimension");
  }
  return d;
}

}  // namespace

std::size_t DatasetDims::channel_floats() const {
  return 2ULL * n_rx * n_tx * n_symbols * n_subcarriers;
}

std::size_t DatasetDims::ls_floats() const { return 2ULL * n_rx * n_tx * k * n_p; }

std::size_t DatasetDims::sample_bytes() const { return 4 * (channel_floats() + ls_floats() + 1) + 8; }

std::size_t dataset_file_size(const DatasetDims& dims) {
  return kDatasetHeaderBytes + static_cast<std::size_t>(dims.n_samples) * dims.sample_bytes();
}

void write_dataset(const std::string& path, const Dataset& data) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error(path + ": cannot open for writing");
  const auto& d = data.dims;
  if (data.samples.size() != d.n_samples) throw std::runtime_error(path + ": sample count differs from header");

  os.write(kDatasetMagic, 4);
  put_u32(os, data.version);
  for (std::uint32_t v : {d.n_samples, d.n_rx, d.n_tx, d.n_symbols, d.n_subcarriers, d.k, d.n_p}) put_u32(os, v);
  for (const auto& s : data.samples) {
    if (s.channel.size() != d.channel_floats() || s.ls.size() != d.ls_floats()) {
      throw std::runtime_error(path + ": sample tensor size differs from header dims");
    }
    for (float f : s.channel) put_f32(os, f);
    for (float f : s.ls) put_f32(os, f);
    put_f32(os, s.noise_power);
    put_u64(os, s.seed);
  }
  os.flush();
  if (!os) throw std::runtime_error(path + ": write failed");
}

DatasetDims read_dataset_header(const std::string& path, std::uint32_t* version) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error(path + ": cannot open for reading");
  Reader r(is, path);
  return read_header(r, path, version);
}

Dataset read_dataset(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error(path + ": cannot open for reading");
  Reader r(is, path);
  Dataset data;
  data.dims = read_header(r, path, &data.version);
  const auto& d = data.dims;
  data.samples.resize(d.n_samples);
  for (auto& s : data.samples) {
    s.channel.resize(d.channel_floats());
    s.ls.resize(d.ls_floats());
    for (float& f : s.channel) f = r.f32("channel");
    for (float& f : s.ls) f = r.f32("ls");
    s.noise_power = r.f32("noise_power");
    s.seed = r.u64("seed");
  }
  if (is.peek() != std::char_traits<char>::eof()) throw std::runtime_error(path + ": trailing bytes after last sample");
  return data;
}

}  // namespace ce3d
