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

#include "ce3d/estimators.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "ce3d/errors.hpp"

namespace ce3d {

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kOpt3d:
      return "OPT3D";
    case EstimatorKind::kTwoPlusOneD:
      return "2D+1D";
    case EstimatorKind::kThreeByOneD:
      return "3x1D";
    case EstimatorKind::kGenie2d:
      return "GENIE2D";
  }
  return "?";
}

EstimatorKind parse_estimator_kind(const std::string& text) {
  std::string up = text;
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
  if (up == "OPT3D") return EstimatorKind::kOpt3d;
  if (up == "2D+1D") return EstimatorKind::kTwoPlusOneD;
  if (up == "3X1D") return EstimatorKind::kThreeByOneD;
  if (up == "GENIE2D") return EstimatorKind::kGenie2d;
  throw ConfigError("unknown estimator '" + text + "' (expected OPT3D, 2D+1D, 3x1D or GENIE2D)");
}

double split_noise_equal(double noise_power) {
  if (!(noise_power >= 0.0)) throw DomainError("noise power must be nonnegative");
  // sqrt(1 + x) - 1 without cancellation for small x
  return noise_power / (std::sqrt(noise_power + 1.0) + 1.0);
}

double split_residual(const NoiseSplit& split) {
  return split.sigma_s2 + split.sigma_tf2 + split.sigma_s2 * split.sigma_tf2 - split.sigma_w2;
}

double split_tf_given_spatial(double sigma_w2, double sigma_s2) {
  if (!(sigma_s2 >= 0.0) || sigma_s2 > sigma_w2) {
    throw DomainError("spatial share must satisfy 0 <= sigma_s^2 <= sigma_w^2");
  }
  return (sigma_w2 - sigma_s2) / (1.0 + sigma_s2);
}

CMat build_w_s(const CMat& r_s, double sigma_s2, bool* regularized) {
  if (r_s.rows() != r_s.cols()) throw DimensionError("R_s must be square");
  if (!(sigma_s2 >= 0.0)) throw DomainError("sigma_s^2 must be nonnegative");
  return hermitian_right_solve(r_s, r_s, sigma_s2, regularized);
}

CMat build_w_tf(const CMat& r_tf, const SelectionMatrix& sel_port, double sigma_tf2, bool* regularized) {
  if (r_tf.rows() != r_tf.cols() || sel_port.cols() != r_tf.rows()) {
    throw DimensionError("selection columns must match the correlation size");
  }
  if (!(sigma_tf2 >= 0.0)) throw DomainError("noise share must be nonnegative");
  return hermitian_right_solve(sel_port.take_columns(r_tf), sel_port.restrict(r_tf), sigma_tf2, regularized);
}

CMat build_w_1d(const CMat& r_1d, const SelectionMatrix& sel_1d, double sigma2, bool* regularized) {
  return build_w_tf(r_1d, sel_1d, sigma2, regularized);
}

CVec apply_2d1d(const CVec& ls, const CMat& w_s, const CMat& w_tf) {
  const Eigen::Index pairs = w_s.cols();
  if (w_s.rows() != pairs || ls.size() != w_tf.cols() * pairs) {
    throw DimensionError("apply_2d1d: ls has length " + std::to_string(ls.size()) + ", expected " +
                         std::to_string(w_tf.cols() * pairs));
  }
  const Eigen::Map<const CMat> h(ls.data(), w_tf.cols(), pairs);
  const CMat out = w_tf * h * w_s.transpose();
  return Eigen::Map<const CVec>(out.data(), out.size());
}

Eigen::Index TfInterpolator::output_dim() const { return separable ? w_t.rows() * w_f.rows() : dense.rows(); }

Eigen::Index TfInterpolator::input_dim() const { return separable ? w_t.cols() * w_f.cols() : dense.cols(); }

CVec TfInterpolator::apply(const Eigen::Ref<const CVec>& pilots) const {
  if (!separable) return dense * pilots;
  // pilots are symbol-major: column k of an N_p x K matrix is DMRS symbol k
  const Eigen::Map<const CMat> x(pilots.data(), w_f.cols(), w_t.cols());
  const CMat y = w_f * x * w_t.transpose();
  return Eigen::Map<const CVec>(y.data(), y.size());
}

CMat TfInterpolator::expand() const { return separable ? CMat(kron(w_t, w_f)) : dense; }

EstimatorFilter EstimatorFilter::dense(EstimatorKind kind, CMat w, NoiseAllocation split, bool regularized) {
  EstimatorFilter f;
  f.kind_ = kind;
  f.split_ = split;
  f.regularized_ = regularized;
  f.form_ = std::move(w);
  return f;
}

EstimatorFilter EstimatorFilter::factored(EstimatorKind kind, CMat w_s, std::vector<TfInterpolator> per_port,
                                          int n_rx, int n_tx, NoiseAllocation split, bool regularized) {
  if (w_s.rows() != static_cast<Eigen::Index>(n_rx) * n_tx || w_s.cols() != w_s.rows()) {
    throw DimensionError("spatial filter must be (N_r N_t) x (N_r N_t)");
  }
  if (static_cast<int>(per_port.size()) != n_tx || per_port.empty()) {
    throw DimensionError("one interpolator per transmit port required");
  }
  for (const auto& t : per_port) {
    if (t.output_dim() != per_port.front().output_dim() || t.input_dim() != per_port.front().input_dim()) {
      throw DimensionError("port interpolators differ in shape");
    }
  }
  EstimatorFilter f;
  f.kind_ = kind;
  f.split_ = split;
  f.regularized_ = regularized;
  f.form_ = Factored{std::move(w_s), std::move(per_port), n_rx, n_tx};
  return f;
}

Eigen::Index EstimatorFilter::input_dim() const {
  if (const auto* w = std::get_if<CMat>(&form_)) return w->cols();
  const auto& f = std::get<Factored>(form_);
  return f.per_port.front().input_dim() * f.w_s.cols();
}

Eigen::Index EstimatorFilter::output_dim() const {
  if (const auto* w = std::get_if<CMat>(&form_)) return w->rows();
  const auto& f = std::get<Factored>(form_);
  return f.per_port.front().output_dim() * f.w_s.rows();
}

CVec EstimatorFilter::apply(const CVec& ls) const {
  if (ls.size() != input_dim()) {
    throw DimensionError("filter input has length " + std::to_string(ls.size()) + ", expected " +
                         std::to_string(input_dim()));
  }
  if (const auto* w = std::get_if<CMat>(&form_)) return *w * ls;

  const auto& f = std::get<Factored>(form_);
  const Eigen::Index p = f.per_port.front().input_dim();
  const Eigen::Index n = f.per_port.front().output_dim();
  const Eigen::Index pairs = f.w_s.cols();
  CMat interp(n, pairs);
  for (Eigen::Index j = 0; j < pairs; ++j) {
    const auto& t = f.per_port[static_cast<std::size_t>(j % f.n_tx)];
    interp.col(j) = t.apply(ls.segment(j * p, p));
  }
  const CMat out = interp * f.w_s.transpose();
  return Eigen::Map<const CVec>(out.data(), out.size());
}

CMat EstimatorFilter::expand() const {
  if (const auto* w = std::get_if<CMat>(&form_)) return *w;
  const auto& f = std::get<Factored>(form_);
  const Eigen::Index p = f.per_port.front().input_dim();
  const Eigen::Index n = f.per_port.front().output_dim();
  const Eigen::Index pairs = f.w_s.cols();
  std::vector<CMat> blocks;
  for (const auto& t : f.per_port) blocks.push_back(t.expand());
  CMat out(n * pairs, p * pairs);
  for (Eigen::Index i = 0; i < pairs; ++i) {
    for (Eigen::Index j = 0; j < pairs; ++j) {
      out.block(i * n, j * p, n, p) = f.w_s(i, j) * blocks[static_cast<std::size_t>(j % f.n_tx)];
    }
  }
  return out;
}

const CMat* EstimatorFilter::spatial() const {
  const auto* f = std::get_if<Factored>(&form_);
  return f != nullptr ? &f->w_s : nullptr;
}

const std::vector<TfInterpolator>* EstimatorFilter::interpolators() const {
  const auto* f = std::get_if<Factored>(&form_);
  return f != nullptr ? &f->per_port : nullptr;
}

EstimatorFilter build_w3d(const CorrelationSet& corr, const SelectionMatrix& sel, double noise_power) {
  if (!(noise_power >= 0.0)) throw DomainError("noise power must be nonnegative");
  bool reg = false;
  CMat w = hermitian_right_solve(corr.cross(sel), corr.gram(sel), noise_power, &reg);
  return EstimatorFilter::dense(EstimatorKind::kOpt3d, std::move(w), NoiseAllocation{}, reg);
}

EstimatorFilter build_2d1d(const CorrelationSet& corr, const DmrsPattern& pattern, double sigma_s2,
                           double sigma_tf2) {
  const GridConfig& grid = corr.grid();
  bool reg = false;
  CMat w_s = build_w_s(corr.r_s(), sigma_s2, &reg);
  std::vector<TfInterpolator> ports;
  for (int t = 0; t < grid.n_tx; ++t) {
    bool r = false;
    TfInterpolator interp;
    interp.dense = build_w_tf(corr.r_tf(), selection_matrix_port(pattern, t, grid), sigma_tf2, &r);
    reg = reg || r;
    ports.push_back(std::move(interp));
  }
  NoiseAllocation split;
  split.sigma_s2 = sigma_s2;
  split.sigma_tf2 = sigma_tf2;
  return EstimatorFilter::factored(EstimatorKind::kTwoPlusOneD, std::move(w_s), std::move(ports), grid.n_rx,
                                   grid.n_tx, split, reg);
}

EstimatorFilter build_3x1d(const CorrelationSet& corr, const DmrsPattern& pattern, double sigma_s2,
                           double sigma_t2, double sigma_f2) {
  const GridConfig& grid = corr.grid();
  bool reg = false;
  CMat w_s = build_w_s(corr.r_s(), sigma_s2, &reg);
  std::vector<TfInterpolator> ports;
  for (int t = 0; t < grid.n_tx; ++t) {
    const auto [sel_t, sel_f] = selection_matrices_1d(pattern, t, grid);
    bool rt = false;
    bool rf = false;
    TfInterpolator interp;
    interp.separable = true;
    interp.w_t = build_w_1d(corr.r_t(), sel_t, sigma_t2, &rt);
    interp.w_f = build_w_1d(corr.r_f(), sel_f, sigma_f2, &rf);
    reg = reg || rt || rf;
    ports.push_back(std::move(interp));
  }
  NoiseAllocation split;
  split.sigma_s2 = sigma_s2;
  split.sigma_t2 = sigma_t2;
  split.sigma_f2 = sigma_f2;
  return EstimatorFilter::factored(EstimatorKind::kThreeByOneD, std::move(w_s), std::move(ports), grid.n_rx,
                                   grid.n_tx, split, reg);
}

EstimatorFilter build_genie_2d(const CorrelationSet& corr, const DmrsPattern& pattern, double noise_power) {
  const GridConfig& grid = corr.grid();
  bool reg = false;
  std::vector<TfInterpolator> ports;
  for (int t = 0; t < grid.n_tx; ++t) {
    bool r = false;
    TfInterpolator interp;
    interp.dense = build_w_tf(corr.r_tf(), selection_matrix_port(pattern, t, grid), noise_power, &r);
    reg = reg || r;
    ports.push_back(std::move(interp));
  }
  NoiseAllocation split;
  split.sigma_s2 = 0.0;
  split.sigma_tf2 = noise_power;
  return EstimatorFilter::factored(EstimatorKind::kGenie2d, CMat::Identity(grid.n_pairs(), grid.n_pairs()),
                                   std::move(ports), grid.n_rx, grid.n_tx, split, reg);
}

double analytic_mse(const CMat& w, const CorrelationSet& corr, const SelectionMatrix& sel, double noise_power) {
  if (w.rows() != corr.dim() || w.cols() != sel.rows() || sel.cols() != corr.dim()) {
    throw DimensionError("analytic_mse: filter is " + std::to_string(w.rows()) + "x" + std::to_string(w.cols()) +
                         ", expected " + std::to_string(corr.dim()) + "x" + std::to_string(sel.rows()));
  }
  const CMat c = corr.cross(sel);  // R A^T
  CMat g = corr.gram(sel);         // A R A^T
  g.diagonal().array() += noise_power;

  const double cross_term = (w.array() * c.array().conjugate()).sum().real();
  const double quad_term = ((w * g).array() * w.array().conjugate()).sum().real();
  return (corr.trace() - 2.0 * cross_term + quad_term) / static_cast<double>(corr.dim());
}

double analytic_mse(const EstimatorFilter& filter, const CorrelationSet& corr, const SelectionMatrix& sel,
                    double noise_power) {
  return analytic_mse(filter.expand(), corr, sel, noise_power);
}

std::shared_ptr<const EstimatorFilter> FilterCache::get_or_build(const std::string& key, const Builder& build) {
  {
    std::lock_guard lock(mu_);
    if (auto it = filters_.find(key); it != filters_.end()) {
      ++hits_;
      return it->second;
    }
  }
  auto built = std::make_shared<const EstimatorFilter>(build());
  std::lock_guard lock(mu_);
  auto [it, inserted] = filters_.emplace(key, std::move(built));
  if (!inserted) ++hits_;
  return it->second;
}

std::size_t FilterCache::size() const {
  std::lock_guard lock(mu_);
  return filters_.size();
}

std::size_t FilterCache::hits() const {
  std::lock_guard lock(mu_);
  return hits_;
}

}  // namespace ce3d
