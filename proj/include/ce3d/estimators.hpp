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

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ce3d/correlation.hpp"
#include "ce3d/grid.hpp"
#include "ce3d/linalg.hpp"

namespace ce3d {

enum class EstimatorKind { kOpt3d, kTwoPlusOneD, kThreeByOneD, kGenie2d };

std::string to_string(EstimatorKind kind);
// Accepts OPT3D, 2D+1D, 3x1D, GENIE2D (case-insensitive). Throws ConfigError.
EstimatorKind parse_estimator_kind(const std::string& text);

/// Split of the observation noise power into spatial and time-frequency regularizers.
struct NoiseSplit {
  double sigma_w2 = 0.0;
  double sigma_s2 = 0.0;
  double sigma_tf2 = 0.0;
};

/// Regularizers a filter was built with; entries a kind does not use stay empty.
struct NoiseAllocation {
  std::optional<double> sigma_s2;
  std::optional<double> sigma_tf2;
  std::optional<double> sigma_t2;
  std::optional<double> sigma_f2;
};

/// Equal split sigma_*^2 = sqrt(sigma_w^2 + 1) - 1, the solution of
/// sigma_w^2 = s + s + s^2. Throws DomainError for negative input.
double split_noise_equal(double noise_power);

/// sigma_s^2 + sigma_tf^2 + sigma_s^2 sigma_tf^2 - sigma_w^2.
///
/// The budget relation comes from matching traces of A R_3D A^T + sigma_w^2 I and
/// (R_s + sigma_s^2 I) (x) (A_1 R_tf A_1^T + sigma_tf^2 I). With B = A_1 R_tf A_1^T the
/// exact expansion is
///   (R_s + s I) (x) (B + t I) - R_s (x) B = s (I (x) B) + t (R_s (x) I) + s t I,
/// i.e. the cross term s t appears once (the three-term grouping that folds it into
/// each of the first two summands counts it three times). With unit-diagonal
/// correlations every trace is (dimension) x (coefficient), giving
///   sigma_w^2 = sigma_s^2 + sigma_tf^2 + sigma_s^2 sigma_tf^2.
double split_residual(const NoiseSplit& split);

/// sigma_tf^2 = (sigma_w^2 - sigma_s^2) / (1 + sigma_s^2), the member of the budget
/// family with the given spatial share. Requires 0 <= sigma_s2 <= sigma_w2.
double split_tf_given_spatial(double sigma_w2, double sigma_s2);

/// W_s = R_s (R_s + sigma_s^2 I)^-1.
CMat build_w_s(const CMat& r_s, double sigma_s2, bool* regularized = nullptr);

/// W_tf = R_tf A^T (A R_tf A^T + sigma_tf^2 I)^-1, N x (K N_p).
CMat build_w_tf(const CMat& r_tf, const SelectionMatrix& sel_port, double sigma_tf2, bool* regularized = nullptr);

/// One-dimensional counterpart of build_w_tf (time: R_t, A_nt; frequency: R_f, A_nf).
CMat build_w_1d(const CMat& r_1d, const SelectionMatrix& sel_1d, double sigma2, bool* regularized = nullptr);

/// vec(W_tf H W_s^T) with H = vec^-1(ls) holding one antenna pair per column.
/// Equals (W_s (x) W_tf) ls.
CVec apply_2d1d(const CVec& ls, const CMat& w_s, const CMat& w_tf);

/// Interpolator from one port's pilot estimates to the full grid of an antenna pair:
/// either dense (N x K N_p) or separable W_t (x) W_f.
struct TfInterpolator {
  CMat dense;
  CMat w_t;  // N_s x K
  CMat w_f;  // N_c x N_p
  bool separable = false;

  Eigen::Index output_dim() const;
  Eigen::Index input_dim() const;
  CVec apply(const Eigen::Ref<const CVec>& pilots) const;
  CMat expand() const;
};

/// Linear channel estimator mapping stacked LS estimates (K N_p N_r N_t) to the
/// stacked full-grid channel (N N_r N_t).
class EstimatorFilter {
 public:
  static EstimatorFilter dense(EstimatorKind kind, CMat w, NoiseAllocation split, bool regularized);
  // Per-pair interpolation with the port's interpolator, then spatial combining
  // h_i = sum_j W_s(i, j) T_{port(j)} ls_j. With one shared interpolator this is W_s (x) W_tf.
  static EstimatorFilter factored(EstimatorKind kind, CMat w_s, std::vector<TfInterpolator> per_port, int n_rx,
                                  int n_tx, NoiseAllocation split, bool regularized);

  EstimatorKind kind() const { return kind_; }
  const NoiseAllocation& split() const { return split_; }
  // True when a Gram solve needed diagonal jitter.
  bool regularized() const { return regularized_; }
  bool is_factored() const { return std::holds_alternative<Factored>(form_); }

  Eigen::Index input_dim() const;
  Eigen::Index output_dim() const;

  CVec apply(const CVec& ls) const;
  CMat expand() const;

  // Present for factored filters only.
  const CMat* spatial() const;
  const std::vector<TfInterpolator>* interpolators() const;

 private:
  struct Factored {
    CMat w_s;
    std::vector<TfInterpolator> per_port;
    int n_rx = 0;
    int n_tx = 0;
  };

  EstimatorFilter() = default;

  EstimatorKind kind_ = EstimatorKind::kOpt3d;
  NoiseAllocation split_;
  bool regularized_ = false;
  std::variant<CMat, Factored> form_;
};

/// W_3D = R_3D A^T (A R_3D A^T + sigma_w^2 I)^-1.
EstimatorFilter build_w3d(const CorrelationSet& corr, const SelectionMatrix& sel, double noise_power);

/// (2D+1D): W_s from R_s and sigma_s^2, one W_tf,n per port from R_tf and sigma_tf^2.
EstimatorFilter build_2d1d(const CorrelationSet& corr, const DmrsPattern& pattern, double sigma_s2,
                           double sigma_tf2);

/// (3x1D): W_s plus W_t,n (x) W_f,n per port. Throws SeparabilityError.
EstimatorFilter build_3x1d(const CorrelationSet& corr, const DmrsPattern& pattern, double sigma_s2,
                           double sigma_t2, double sigma_f2);

/// Per-antenna-pair 2D LMMSE with the true R_tf and the full noise power; no
/// spatial combining (W_s = I).
EstimatorFilter build_genie_2d(const CorrelationSet& corr, const DmrsPattern& pattern, double noise_power);

/// trace(R - W A R - R A^T W^H + W (A R A^T + sigma_w^2 I) W^H) / (N N_r N_t).
double analytic_mse(const CMat& w, const CorrelationSet& corr, const SelectionMatrix& sel, double noise_power);
double analytic_mse(const EstimatorFilter& filter, const CorrelationSet& corr, const SelectionMatrix& sel,
                    double noise_power);

/// Thread-safe memo of built filters, keyed by (correlation fingerprint, SNR, estimator).
class FilterCache {
 public:
  using Builder = std::function<EstimatorFilter()>;

  std::shared_ptr<const EstimatorFilter> get_or_build(const std::string& key, const Builder& build);
  std::size_t size() const;
  std::size_t hits() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<const EstimatorFilter>> filters_;
  std::size_t hits_ = 0;
};

}  // namespace ce3d
