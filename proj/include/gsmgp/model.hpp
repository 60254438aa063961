/*
 * Copyright 2026 the gsmgp authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <string>
#include <vector>

#include "gsmgp/kernels.hpp"
#include "gsmgp/latent.hpp"
#include "gsmgp/types.hpp"

namespace gsmgp {

enum class KernelKind { gsm, se, sm, ss };

std::string kernel_kind_name(KernelKind k);
KernelKind kernel_kind_from_name(const std::string& name);

// Latent triple of one GSM component along one dimension.
struct GsmComponentLatents {
  LatentFunction w;    // log transform
  LatentFunction ell;  // log transform
  LatentFunction mu;   // logit transform, bounded by the axis Nyquist
};

struct GsmDim {
  Vec axis;
  double nyquist = 0.0;
  std::vector<GsmComponentLatents> comps;

  // Constrained latent values of component i on the training axis.
  GsmComponentValues values(int comp) const;
};

// Full GSM hyperfunction set: per dimension, per component latents.
struct GsmParams {
  std::vector<GsmDim> dims;

  int q() const { return dims.empty() ? 0 : static_cast<int>(dims[0].comps.size()); }
  int p() const { return static_cast<int>(dims.size()); }
  // Whitened parameters per dimension (all components, w then ell then mu blocks).
  Eigen::Index dim_param_count(int dim) const;
  Eigen::Index param_count() const;  // latents only, excludes noise

  // Fresh prior draw with independent sub-seeds per latent function.
  static GsmParams sample(const std::vector<Vec>& axes, int q, const HyperPrior& prior,
                          uint64_t seed);
  // Constant constrained values (w, ell, mu) on every axis.
  static GsmParams constant(const std::vector<Vec>& axes, int q, const HyperPrior& prior, double w,
                            double ell, double mu);
};

// Stationary baseline parameters, stored unconstrained.
//   se: dim_params[p] = [log lengthscale_p], amplitude_log = log sigma_f^2
//   sm: dim_params[p] = [log w_i, log sigma_i, logit mu_i] x Q
//   ss: dim_params[p] = [logit s_i] x Q, amplitude_log = log amplitude
struct BaselineParams {
  KernelKind kind = KernelKind::se;
  std::vector<Vec> dim_params;
  double amplitude_log = 0.0;
  std::vector<double> nyquists;
  int q = 1;

  bool has_amplitude() const { return kind != KernelKind::sm; }
  Eigen::Index param_count() const;  // excludes noise
};

struct RestartInfo {
  int index = 0;
  double objective = 0.0;
  int iterations = 0;
  std::string reason;
};

struct FitSummary {
  double final_objective = 0.0;
  int chosen_restart = -1;
  std::vector<RestartInfo> restarts;
};

// Serializable fit artifact: kernel parameters + noise + training data.
struct GpModel {
  KernelKind kind = KernelKind::gsm;
  GsmParams gsm;
  BaselineParams baseline;
  double noise_log = 0.0;  // log sigma_n
  std::vector<Vec> train_axes;
  Vec train_y;
  FitSummary summary;

  double noise_var() const { return std::exp(2.0 * noise_log); }
  int p() const { return static_cast<int>(train_axes.size()); }
  Eigen::Index data_size() const;
  Eigen::Index param_count() const;  // full flat size including noise

  // Canonical flat parameter order: per dimension, per component,
  // [whitened w | whitened ell | whitened mu]; baselines use their dim blocks
  // followed by the amplitude; noise_log is always last.
  Vec pack() const;
  void unpack(const Vec& theta);

  // Per-dimension Gram factors on the training axes.
  std::vector<Mat> factor_grams() const;
};

}  // namespace gsmgp
