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

#include <cstdint>
#include <string>
#include <vector>

#include "gsmgp/data_io.hpp"
#include "gsmgp/model.hpp"

namespace gsmgp {

enum class HoldoutKind { cross, border };
HoldoutKind holdout_from_name(const std::string& name);

struct BenchmarkRow {
  std::string kernel;
  double rmse = 0.0;
  double loglik = 0.0;        // predictive log density of the held-out cells
  double fit_objective = 0.0;
};

struct BenchmarkResult {
  std::vector<BenchmarkRow> rows;
};

// Gaussian-process prediction conditioned on the observed grid cells only
// (ignoring imputed values), evaluated at the unobserved cells.
struct HoldoutPrediction {
  std::vector<Eigen::Index> held_out;  // flat grid indices
  Vec mean;
  Vec variance;
};
HoldoutPrediction predict_held_out(const GpModel& model, const std::vector<bool>& mask);

// Initial latents for a grid fit: each axis is seeded from the ridge of the
// slice-averaged empirical spectrogram along that axis.
GpModel seed_from_grid_spectrogram(const GridDataset& data, int q, double prior_variance);

// Fits each requested kernel on the masked grid and scores the held-out
// cells.  The frequency-seeded model family uses a single seeded restart with
// tight latent priors; stationary baselines use multi-restart maximum
// likelihood.
BenchmarkResult benchmark_run(const GridDataset& full, HoldoutKind holdout,
                              const std::vector<KernelKind>& kernels, int q, std::uint64_t seed,
                              bool verbose);

void save_benchmark_csv(const std::string& path, const BenchmarkResult& result);

}  // namespace gsmgp
