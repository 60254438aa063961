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
#include <vector>

#include "gsmgp/data_io.hpp"
#include "gsmgp/gp_core.hpp"
#include "gsmgp/model.hpp"

namespace gsmgp {

enum class InitKind { prior, spectrogram };

struct TrainConfig {
  KernelKind kind = KernelKind::gsm;
  int q = 1;
  int restarts = 10;
  int candidates = 100;  // per restart
  int max_iterations = 500;
  double gradient_tolerance = 1e-5;
  double objective_tolerance = 1e-9;
  std::uint64_t seed = 0;
  InitKind init = InitKind::prior;
  double prior_variance = 1.0;
  bool verbose = true;  // progress lines to standard error

  void validate() const;
};

// Dense Cholesky for one-dimensional data, Kronecker algebra for grids.
Backend choose_backend(const GridDataset& data);

// Candidate (restart r, draw c) is generated from sub-seed
// mix_seed(seed, r * candidates + c); exposed so tests can rebuild the pool.
GpModel make_candidate(const TrainConfig& config, const GridDataset& data,
                       std::uint64_t candidate_seed);

// One initial model per restart: the best of `candidates` prior draws by
// objective value (gradient-free screening).
std::vector<GpModel> screen_candidates(const TrainConfig& config, const GridDataset& data);

// Multi-restart quasi-Newton ascent on the log posterior; returns the restart
// with the highest final objective (ties broken by lowest index).
GpModel fit(const TrainConfig& config, const GridDataset& data);

// The optimisation stage of `fit` alone: one L-BFGS run per provided start.
GpModel optimise_from(const TrainConfig& config, const GridDataset& data,
                      const std::vector<GpModel>& starts);

// Maps the empirical spectrogram of a one-dimensional series to initial
// latents: the ridge frequency seeds mu (component i uses the ridge scaled by
// 1 + i/2), window peak magnitudes seed w, lengthscales start at the prior
// median.  A silent series falls back to prior sampling.
GpModel init_from_spectrogram(const GridDataset& series, int q, const HyperPrior& prior,
                              std::uint64_t seed);

// Latent whose transformed values track `targets` at `centers`: the targets
// are transformed, carried onto the axis by the conditional mean of a unit
// squared-exponential interpolant (prior lengthscale, ridge-regularised at
// the centres), then whitened exactly against the prior Cholesky factor.
LatentFunction latent_from_targets(const Vec& centers, const Vec& targets_constrained,
                                   const HyperPrior& prior, const Transform& transform,
                                   const Vec& axis, double regularisation = 1e-4);

}  // namespace gsmgp
