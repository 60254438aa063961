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

#include "gsmgp/model.hpp"
#include "gsmgp/spectral.hpp"
#include "gsmgp/types.hpp"

namespace gsmgp {

// Grid-shaped dataset: values stored row-major with the last axis fastest;
// mask marks observed cells, unobserved cells hold imputed values.
struct GridDataset {
  std::vector<Vec> axes;
  Vec y;
  std::vector<bool> mask;

  int p() const { return static_cast<int>(axes.size()); }
  Eigen::Index size() const { return y.size(); }
  Eigen::Index observed_count() const;
  void validate() const;
};

// Replaces unobserved values with the mean of the observed cells; for three
// dimensions the mean is taken per slice of the first axis, so each slice is
// imputed from its own observations.
void impute_mean(GridDataset* data);

GridDataset load_series(const std::string& path);
GridDataset load_grid(const std::string& values_path, const std::string& mask_path,
                      const std::vector<std::string>& axes_paths);

struct ChirpTruth {
  Vec mu;      // generating frequency function at the axis points
  double ell = 0.0;
  double w = 0.0;
};

// Draws y ~ N(0, K + noise I) for the single-component frequency-sweep kernel
// mu(x) = 1 + (1-x)^2 on [-1, 1] with constant lengthscale exp(-1) and unit
// weight.
GridDataset simulate_chirp(int n, double noise_var, std::uint64_t seed,
                           ChirpTruth* truth = nullptr);

enum class TexturePattern { freq_sweep, stationary_weave };
TexturePattern texture_pattern_from_name(const std::string& name);

// Synthetic two-dimensional textures on axes j/n: freq_sweep multiplies a
// chirped sinusoid along the first axis with a fixed sinusoid along the
// second; stationary_weave is periodic along both axes.
GridDataset simulate_texture(int n1, int n2, TexturePattern pattern, double noise_var,
                             std::uint64_t seed);

// Holdout masks (true = observed): a central cross of the given thickness in
// both directions, or a border ring of the given width.
std::vector<bool> cross_mask(int n1, int n2, int thickness);
std::vector<bool> border_mask(int n1, int n2, int width);

void save_model(const GpModel& model, const std::string& path);
GpModel load_model(const std::string& path);

void save_series_csv(const std::string& path, const Vec& x, const Vec& y);
void save_grid_csv(const std::string& path, const GridDataset& data);
void save_mask_csv(const std::string& path, const GridDataset& data);
void save_spectrogram_csv(const std::string& path, const Spectrogram& spec);
// Rows of (inputs..., mean, variance).
void save_prediction_csv(const std::string& path, const Mat& inputs, const Vec& mean,
                         const Vec& variance);

struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;
  std::uint64_t seed = 0;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  double wall_clock_seconds = 0.0;
  bool has_objective = false;
  double final_objective = 0.0;
};

// Written beside each command output as <path>.manifest.json.
void write_manifest(const RunManifest& manifest, const std::string& output_path);

// Parses a per-dimension grid specification: comma-separated
// lin(start,stop,count) entries, one per dimension.
std::vector<Vec> parse_grid_spec(const std::string& spec);

}  // namespace gsmgp

