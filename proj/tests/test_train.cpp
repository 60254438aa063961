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

#include "gsmgp/train.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "gsmgp/data_io.hpp"
#include "gsmgp/gp_core.hpp"
#include "gsmgp/latent.hpp"
#include "gsmgp/model.hpp"
#include "gsmgp/rng.hpp"
#include "gsmgp/types.hpp"

namespace {

using namespace gsmgp;

constexpr double kTwoPi = 6.283185307179586476925286766559;

Vec linspace(double lo, double hi, Eigen::Index n) { return Vec::LinSpaced(n, lo, hi); }

GridDataset sine_series(int n, double frequency) {
  GridDataset data;
  data.axes = {linspace(0.0, 1.0, n)};
  data.y = (kTwoPi * frequency * data.axes[0].array()).sin().matrix();
  data.mask.assign(n, true);
  return data;
}

TrainConfig quick_config(KernelKind kind, uint64_t seed) {
  TrainConfig c;
  c.kind = kind;
  c.q = 1;
  c.restarts = 2;
  c.candidates = 3;
  c.max_iterations = 12;
  c.seed = seed;
  c.verbose = false;
  return c;
}

}  // namespace

TEST_CASE("train: configuration validation") {
  TrainConfig ok;
  CHECK_NOTHROW(ok.validate());
  TrainConfig c = ok;
  c.q = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = ok;
  c.restarts = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = ok;
  c.candidates = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = ok;
  c.max_iterations = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = ok;
  c.gradient_tolerance = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = ok;
  c.objective_tolerance = -1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = ok;
  c.prior_variance = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("train: backend choice by dimensionality") {
  GridDataset series = sine_series(16, 2.0);
  CHECK(choose_backend(series) == Backend::dense);
  GridDataset grid;
  grid.axes = {linspace(0, 1, 4), linspace(0, 1, 4)};
  grid.y = Vec::Zero(16);
  grid.mask.assign(16, true);
  CHECK(choose_backend(grid) == Backend::kron);
}

TEST_CASE("train: candidates are deterministic in the seed") {
  const GridDataset data = sine_series(24, 3.0);
  for (KernelKind kind : {KernelKind::gsm, KernelKind::se, KernelKind::sm, KernelKind::ss}) {
    TrainConfig c = quick_config(kind, 0);
    c.q = 2;
    const GpModel a = make_candidate(c, data, 42);
    const GpModel b = make_candidate(c, data, 42);
    const GpModel other = make_candidate(c, data, 43);
    CHECK((a.pack() - b.pack()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.pack() - other.pack()).cwiseAbs().maxCoeff() > 0.0);
    CHECK(a.kind == kind);
    if (kind != KernelKind::gsm) {
      CHECK(a.baseline.q == 2);
      CHECK(a.baseline.nyquists.size() == 1);
    }
    // Initial noise floor is a tenth of the output variance.
    const double var = (data.y.array() - data.y.mean()).square().sum() / data.y.size();
    CHECK(a.noise_var() == doctest::Approx(0.1 * var).epsilon(1e-9));
  }
}

TEST_CASE("train: screening picks the best candidate of each restart") {
  const GridDataset data = simulate_chirp(40, 0.1, 11);
  TrainConfig c = quick_config(KernelKind::gsm, 5);
  c.restarts = 2;
  c.candidates = 4;
  const std::vector<GpModel> picked = screen_candidates(c, data);
  REQUIRE(picked.size() == 2);
  const Backend backend = choose_backend(data);
  for (int r = 0; r < 2; ++r) {
    double best = -std::numeric_limits<double>::infinity();
    Vec best_pack;
    for (int k = 0; k < 4; ++k) {
      const GpModel cand =
          make_candidate(c, data, mix_seed(c.seed, static_cast<uint64_t>(r) * 4 + k));
      const double value = nll_value(cand, backend);
      if (value > best) {
        best = value;
        best_pack = cand.pack();
      }
    }
    CHECK(nll_value(picked[r], backend) == doctest::Approx(best).epsilon(1e-12));
    CHECK((picked[r].pack() - best_pack).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("train: optimisation improves the objective and records restarts") {
  const GridDataset data = simulate_chirp(40, 0.1, 17);
  TrainConfig c = quick_config(KernelKind::gsm, 2);
  c.restarts = 2;
  c.candidates = 2;
  const std::vector<GpModel> starts = screen_candidates(c, data);
  std::vector<double> initial;
  for (const GpModel& s : starts) initial.push_back(nll_value(s, Backend::dense));

  const GpModel fitted = optimise_from(c, data, starts);
  REQUIRE(fitted.summary.restarts.size() == 2);
  double best = -std::numeric_limits<double>::infinity();
  int best_index = -1;
  for (const RestartInfo& r : fitted.summary.restarts) {
    CHECK(r.objective >= initial[r.index] - 1e-9);  // ascent never loses ground
    CHECK(r.iterations >= 0);
    CHECK(!r.reason.empty());
    if (r.objective > best) {
      best = r.objective;
      best_index = r.index;
    }
  }
  CHECK(fitted.summary.chosen_restart == best_index);
  CHECK(fitted.summary.final_objective == doctest::Approx(best).epsilon(1e-12));
  CHECK(nll_value(fitted, Backend::dense) ==
        doctest::Approx(fitted.summary.final_objective).epsilon(1e-9));
}

TEST_CASE("train: fitting is deterministic") {
  const GridDataset data = simulate_chirp(36, 0.1, 23);
  for (KernelKind kind : {KernelKind::gsm, KernelKind::se}) {
    TrainConfig c = quick_config(kind, 9);
    c.max_iterations = 10;
    const GpModel a = fit(c, data);
    const GpModel b = fit(c, data);
    CHECK((a.pack() - b.pack()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.summary.final_objective == b.summary.final_objective);
    CHECK(a.summary.chosen_restart == b.summary.chosen_restart);
  }
}

TEST_CASE("train: latent targets are tracked through the interpolant") {
  const Vec centers = linspace(0.0, 1.0, 6);
  const Vec axis = linspace(0.0, 1.0, 31);
  const HyperPrior prior = HyperPrior::for_range(1.0);

  SUBCASE("constant target") {
    const LatentFunction f =
        latent_from_targets(centers, Vec::Constant(6, 2.5), prior, Transform::log(), axis);
    const Vec c = f.constrained();
    for (Eigen::Index i = 0; i < axis.size(); ++i) {
      CHECK(c[i] > 2.2);
      CHECK(c[i] < 2.8);
    }
    // Every sixth axis point coincides with a center and reproduces the target.
    for (Eigen::Index j = 0; j < centers.size(); ++j)
      CHECK(c[j * 6] == doctest::Approx(2.5).epsilon(0.02));
  }

  SUBCASE("varying target") {
    Vec targets(6);
    targets << 1.0, 2.0, 3.0, 2.0, 1.0, 1.5;
    const LatentFunction f =
        latent_from_targets(centers, targets, prior, Transform::log(), axis);
    const Vec c = f.constrained();
    for (Eigen::Index j = 0; j < centers.size(); ++j)
      CHECK(c[j * 6] == doctest::Approx(targets[j]).epsilon(0.05));
    // Whitening is exact: L theta_tilde reproduces the interpolated values.
    CHECK((f.cached_chol * f.whitened - f.transformed()).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("train: spectrogram initialisation locks onto a pure tone") {
  const GridDataset data = sine_series(128, 4.0);
  const HyperPrior prior = HyperPrior::for_range(1.0);
  const GpModel m = init_from_spectrogram(data, 2, prior, 0);
  REQUIRE(m.gsm.p() == 1);
  REQUIRE(m.gsm.q() == 2);

  const GsmComponentValues c0 = m.gsm.dims[0].values(0);
  const GsmComponentValues c1 = m.gsm.dims[0].values(1);
  // Away from the window centers the latents revert toward the prior mean, so
  // the ridge checks stay inside the span of the short-time frames.
  const Vec& axis = m.train_axes[0];
  int checked = 0;
  for (Eigen::Index i = 0; i < axis.size(); ++i) {
    if (axis[i] < 0.18 || axis[i] > 0.80) continue;
    ++checked;
    // First component rides the spectral ridge at the tone frequency; the bin
    // width of the short-time transform bounds the expected error.
    CHECK(std::abs(c0.mu[i] - 4.0) <= 1.0);
    // Second component starts at 1.5x the ridge with half the weight.
    CHECK(c1.mu[i] > c0.mu[i]);
    CHECK(c0.w[i] / c1.w[i] == doctest::Approx(2.0).epsilon(0.15));
  }
  CHECK(checked > 20);
  // Lengthscales start at the prior median, exp(0) = 1.
  CHECK((c0.ell.array() - 1.0).abs().maxCoeff() <= 1e-12);
  CHECK((c1.ell.array() - 1.0).abs().maxCoeff() <= 1e-12);
  CHECK(m.noise_var() > 0.0);
}

TEST_CASE("train: silent series falls back to prior candidates") {
  GridDataset data;
  data.axes = {linspace(0.0, 1.0, 32)};
  data.y = Vec::Zero(32);
  data.mask.assign(32, true);
  const HyperPrior prior = HyperPrior::for_range(1.0);
  const GpModel m = init_from_spectrogram(data, 1, prior, 3);

  TrainConfig fallback;
  fallback.q = 1;
  fallback.prior_variance = prior.variance;
  const GpModel expected = make_candidate(fallback, data, mix_seed(3, 0));
  CHECK((m.pack() - expected.pack()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("train: spectrogram initialisation replaces the first restart") {
  const GridDataset data = simulate_chirp(48, 0.05, 29);
  TrainConfig c = quick_config(KernelKind::gsm, 4);
  c.restarts = 1;
  c.candidates = 1;
  c.max_iterations = 5;
  c.init = InitKind::spectrogram;
  const GpModel via_fit = fit(c, data);

  const double range = data.axes[0][data.axes[0].size() - 1] - data.axes[0][0];
  const HyperPrior prior = HyperPrior::for_range(range, c.prior_variance);
  const GpModel start = init_from_spectrogram(data, c.q, prior, c.seed);
  const GpModel via_manual = optimise_from(c, data, {start});
  CHECK((via_fit.pack() - via_manual.pack()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("train: spectrogram initialisation rejects unsupported inputs") {
  GridDataset grid;
  grid.axes = {linspace(0, 1, 4), linspace(0, 1, 4)};
  grid.y = Vec::Ones(16);
  grid.mask.assign(16, true);
  const HyperPrior prior = HyperPrior::for_range(1.0);
  CHECK_THROWS_AS(init_from_spectrogram(grid, 1, prior, 0), std::invalid_argument);

  TrainConfig c = quick_config(KernelKind::gsm, 0);
  c.init = InitKind::spectrogram;
  CHECK_THROWS_AS(fit(c, grid), std::invalid_argument);

  const GridDataset tiny = sine_series(6, 1.0);
  CHECK_THROWS_AS(init_from_spectrogram(tiny, 1, prior, 0), std::invalid_argument);
}
