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

#include "gsmgp/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "gsmgp/gp_core.hpp"
#include "gsmgp/train.hpp"

namespace gsmgp {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

double population_variance(const Vec& y) {
  const double mean = y.mean();
  const double var = (y.array() - mean).square().sum() / static_cast<double>(y.size());
  return std::max(var, 1e-12);
}

// Ridge of the slice-averaged amplitude spectrogram along one grid axis:
// frames of length `window` (periodic Hann taper, half-window hop, 4x
// zero-padding) are transformed per slice, amplitudes averaged over slices,
// and the strongest non-constant bin recorded per frame.
struct AxisRidge {
  Vec centers;    // axis position of each frame
  Vec frequency;  // ridge frequency per frame
  Vec magnitude;  // averaged amplitude at the ridge bin
};

AxisRidge axis_spectrogram_ridge(const Vec& axis, const Mat& slices) {
  const Eigen::Index n = axis.size();
  if (slices.rows() != n) throw std::invalid_argument("axis spectrogram: slice shape mismatch");
  if (n < 8) throw std::invalid_argument("axis spectrogram: axis shorter than one window");
  const double dt = (axis[n - 1] - axis[0]) / static_cast<double>(n - 1);
  for (Eigen::Index i = 1; i < n; ++i)
    if (std::abs((axis[i] - axis[i - 1]) - dt) > 1e-6 * std::abs(dt))
      throw std::invalid_argument("axis spectrogram: axis is not equispaced");

  int window = 2 * static_cast<int>(n / 4);
  window = std::clamp(window, 8, 64);
  window = std::min<int>(window, static_cast<int>(n));
  const int hop = window / 2;
  const int nfft = 4 * window;
  const int bins = nfft / 2 + 1;

  Vec hann(window);
  for (int k = 0; k < window; ++k)
    hann[k] = 0.5 - 0.5 * std::cos(kTwoPi * k / static_cast<double>(window));

  std::vector<Eigen::Index> starts;
  for (Eigen::Index s = 0; s + window <= n; s += hop) starts.push_back(s);

  AxisRidge out;
  out.centers = Vec(starts.size());
  out.frequency = Vec(starts.size());
  out.magnitude = Vec(starts.size());
  const Eigen::Index cols = slices.cols();
  for (std::size_t f = 0; f < starts.size(); ++f) {
    const Eigen::Index s0 = starts[f];
    Vec avg = Vec::Zero(bins);
    for (Eigen::Index c = 0; c < cols; ++c) {
      for (int j = 0; j < bins; ++j) {
        double re = 0.0, im = 0.0;
        for (int k = 0; k < window; ++k) {
          const double phase = -kTwoPi * j * k / static_cast<double>(nfft);
          const double v = hann[k] * slices(s0 + k, c);
          re += v * std::cos(phase);
          im += v * std::sin(phase);
        }
        avg[j] += std::hypot(re, im);
      }
    }
    avg /= static_cast<double>(cols);
    Eigen::Index best = 1;
    for (Eigen::Index j = 1; j < bins; ++j)
      if (avg[j] > avg[best]) best = j;
    out.centers[f] = axis[s0 + window / 2];
    out.frequency[f] = static_cast<double>(best) / (nfft * dt);
    out.magnitude[f] = avg[best];
  }
  return out;
}

// Mode-d unfolding of the row-major grid vector: rows indexed by the d-th
// coordinate, columns by the remaining coordinates.
Mat unfold_axis(const Vec& y, const std::vector<Eigen::Index>& dims, int d) {
  Eigen::Index pre = 1, post = 1;
  for (int q = 0; q < d; ++q) pre *= dims[q];
  for (int q = d + 1; q < static_cast<int>(dims.size()); ++q) post *= dims[q];
  const Eigen::Index nd = dims[d];
  Mat out(nd, pre * post);
  for (Eigen::Index a = 0; a < pre; ++a)
    for (Eigen::Index i = 0; i < nd; ++i)
      for (Eigen::Index b = 0; b < post; ++b)
        out(i, a * post + b) = y[(a * nd + i) * post + b];
  return out;
}

}  // namespace

HoldoutKind holdout_from_name(const std::string& name) {
  if (name == "cross") return HoldoutKind::cross;
  if (name == "border") return HoldoutKind::border;
  throw std::invalid_argument("unknown holdout pattern '" + name + "'");
}

HoldoutPrediction predict_held_out(const GpModel& model, const std::vector<bool>& mask) {
  const int p = model.p();
  std::vector<Eigen::Index> dims(p);
  Eigen::Index total = 1;
  for (int d = 0; d < p; ++d) {
    dims[d] = model.train_axes[d].size();
    total *= dims[d];
  }
  if (static_cast<Eigen::Index>(mask.size()) != total)
    throw std::invalid_argument("held-out prediction: mask length does not match the grid");

  std::vector<Eigen::Index> obs, held;
  for (Eigen::Index a = 0; a < total; ++a) (mask[a] ? obs : held).push_back(a);
  if (obs.empty()) throw std::invalid_argument("held-out prediction: no observed cells");

  HoldoutPrediction out;
  out.held_out = held;
  out.mean = Vec(held.size());
  out.variance = Vec(held.size());
  if (held.empty()) return out;

  // Per-cell coordinates into the factor grams.
  const auto coords = [&](Eigen::Index a) {
    std::vector<Eigen::Index> c(p);
    for (int d = p - 1; d >= 0; --d) {
      c[d] = a % dims[d];
      a /= dims[d];
    }
    return c;
  };
  std::vector<std::vector<Eigen::Index>> obs_c, held_c;
  obs_c.reserve(obs.size());
  held_c.reserve(held.size());
  for (Eigen::Index a : obs) obs_c.push_back(coords(a));
  for (Eigen::Index a : held) held_c.push_back(coords(a));

  const std::vector<Mat> factors = model.factor_grams();
  const Eigen::Index nobs = static_cast<Eigen::Index>(obs.size());
  Mat a(nobs, nobs);
  for (Eigen::Index i = 0; i < nobs; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      double v = 1.0;
      for (int d = 0; d < p; ++d) v *= factors[d](obs_c[i][d], obs_c[j][d]);
      a(i, j) = v;
      a(j, i) = v;
    }
  a.diagonal().array() += model.noise_var();
  const Mat chol = jittered_cholesky(a);

  Vec y_obs(nobs);
  for (Eigen::Index i = 0; i < nobs; ++i) y_obs[i] = model.train_y[obs[i]];
  Vec alpha = chol.triangularView<Eigen::Lower>().solve(y_obs);
  chol.transpose().triangularView<Eigen::Upper>().solveInPlace(alpha);

  Vec k(nobs);
  for (std::size_t h = 0; h < held.size(); ++h) {
    for (Eigen::Index j = 0; j < nobs; ++j) {
      double v = 1.0;
      for (int d = 0; d < p; ++d) v *= factors[d](held_c[h][d], obs_c[j][d]);
      k[j] = v;
    }
    double prior = 1.0;
    for (int d = 0; d < p; ++d) prior *= factors[d](held_c[h][d], held_c[h][d]);
    out.mean[h] = k.dot(alpha);
    const Vec half = chol.triangularView<Eigen::Lower>().solve(k);
    out.variance[h] = std::max(prior - half.squaredNorm(), 0.0);
  }
  return out;
}

GpModel seed_from_grid_spectrogram(const GridDataset& data, int q, double prior_variance) {
  data.validate();
  if (data.p() < 2)
    throw std::invalid_argument("grid spectrogram seeding requires at least two dimensions");
  if (q < 1) throw std::invalid_argument("grid spectrogram seeding: Q must be >= 1");

  const double sd = std::sqrt(population_variance(data.y));
  std::vector<Eigen::Index> dims;
  for (const Vec& axis : data.axes) dims.push_back(axis.size());

  GpModel model;
  model.kind = KernelKind::gsm;
  model.train_axes = data.axes;
  model.train_y = data.y;
  model.noise_log = 0.5 * std::log(0.1 * population_variance(data.y));

  for (int d = 0; d < data.p(); ++d) {
    const Vec& axis = data.axes[d];
    const double range = axis[axis.size() - 1] - axis[0];
    const HyperPrior prior = HyperPrior::for_range(range, prior_variance);
    const AxisRidge ridge = axis_spectrogram_ridge(axis, unfold_axis(data.y, dims, d));

    // One amplitude scale for the whole axis: mean ridge strength relative to
    // the strongest frame, floored so quiet axes still get a usable seed.
    const double rel = ridge.magnitude.mean() / std::max(ridge.magnitude.maxCoeff(), 1e-12);
    const double mag = std::max(rel, 0.2) * sd;

    GsmDim dim;
    dim.axis = axis;
    dim.nyquist = nyquist_frequency(axis);
    const double nyq = dim.nyquist;
    for (int i = 0; i < q; ++i) {
      const double scale = 1.0 + 0.5 * static_cast<double>(i);
      const double w_value = std::max(mag / static_cast<double>(i + 1), 1e-3);
      const Vec w_target = Vec::Constant(ridge.centers.size(), w_value);
      Vec mu_target(ridge.centers.size());
      for (Eigen::Index f = 0; f < ridge.centers.size(); ++f)
        mu_target[f] = std::clamp(std::min(scale * ridge.frequency[f], 0.95 * nyq), 1e-3 * nyq,
                                  (1.0 - 1e-3) * nyq);
      GsmComponentLatents c{
          latent_from_targets(ridge.centers, w_target, prior, Transform::log(), axis),
          LatentFunction(Vec::Zero(axis.size()), prior, Transform::log(), axis),
          latent_from_targets(ridge.centers, mu_target, prior, Transform::logit(nyq), axis)};
      dim.comps.push_back(std::move(c));
    }
    model.gsm.dims.push_back(std::move(dim));
  }
  return model;
}

BenchmarkResult benchmark_run(const GridDataset& full, HoldoutKind holdout,
                              const std::vector<KernelKind>& kernels, int q, std::uint64_t seed,
                              bool verbose) {
  full.validate();
  if (full.p() != 2) throw std::invalid_argument("benchmark: expected a two-dimensional grid");
  const int n1 = static_cast<int>(full.axes[0].size());
  const int n2 = static_cast<int>(full.axes[1].size());
  const std::vector<bool> mask =
      holdout == HoldoutKind::cross ? cross_mask(n1, n2, 4) : border_mask(n1, n2, 4);

  // Training sees the mean-imputed grid (the Kronecker solver needs every
  // cell); scoring conditions on the truly observed cells only.
  GridDataset train = full;
  train.mask = mask;
  impute_mean(&train);
  train.mask.assign(train.mask.size(), true);

  BenchmarkResult result;
  for (const KernelKind kind : kernels) {
    GpModel model;
    if (kind == KernelKind::gsm) {
      TrainConfig cfg;
      cfg.kind = kind;
      cfg.q = q;
      cfg.restarts = 1;
      cfg.candidates = 1;
      cfg.max_iterations = 150;
      cfg.gradient_tolerance = 1e-6;
      cfg.objective_tolerance = 1e-12;
      cfg.seed = seed;
      cfg.prior_variance = 0.25;
      cfg.verbose = verbose;
      const GpModel start = seed_from_grid_spectrogram(train, q, cfg.prior_variance);
      model = optimise_from(cfg, train, {start});
    } else {
      TrainConfig cfg;
      cfg.kind = kind;
      cfg.q = q;
      cfg.restarts = 6;
      cfg.candidates = 1;
      cfg.max_iterations = 200;
      cfg.seed = seed;
      cfg.verbose = verbose;
      model = fit(cfg, train);
    }

    const HoldoutPrediction pred = predict_held_out(model, mask);
    double se_sum = 0.0, loglik = 0.0;
    const double noise = model.noise_var();
    for (std::size_t h = 0; h < pred.held_out.size(); ++h) {
      const double truth = full.y[pred.held_out[h]];
      const double resid = pred.mean[h] - truth;
      se_sum += resid * resid;
      const double var = pred.variance[h] + noise;
      loglik += -0.5 * std::log(kTwoPi * var) - 0.5 * resid * resid / var;
    }
    BenchmarkRow row;
    row.kernel = kernel_kind_name(kind);
    row.rmse = std::sqrt(se_sum / static_cast<double>(pred.held_out.size()));
    row.loglik = loglik;
    row.fit_objective = model.summary.final_objective;
    if (verbose)
      std::fprintf(stderr, "benchmark %s: rmse %.4f loglik %.2f objective %.2f\n",
                   row.kernel.c_str(), row.rmse, row.loglik, row.fit_objective);
    result.rows.push_back(std::move(row));
  }
  return result;
}

void save_benchmark_csv(const std::string& path, const BenchmarkResult& result) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "kernel,rmse,loglik,fit_objective\n";
  char buf[256];
  for (const BenchmarkRow& row : result.rows) {
    std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g\n", row.kernel.c_str(), row.rmse,
                  row.loglik, row.fit_objective);
    out << buf;
  }
  if (!out.good()) throw std::runtime_error("failed while writing " + path);
}

}  // namespace gsmgp
