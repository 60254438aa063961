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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "gsmgp/lbfgs.hpp"
#include "gsmgp/rng.hpp"
#include "gsmgp/spectral.hpp"

namespace gsmgp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double sample_variance(const Vec& y) {
  const double mean = y.mean();
  const double var = (y.array() - mean).square().sum() / static_cast<double>(y.size());
  return std::max(var, 1e-12);
}

double initial_noise_log(const Vec& y) {
  return 0.5 * std::log(0.1 * sample_variance(y));
}

std::vector<HyperPrior> dim_priors(const GridDataset& data, double variance) {
  std::vector<HyperPrior> priors;
  for (const Vec& axis : data.axes)
    priors.push_back(HyperPrior::for_range(axis[axis.size() - 1] - axis[0], variance));
  return priors;
}

GpModel model_skeleton(const TrainConfig& config, const GridDataset& data) {
  GpModel model;
  model.kind = config.kind;
  model.train_axes = data.axes;
  model.train_y = data.y;
  model.noise_log = initial_noise_log(data.y);
  return model;
}

}  // namespace

void TrainConfig::validate() const {
  if (q < 1) throw std::invalid_argument("train config: Q must be >= 1");
  if (restarts < 1 || candidates < 1)
    throw std::invalid_argument("train config: restarts and candidates must be positive");
  if (max_iterations < 1) throw std::invalid_argument("train config: iteration cap must be positive");
  if (!(gradient_tolerance > 0.0) || !(objective_tolerance > 0.0))
    throw std::invalid_argument("train config: tolerances must be positive");
  if (!(prior_variance > 0.0))
    throw std::invalid_argument("train config: prior variance must be positive");
}

Backend choose_backend(const GridDataset& data) {
  return data.p() == 1 ? Backend::dense : Backend::kron;
}

GpModel make_candidate(const TrainConfig& config, const GridDataset& data,
                       std::uint64_t candidate_seed) {
  GpModel model = model_skeleton(config, data);
  const double var_y = sample_variance(data.y);

  if (config.kind == KernelKind::gsm) {
    const auto priors = dim_priors(data, config.prior_variance);
    std::uint64_t stream = 0;
    for (int d = 0; d < data.p(); ++d) {
      GsmDim dim;
      dim.axis = data.axes[d];
      dim.nyquist = nyquist_frequency(dim.axis);
      for (int i = 0; i < config.q; ++i) {
        GsmComponentLatents c{
            sample_prior(priors[d], Transform::log(), dim.axis, mix_seed(candidate_seed, stream++)),
            sample_prior(priors[d], Transform::log(), dim.axis, mix_seed(candidate_seed, stream++)),
            sample_prior(priors[d], Transform::logit(dim.nyquist), dim.axis,
                         mix_seed(candidate_seed, stream++))};
        dim.comps.push_back(std::move(c));
      }
      model.gsm.dims.push_back(std::move(dim));
    }
    return model;
  }

  Rng rng(candidate_seed);
  BaselineParams& b = model.baseline;
  b.kind = config.kind;
  b.q = config.q;
  for (const Vec& axis : data.axes) b.nyquists.push_back(nyquist_frequency(axis));
  for (int d = 0; d < data.p(); ++d) {
    const Vec& axis = data.axes[d];
    const double range = axis[axis.size() - 1] - axis[0];
    const double nyq = b.nyquists[d];
    switch (config.kind) {
      case KernelKind::se: {
        Vec pars(1);
        pars[0] = std::log(range * rng.uniform(0.02, 0.5));
        b.dim_params.push_back(std::move(pars));
        break;
      }
      case KernelKind::sm: {
        const Transform t = Transform::logit(nyq);
        Vec pars(3 * config.q);
        for (int i = 0; i < config.q; ++i) {
          pars[3 * i] = 0.5 * std::log(var_y / config.q) + rng.uniform(-1.0, 1.0);
          pars[3 * i + 1] = std::log(nyq * rng.uniform(0.01, 0.2));
          pars[3 * i + 2] = t.forward(nyq * rng.uniform(0.05, 0.95));
        }
        b.dim_params.push_back(std::move(pars));
        break;
      }
      case KernelKind::ss: {
        const Transform t = Transform::logit(nyq);
        Vec pars(config.q);
        for (int i = 0; i < config.q; ++i) pars[i] = t.forward(nyq * rng.uniform(0.05, 0.95));
        b.dim_params.push_back(std::move(pars));
        break;
      }
      case KernelKind::gsm:
        break;
    }
  }
  if (b.has_amplitude()) b.amplitude_log = std::log(var_y);
  return model;
}

std::vector<GpModel> screen_candidates(const TrainConfig& config, const GridDataset& data) {
  config.validate();
  data.validate();
  const Backend backend = choose_backend(data);
  std::vector<GpModel> selected;
  for (int r = 0; r < config.restarts; ++r) {
    GpModel best;
    double best_value = kNegInf;
    for (int c = 0; c < config.candidates; ++c) {
      const std::uint64_t sub =
          mix_seed(config.seed, static_cast<std::uint64_t>(r) * config.candidates + c);
      GpModel cand = make_candidate(config, data, sub);
      double value = kNegInf;
      try {
        value = nll_value(cand, backend);
      } catch (const std::exception&) {
        value = kNegInf;
      }
      if (std::isfinite(value) && value > best_value) {
        best_value = value;
        best = std::move(cand);
      }
    }
    if (!std::isfinite(best_value))
      throw std::runtime_error(
          "candidate screening: no candidate produced a finite objective (restart " +
          std::to_string(r) + ")");
    selected.push_back(std::move(best));
  }
  return selected;
}

GpModel fit(const TrainConfig& config, const GridDataset& data) {
  config.validate();
  data.validate();
  std::vector<GpModel> starts = screen_candidates(config, data);
  if (config.init == InitKind::spectrogram) {
    if (data.p() != 1)
      throw std::invalid_argument("spectrogram initialisation requires a one-dimensional series");
    const HyperPrior prior = dim_priors(data, config.prior_variance)[0];
    starts[0] = init_from_spectrogram(data, config.q, prior, config.seed);
  }
  return optimise_from(config, data, starts);
}

GpModel optimise_from(const TrainConfig& config, const GridDataset& data,
                      const std::vector<GpModel>& starts) {
  config.validate();
  data.validate();
  const Backend backend = choose_backend(data);

  GpModel best;
  double best_value = kNegInf;
  FitSummary summary;
  for (int r = 0; r < static_cast<int>(starts.size()); ++r) {
    GpModel work = starts[r];
    auto objective = [&work, backend](const Vec& x, Vec& grad) -> double {
      try {
        work.unpack(x);
        const Objective o = nll_gradient(work, backend);
        grad = -o.grad;
        return -o.value;
      } catch (const std::exception&) {
        grad.setZero();
        return std::numeric_limits<double>::infinity();
      }
    };

    LbfgsOptions opts;
    opts.max_iterations = config.max_iterations;
    opts.gradient_tolerance = config.gradient_tolerance;
    opts.objective_tolerance = config.objective_tolerance;
    if (config.verbose)
      opts.on_iteration = [r](int iter, double value, double gnorm) {
        std::fprintf(stderr, "restart %d iter %d objective %.6f grad %.3e\n", r, iter, -value,
                     gnorm);
      };

    RestartInfo info;
    info.index = r;
    try {
      const LbfgsResult res = lbfgs_minimize(objective, starts[r].pack(), opts);
      work.unpack(res.x);
      info.objective = -res.value;
      info.iterations = res.iterations;
      info.reason = res.reason;
    } catch (const std::exception& e) {
      info.objective = kNegInf;
      info.reason = "error";
      if (config.verbose) std::fprintf(stderr, "restart %d failed: %s\n", r, e.what());
    }
    if (config.verbose)
      std::fprintf(stderr, "restart %d done objective %.6f (%s, %d iterations)\n", r,
                   info.objective, info.reason.c_str(), info.iterations);
    summary.restarts.push_back(info);
    if (std::isfinite(info.objective) && info.objective > best_value) {
      best_value = info.objective;
      best = work;
      summary.chosen_restart = r;
    }
  }
  if (!std::isfinite(best_value))
    throw std::runtime_error("fit: no restart produced a finite objective");
  summary.final_objective = best_value;
  best.summary = std::move(summary);
  return best;
}

LatentFunction latent_from_targets(const Vec& centers, const Vec& targets_constrained,
                                   const HyperPrior& prior, const Transform& transform,
                                   const Vec& axis, double regularisation) {
  const Eigen::Index m = centers.size();
  Vec t(m);
  for (Eigen::Index i = 0; i < m; ++i) t[i] = transform.forward(targets_constrained[i]);

  // Conditional mean of a unit squared-exponential interpolant through the
  // window centres, evaluated on the full axis.
  const double inv2l2 = 0.5 / (prior.lengthscale * prior.lengthscale);
  Mat kcc(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      const double d = centers[i] - centers[j];
      kcc(i, j) = std::exp(-d * d * inv2l2);
    }
  kcc.diagonal().array() += regularisation;
  const Vec weights = kcc.ldlt().solve(t);
  Vec on_axis = Vec::Zero(axis.size());
  for (Eigen::Index a = 0; a < axis.size(); ++a)
    for (Eigen::Index j = 0; j < m; ++j) {
      const double d = axis[a] - centers[j];
      on_axis[a] += std::exp(-d * d * inv2l2) * weights[j];
    }

  LatentFunction f(Vec::Zero(axis.size()), prior, transform, axis);
  f.whitened = f.cached_chol.triangularView<Eigen::Lower>().solve(on_axis);
  return f;
}

GpModel init_from_spectrogram(const GridDataset& series, int q, const HyperPrior& prior,
                              std::uint64_t seed) {
  if (series.p() != 1)
    throw std::invalid_argument("spectrogram initialisation requires a one-dimensional series");
  const Vec& axis = series.axes[0];
  const Eigen::Index n = axis.size();
  if (n < 8) throw std::invalid_argument("spectrogram initialisation: series shorter than one window");

  TrainConfig fallback;
  fallback.q = q;
  fallback.prior_variance = prior.variance;
  const double sd = std::sqrt(sample_variance(series.y));
  if (!((series.y.array() - series.y.mean()).abs().maxCoeff() > 0.0))
    return make_candidate(fallback, series, mix_seed(seed, 0));

  int window = 2 * static_cast<int>(n / 6);
  window = std::clamp(window, 8, 64);
  window = std::min<int>(window, static_cast<int>(n));

  const Spectrogram spec = empirical_spectrogram(axis, series.y, window, 0.5);
  const Vec ridge = spectrogram_ridge(spec, true);
  const Eigen::Index frames = spec.input_axis.size();

  // Per-window peak magnitude (mean offset excluded), floored and scaled to
  // the output standard deviation.
  Vec peak(frames);
  for (Eigen::Index f = 0; f < frames; ++f)
    peak[f] = spec.amplitude.row(f).tail(spec.amplitude.cols() - 1).maxCoeff();
  const double peak_max = peak.maxCoeff();
  if (!(peak_max > 0.0)) return make_candidate(fallback, series, mix_seed(seed, 0));
  Vec w_target(frames);
  for (Eigen::Index f = 0; f < frames; ++f)
    w_target[f] = std::max(peak[f] / peak_max, 0.2) * sd;

  GpModel model;
  model.kind = KernelKind::gsm;
  model.train_axes = series.axes;
  model.train_y = series.y;
  model.noise_log = initial_noise_log(series.y);

  GsmDim dim;
  dim.axis = axis;
  dim.nyquist = nyquist_frequency(axis);
  const double nyq = dim.nyquist;
  for (int i = 0; i < q; ++i) {
    const double scale = 1.0 + 0.5 * static_cast<double>(i);
    Vec mu_target(frames), wi_target(frames);
    for (Eigen::Index f = 0; f < frames; ++f) {
      mu_target[f] =
          std::clamp(std::min(scale * ridge[f], 0.95 * nyq), 1e-3 * nyq, (1.0 - 1e-3) * nyq);
      wi_target[f] = w_target[f] / static_cast<double>(i + 1);
    }
    GsmComponentLatents c{
        latent_from_targets(spec.input_axis, wi_target, prior, Transform::log(), axis),
        LatentFunction(Vec::Zero(n), prior, Transform::log(), axis),
        latent_from_targets(spec.input_axis, mu_target, prior, Transform::logit(dim.nyquist),
                            axis)};
    dim.comps.push_back(std::move(c));
  }
  model.gsm.dims.push_back(std::move(dim));
  return model;
}

}  // namespace gsmgp
