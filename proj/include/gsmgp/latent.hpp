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

#include "gsmgp/types.hpp"

namespace gsmgp {

// Bijection between a constrained latent value and its unconstrained
// optimisation-domain image: log for positive values, logit for (0, F_N).
struct Transform {
  enum class Kind { identity, log, logit };
  Kind kind = Kind::identity;
  double nyquist = 0.0;  // F_N, required by logit

  static Transform identity() { return {Kind::identity, 0.0}; }
  static Transform log() { return {Kind::log, 0.0}; }
  static Transform logit(double nyquist);

  double forward(double constrained) const;
  double inverse(double unconstrained) const;
  // d(constrained) / d(unconstrained), evaluated at the constrained value.
  double chain(double constrained) const;
};

// Squared-exponential prior over one transformed latent function.
struct HyperPrior {
  double lengthscale = 1.0;
  double variance = 1.0;
  double jitter = 1e-6;
  void validate() const;
  // Default prior for an axis spanning `range` input units.
  static HyperPrior for_range(double range, double variance = 1.0);
};

// Lower Cholesky factor of the prior Gram + jitter * I on `axis`.
Mat prior_chol(const HyperPrior& prior, const Vec& axis);

// theta_tilde = L^-1 theta  /  theta = L theta_tilde.
Vec whiten(const Vec& values_transformed, const Mat& chol);
Vec unwhiten(const Vec& whitened, const Mat& chol);

// One GP-distributed hyperfunction on a fixed axis, stored whitened.
struct LatentFunction {
  Vec whitened;
  HyperPrior prior;
  Transform transform;
  Vec axis;
  Mat cached_chol;  // lower factor of prior Gram + jitter * I

  LatentFunction() = default;
  LatentFunction(Vec whitened, HyperPrior prior, Transform transform, Vec axis);

  Eigen::Index size() const { return whitened.size(); }
  // L * whitened (transformed domain).
  Vec transformed() const;
  // transform^{-1}(L * whitened) (constrained domain).
  Vec constrained() const;
  // d(constrained_j) / d(transformed_j) per entry.
  Vec chain() const;
};

// Draw whitened values i.i.d. standard normal from the prior.
LatentFunction sample_prior(const HyperPrior& prior, const Transform& transform, const Vec& axis,
                            uint64_t rng_seed);

// Constrained values at new inputs via the GP conditional mean in the
// transformed domain.  At a training input this reproduces the training value;
// far from all data it reverts to transform^{-1}(0).
Vec extend(const LatentFunction& f, const Vec& new_inputs);

// Nyquist frequency of an axis: half the sampling rate, with the rate taken
// from the smallest gap when the axis is not equispaced.
double nyquist_frequency(const Vec& axis);

}  // namespace gsmgp
