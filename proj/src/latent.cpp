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

#include "gsmgp/latent.hpp"

#include <cmath>

#include "gsmgp/kernels.hpp"
#include "gsmgp/rng.hpp"

namespace gsmgp {

namespace {
// Keeps logistic outputs strictly inside (0, F_N) under extreme inputs.
double stable_sigmoid(double t) {
  double s;
  if (t >= 0.0) {
    s = 1.0 / (1.0 + std::exp(-t));
  } else {
    const double e = std::exp(t);
    s = e / (1.0 + e);
  }
  const double eps = 1e-15;
  if (s < 1e-300) s = 1e-300;
  if (s > 1.0 - eps) s = 1.0 - eps;
  return s;
}
}  // namespace

Transform Transform::logit(double nyquist) {
  if (!(nyquist > 0.0)) throw std::invalid_argument("logit transform requires nyquist > 0");
  return {Kind::logit, nyquist};
}

double Transform::forward(double constrained) const {
  switch (kind) {
    case Kind::identity:
      return constrained;
    case Kind::log:
      if (!(constrained > 0.0)) throw std::invalid_argument("log transform: value must be > 0");
      return std::log(constrained);
    case Kind::logit:
      if (!(constrained > 0.0 && constrained < nyquist))
        throw std::invalid_argument("logit transform: value must lie in (0, F_N)");
      return std::log(constrained / (nyquist - constrained));
  }
  throw std::invalid_argument("unknown transform kind");
}

double Transform::inverse(double unconstrained) const {
  switch (kind) {
    case Kind::identity:
      return unconstrained;
    case Kind::log:
      return std::exp(unconstrained);
    case Kind::logit:
      return nyquist * stable_sigmoid(unconstrained);
  }
  throw std::invalid_argument("unknown transform kind");
}

double Transform::chain(double constrained) const {
  switch (kind) {
    case Kind::identity:
      return 1.0;
    case Kind::log:
      return constrained;  // d e^t / dt = value
    case Kind::logit:
      return constrained * (nyquist - constrained) / nyquist;
  }
  throw std::invalid_argument("unknown transform kind");
}

void HyperPrior::validate() const {
  if (!(lengthscale > 0.0) || !(variance > 0.0) || !(jitter > 0.0))
    throw std::invalid_argument("hyperprior: lengthscale, variance, jitter must be > 0");
  if (jitter > 1e-4 * variance)
    throw std::invalid_argument("hyperprior: jitter must be <= 1e-4 * variance");
}

HyperPrior HyperPrior::for_range(double range, double variance) {
  HyperPrior p;
  p.lengthscale = range > 0.0 ? range / 4.0 : 1.0;
  p.variance = variance;
  p.jitter = 1e-6 * variance;
  p.validate();
  return p;
}

Mat prior_chol(const HyperPrior& prior, const Vec& axis) {
  prior.validate();
  SeParams se{prior.variance, prior.lengthscale};
  Mat gram = se_gram(se, axis);
  gram.diagonal().array() += prior.jitter;
  Eigen::LLT<Mat> llt(gram);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("prior cholesky failed: increase jitter");
  return llt.matrixL();
}

Vec whiten(const Vec& values_transformed, const Mat& chol) {
  if (values_transformed.size() != chol.rows())
    throw std::invalid_argument("whiten: dimension mismatch");
  return chol.triangularView<Eigen::Lower>().solve(values_transformed);
}

Vec unwhiten(const Vec& whitened, const Mat& chol) {
  if (whitened.size() != chol.rows()) throw std::invalid_argument("unwhiten: dimension mismatch");
  return chol.triangularView<Eigen::Lower>() * whitened;
}

LatentFunction::LatentFunction(Vec whitened_in, HyperPrior prior_in, Transform transform_in,
                               Vec axis_in)
    : whitened(std::move(whitened_in)),
      prior(prior_in),
      transform(transform_in),
      axis(std::move(axis_in)) {
  if (whitened.size() != axis.size())
    throw std::invalid_argument("latent function: whitened length != axis length");
  cached_chol = prior_chol(prior, axis);
}

Vec LatentFunction::transformed() const { return unwhiten(whitened, cached_chol); }

Vec LatentFunction::constrained() const {
  Vec t = transformed();
  for (Eigen::Index i = 0; i < t.size(); ++i) t[i] = transform.inverse(t[i]);
  return t;
}

Vec LatentFunction::chain() const {
  Vec c = constrained();
  for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = transform.chain(c[i]);
  return c;
}

LatentFunction sample_prior(const HyperPrior& prior, const Transform& transform, const Vec& axis,
                            uint64_t rng_seed) {
  if (axis.size() == 0) throw std::invalid_argument("sample_prior: empty axis");
  Rng rng(rng_seed);
  Vec whitened(axis.size());
  for (Eigen::Index i = 0; i < whitened.size(); ++i) whitened[i] = rng.normal();
  return LatentFunction(std::move(whitened), prior, transform, axis);
}

Vec extend(const LatentFunction& f, const Vec& new_inputs) {
  // Conditional mean under the jittered prior; the cross covariance carries the
  // jitter at exact axis matches so training inputs reproduce training values.
  const Vec theta = f.transformed();
  const Mat& l = f.cached_chol;
  Vec alpha = l.triangularView<Eigen::Lower>().solve(theta);
  alpha = l.transpose().triangularView<Eigen::Upper>().solve(alpha);

  SeParams se{f.prior.variance, f.prior.lengthscale};
  Vec out(new_inputs.size());
  for (Eigen::Index a = 0; a < new_inputs.size(); ++a) {
    double mean = 0.0;
    for (Eigen::Index b = 0; b < f.axis.size(); ++b) {
      double k = se_eval(se, new_inputs[a], f.axis[b]);
      if (new_inputs[a] == f.axis[b]) k += f.prior.jitter;
      mean += k * alpha[b];
    }
    out[a] = f.transform.inverse(mean);
  }
  return out;
}

double nyquist_frequency(const Vec& axis) {
  if (axis.size() < 2) throw std::invalid_argument("nyquist: need at least two inputs");
  double min_gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 1; i < axis.size(); ++i) {
    const double gap = axis[i] - axis[i - 1];
    if (!(gap > 0.0)) throw std::invalid_argument("nyquist: axis must be strictly increasing");
    min_gap = std::min(min_gap, gap);
  }
  return 1.0 / (2.0 * min_gap);
}

}  // namespace gsmgp
