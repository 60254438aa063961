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

#include "gsmgp/model.hpp"

#include <cmath>

#include "gsmgp/rng.hpp"

namespace gsmgp {

std::string kernel_kind_name(KernelKind k) {
  switch (k) {
    case KernelKind::gsm: return "gsm";
    case KernelKind::se: return "se";
    case KernelKind::sm: return "sm";
    case KernelKind::ss: return "ss";
  }
  throw std::invalid_argument("unknown kernel kind");
}

KernelKind kernel_kind_from_name(const std::string& name) {
  if (name == "gsm") return KernelKind::gsm;
  if (name == "se") return KernelKind::se;
  if (name == "sm") return KernelKind::sm;
  if (name == "ss") return KernelKind::ss;
  throw std::invalid_argument("unknown kernel kind: " + name);
}

GsmComponentValues GsmDim::values(int comp) const {
  const auto& c = comps.at(comp);
  GsmComponentValues v{c.w.constrained(), c.ell.constrained(), c.mu.constrained()};
  v.validate(nyquist);
  return v;
}

Eigen::Index GsmParams::dim_param_count(int dim) const {
  return 3 * static_cast<Eigen::Index>(dims[dim].comps.size()) * dims[dim].axis.size();
}

Eigen::Index GsmParams::param_count() const {
  Eigen::Index n = 0;
  for (int d = 0; d < p(); ++d) n += dim_param_count(d);
  return n;
}

GsmParams GsmParams::sample(const std::vector<Vec>& axes, int q, const HyperPrior& prior,
                            uint64_t seed) {
  if (q < 1) throw std::invalid_argument("gsm params: Q must be >= 1");
  GsmParams out;
  uint64_t stream = 0;
  for (const Vec& axis : axes) {
    GsmDim dim;
    dim.axis = axis;
    dim.nyquist = nyquist_frequency(axis);
    for (int i = 0; i < q; ++i) {
      GsmComponentLatents c{
          sample_prior(prior, Transform::log(), axis, mix_seed(seed, stream++)),
          sample_prior(prior, Transform::log(), axis, mix_seed(seed, stream++)),
          sample_prior(prior, Transform::logit(dim.nyquist), axis, mix_seed(seed, stream++))};
      dim.comps.push_back(std::move(c));
    }
    out.dims.push_back(std::move(dim));
  }
  return out;
}

GsmParams GsmParams::constant(const std::vector<Vec>& axes, int q, const HyperPrior& prior,
                              double w, double ell, double mu) {
  GsmParams out;
  for (const Vec& axis : axes) {
    GsmDim dim;
    dim.axis = axis;
    dim.nyquist = nyquist_frequency(axis);
    const Transform tw = Transform::log();
    const Transform tmu = Transform::logit(dim.nyquist);
    for (int i = 0; i < q; ++i) {
      GsmComponentLatents c{LatentFunction(Vec::Zero(axis.size()), prior, tw, axis),
                            LatentFunction(Vec::Zero(axis.size()), prior, tw, axis),
                            LatentFunction(Vec::Zero(axis.size()), prior, tmu, axis)};
      // Solve L theta_tilde = transform(value) * 1 for each latent.
      c.w.whitened = whiten(Vec::Constant(axis.size(), tw.forward(w)), c.w.cached_chol);
      c.ell.whitened = whiten(Vec::Constant(axis.size(), tw.forward(ell)), c.ell.cached_chol);
      c.mu.whitened = whiten(Vec::Constant(axis.size(), tmu.forward(mu)), c.mu.cached_chol);
      dim.comps.push_back(std::move(c));
    }
    out.dims.push_back(std::move(dim));
  }
  return out;
}

Eigen::Index BaselineParams::param_count() const {
  Eigen::Index n = 0;
  for (const Vec& v : dim_params) n += v.size();
  return n + (has_amplitude() ? 1 : 0);
}

Eigen::Index GpModel::data_size() const {
  Eigen::Index n = 1;
  for (const Vec& axis : train_axes) n *= axis.size();
  return n;
}

Eigen::Index GpModel::param_count() const {
  const Eigen::Index latents =
      kind == KernelKind::gsm ? gsm.param_count() : baseline.param_count();
  return latents + 1;  // + noise_log
}

Vec GpModel::pack() const {
  Vec theta(param_count());
  Eigen::Index o = 0;
  if (kind == KernelKind::gsm) {
    for (const auto& dim : gsm.dims)
      for (const auto& c : dim.comps) {
        theta.segment(o, c.w.size()) = c.w.whitened;
        o += c.w.size();
        theta.segment(o, c.ell.size()) = c.ell.whitened;
        o += c.ell.size();
        theta.segment(o, c.mu.size()) = c.mu.whitened;
        o += c.mu.size();
      }
  } else {
    for (const Vec& v : baseline.dim_params) {
      theta.segment(o, v.size()) = v;
      o += v.size();
    }
    if (baseline.has_amplitude()) theta[o++] = baseline.amplitude_log;
  }
  theta[o] = noise_log;
  return theta;
}

void GpModel::unpack(const Vec& theta) {
  if (theta.size() != param_count())
    throw std::invalid_argument("model unpack: parameter vector length mismatch");
  Eigen::Index o = 0;
  if (kind == KernelKind::gsm) {
    for (auto& dim : gsm.dims)
      for (auto& c : dim.comps) {
        c.w.whitened = theta.segment(o, c.w.size());
        o += c.w.size();
        c.ell.whitened = theta.segment(o, c.ell.size());
        o += c.ell.size();
        c.mu.whitened = theta.segment(o, c.mu.size());
        o += c.mu.size();
      }
  } else {
    for (Vec& v : baseline.dim_params) {
      v = theta.segment(o, v.size());
      o += v.size();
    }
    if (baseline.has_amplitude()) baseline.amplitude_log = theta[o++];
  }
  noise_log = theta[o];
}

std::vector<Mat> GpModel::factor_grams() const {
  std::vector<Mat> factors;
  factors.reserve(train_axes.size());
  if (kind == KernelKind::gsm) {
    for (const auto& dim : gsm.dims) {
      std::vector<GsmComponentValues> vals;
      for (int i = 0; i < static_cast<int>(dim.comps.size()); ++i) vals.push_back(dim.values(i));
      factors.push_back(gsm_gram(vals, dim.axis));
    }
    return factors;
  }
  for (size_t d = 0; d < train_axes.size(); ++d) {
    const Vec& axis = train_axes[d];
    const Vec& pars = baseline.dim_params[d];
    switch (kind) {
      case KernelKind::se: {
        const double amp = d == 0 ? std::exp(baseline.amplitude_log) : 1.0;
        factors.push_back(se_gram(SeParams{amp, std::exp(pars[0])}, axis));
        break;
      }
      case KernelKind::sm: {
        SmParams p;
        const Transform t = Transform::logit(baseline.nyquists[d]);
        for (int i = 0; i < baseline.q; ++i) {
          p.weights.push_back(std::exp(pars[3 * i]));
          p.frequency_stddevs.push_back(std::exp(pars[3 * i + 1]));
          p.mean_frequencies.push_back(t.inverse(pars[3 * i + 2]));
        }
        factors.push_back(sm_gram(p, axis));
        break;
      }
      case KernelKind::ss: {
        SsParams p;
        const Transform t = Transform::logit(baseline.nyquists[d]);
        for (int i = 0; i < baseline.q; ++i) p.frequencies.push_back(t.inverse(pars[i]));
        Mat k = ss_gram(p, axis);
        if (d == 0) k *= std::exp(baseline.amplitude_log);
        factors.push_back(std::move(k));
        break;
      }
      case KernelKind::gsm:
        break;  // handled above
    }
  }
  return factors;
}

}  // namespace gsmgp
