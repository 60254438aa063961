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

#include "gsmgp/gp_core.hpp"

#include <cmath>

#include "gsmgp/kronecker.hpp"

namespace gsmgp {

namespace {

constexpr Eigen::Index kDenseLimit = 4096;
constexpr double kTwoPi = 2.0 * M_PI;

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Mat materialise_product(const std::vector<Mat>& factors) {
  return KronGram(factors).materialise();
}

}  // namespace

Mat jittered_cholesky(Mat a) {
  const double mean_diag = a.diagonal().mean();
  const double scales[] = {0.0, 1e-8, 1e-6, 1e-4};
  for (double s : scales) {
    Mat shifted = a;
    shifted.diagonal().array() += s * mean_diag;
    Eigen::LLT<Mat> llt(shifted);
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }
  throw std::runtime_error("cholesky failed after jitter escalation: matrix not positive definite");
}

LikContext dense_context(const std::vector<Mat>& factors, double noise_var, const Vec& y,
                         bool need_grad) {
  std::vector<Eigen::Index> dims;
  Eigen::Index total = 1;
  for (const Mat& f : factors) {
    dims.push_back(f.rows());
    total *= f.rows();
  }
  if (y.size() != total) throw std::invalid_argument("dense context: length mismatch");
  if (total > kDenseLimit)
    throw std::invalid_argument("dense context: grid too large for the dense path");

  Mat a = factors.size() == 1 ? factors[0] : materialise_product(factors);
  a.diagonal().array() += noise_var;
  const Mat l = jittered_cholesky(std::move(a));

  LikContext ctx;
  ctx.alpha = l.triangularView<Eigen::Lower>().solve(y);
  ctx.quad = ctx.alpha.squaredNorm();  // y' A^-1 y via the half-solve
  ctx.alpha = l.transpose().triangularView<Eigen::Upper>().solve(ctx.alpha);
  ctx.logdet = 2.0 * l.diagonal().array().log().sum();
  if (!need_grad) return ctx;

  Mat ainv = Mat::Identity(total, total);
  l.triangularView<Eigen::Lower>().solveInPlace(ainv);
  l.transpose().triangularView<Eigen::Upper>().solveInPlace(ainv);
  ctx.trinv = ainv.trace();

  const int np = static_cast<int>(factors.size());
  for (int p = 0; p < np; ++p) {
    Eigen::Index pre = 1, post = 1;
    for (int q = 0; q < p; ++q) pre *= dims[q];
    for (int q = p + 1; q < np; ++q) post *= dims[q];
    const Eigen::Index n = dims[p];

    // gamma_p = alpha with every factor except p applied.
    Vec gamma = ctx.alpha;
    for (int q = 0; q < np; ++q)
      if (q != p) gamma = mode_apply(gamma, dims, q, factors[q]);
    Mat s = Mat::Zero(n, n);
    for (Eigen::Index ipre = 0; ipre < pre; ++ipre) {
      Eigen::Map<const RowMat> ab(ctx.alpha.data() + ipre * n * post, n, post);
      Eigen::Map<const RowMat> gb(gamma.data() + ipre * n * post, n, post);
      s.noalias() += ab * gb.transpose();
    }
    ctx.s.push_back(std::move(s));

    // t_p[a,b] = block contraction of A^-1 against the product of the other
    // factors, so that tr(A^-1 dK) = <t_p, dK_p>.
    if (np == 1) {
      ctx.t.push_back(ainv);
      continue;
    }
    std::vector<Mat> rest;
    for (int q = 0; q < np; ++q)
      if (q != p) rest.push_back(factors[q]);
    const Mat krest = rest.size() == 1 ? rest[0] : materialise_product(rest);
    const Eigen::Index r = krest.rows();  // = pre * post
    Mat t = Mat::Zero(n, n);
    for (Eigen::Index aa = 0; aa < n; ++aa)
      for (Eigen::Index bb = 0; bb < n; ++bb) {
        double acc = 0.0;
        for (Eigen::Index u = 0; u < r; ++u) {
          const Eigen::Index upre = u / post, upost = u % post;
          const Eigen::Index row = (upre * n + aa) * post + upost;
          for (Eigen::Index v = 0; v < r; ++v) {
            const Eigen::Index vpre = v / post, vpost = v % post;
            acc += ainv(row, (vpre * n + bb) * post + vpost) * krest(u, v);
          }
        }
        t(aa, bb) = acc;
      }
    ctx.t.push_back(std::move(t));
  }
  return ctx;
}

double prior_log_density(const GpModel& model) {
  if (model.kind != KernelKind::gsm) return 0.0;
  double acc = 0.0;
  const double half_log_2pi = 0.5 * std::log(2.0 * M_PI);
  for (const auto& dim : model.gsm.dims)
    for (const auto& c : dim.comps)
      for (const LatentFunction* f : {&c.w, &c.ell, &c.mu}) {
        acc += -0.5 * f->whitened.squaredNorm() -
               f->cached_chol.diagonal().array().log().sum() -
               half_log_2pi * static_cast<double>(f->size());
      }
  return acc;
}

namespace {

LikContext make_context(const GpModel& model, Backend backend, bool need_grad) {
  const std::vector<Mat> factors = model.factor_grams();
  if (backend == Backend::dense) return dense_context(factors, model.noise_var(), model.train_y, need_grad);
  return kron_context(factors, model.noise_var(), model.train_y, need_grad);
}

double value_from_context(const GpModel& model, const LikContext& ctx) {
  const double m = static_cast<double>(model.train_y.size());
  return -0.5 * ctx.quad - 0.5 * ctx.logdet - 0.5 * m * std::log(2.0 * M_PI) +
         prior_log_density(model);
}

// Gradient of the log marginal likelihood with respect to each transformed
// latent of one GSM component class: row sums of (sym(s)/2 - t) o packed.
Vec packed_class_grad(const Mat& r, const Mat& packed) {
  return (r.array() * packed.array()).rowwise().sum();
}

// Baseline factor derivative matrices, ordered to match BaselineParams packing.
std::vector<std::pair<int, Mat>> baseline_factor_grads(const GpModel& model,
                                                       const std::vector<Mat>& factors) {
  std::vector<std::pair<int, Mat>> grads;
  const BaselineParams& b = model.baseline;
  for (int d = 0; d < model.p(); ++d) {
    const Vec& axis = model.train_axes[d];
    const Eigen::Index n = axis.size();
    Mat tau(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) tau(i, j) = axis[i] - axis[j];
    const Vec& pars = b.dim_params[d];
    switch (b.kind) {
      case KernelKind::se: {
        const double ell = std::exp(pars[0]);
        grads.emplace_back(d, factors[d].cwiseProduct((tau.array().square() / (ell * ell)).matrix()));
        break;
      }
      case KernelKind::sm: {
        const Transform t = Transform::logit(b.nyquists[d]);
        for (int i = 0; i < b.q; ++i) {
          const double w = std::exp(pars[3 * i]);
          const double sig = std::exp(pars[3 * i + 1]);
          const double mu = t.inverse(pars[3 * i + 2]);
          Mat comp(n, n), dsig(n, n), dmu(n, n);
          for (Eigen::Index r = 0; r < n; ++r)
            for (Eigen::Index c = 0; c < n; ++c) {
              const double tv = tau(r, c);
              const double e = w * w * std::exp(-2.0 * M_PI * M_PI * sig * sig * tv * tv);
              comp(r, c) = e * std::cos(kTwoPi * mu * tv);
              dsig(r, c) = comp(r, c) * (-4.0 * M_PI * M_PI * sig * sig * tv * tv);
              dmu(r, c) = -e * std::sin(kTwoPi * mu * tv) * kTwoPi * tv * t.chain(mu);
            }
          grads.emplace_back(d, 2.0 * comp);  // d/d log w
          grads.emplace_back(d, std::move(dsig));
          grads.emplace_back(d, std::move(dmu));
        }
        break;
      }
      case KernelKind::ss: {
        const Transform t = Transform::logit(b.nyquists[d]);
        const double amp = d == 0 ? std::exp(b.amplitude_log) : 1.0;
        for (int i = 0; i < b.q; ++i) {
          const double s = t.inverse(pars[i]);
          Mat dmat(n, n);
          for (Eigen::Index r = 0; r < n; ++r)
            for (Eigen::Index c = 0; c < n; ++c) {
              const double tv = tau(r, c);
              dmat(r, c) = amp / static_cast<double>(b.q) * (-std::sin(kTwoPi * s * tv)) *
                           kTwoPi * tv * t.chain(s);
            }
          grads.emplace_back(d, std::move(dmat));
        }
        break;
      }
      case KernelKind::gsm:
        break;
    }
  }
  if (b.has_amplitude()) grads.emplace_back(0, factors[0]);  // d K_0 / d log amplitude
  return grads;
}

}  // namespace

double nll_value(const GpModel& model, Backend backend) {
  return value_from_context(model, make_context(model, backend, false));
}

Objective nll_gradient(const GpModel& model, Backend backend) {
  const std::vector<Mat> factors = model.factor_grams();
  const LikContext ctx = backend == Backend::dense
                             ? dense_context(factors, model.noise_var(), model.train_y, true)
                             : kron_context(factors, model.noise_var(), model.train_y, true);
  Objective obj;
  obj.value = value_from_context(model, ctx);
  obj.grad = Vec::Zero(model.param_count());

  Eigen::Index o = 0;
  if (model.kind == KernelKind::gsm) {
    for (int d = 0; d < model.p(); ++d) {
      const GsmDim& dim = model.gsm.dims[d];
      const Mat r = 0.5 * (ctx.s[d] + ctx.s[d].transpose()) - ctx.t[d];
      for (const auto& c : dim.comps) {
        const GsmComponentValues vals{c.w.constrained(), c.ell.constrained(), c.mu.constrained()};
        const Vec mu_chain = c.mu.chain();
        const Mat dw = gsm_gram_grad_packed(vals, dim.axis, LatentClass::w, mu_chain);
        const Mat dell = gsm_gram_grad_packed(vals, dim.axis, LatentClass::ell, mu_chain);
        const Mat dmu = gsm_gram_grad_packed(vals, dim.axis, LatentClass::mu, mu_chain);
        const Eigen::Index n = dim.axis.size();
        // Whitened gradient: L' (likelihood part) minus the whitened prior pull.
        obj.grad.segment(o, n) =
            c.w.cached_chol.transpose() * packed_class_grad(r, dw) - c.w.whitened;
        o += n;
        obj.grad.segment(o, n) =
            c.ell.cached_chol.transpose() * packed_class_grad(r, dell) - c.ell.whitened;
        o += n;
        obj.grad.segment(o, n) =
            c.mu.cached_chol.transpose() * packed_class_grad(r, dmu) - c.mu.whitened;
        o += n;
      }
    }
  } else {
    const auto grads = baseline_factor_grads(model, factors);
    for (const auto& [p, d] : grads) {
      obj.grad[o++] =
          0.5 * ((ctx.s[p].array() * d.array()).sum() - (ctx.t[p].array() * d.array()).sum());
    }
  }
  obj.grad[o] = model.noise_var() * (ctx.alpha.squaredNorm() - ctx.trinv);
  return obj;
}

Vec unwhitened_gradient(const GpModel& model, Backend backend) {
  if (model.kind != KernelKind::gsm)
    throw std::invalid_argument("unwhitened gradient: only defined for latent-function models");
  const std::vector<Mat> factors = model.factor_grams();
  const LikContext ctx = backend == Backend::dense
                             ? dense_context(factors, model.noise_var(), model.train_y, true)
                             : kron_context(factors, model.noise_var(), model.train_y, true);
  Vec grad = Vec::Zero(model.param_count());
  Eigen::Index o = 0;
  for (int d = 0; d < model.p(); ++d) {
    const GsmDim& dim = model.gsm.dims[d];
    const Mat r = 0.5 * (ctx.s[d] + ctx.s[d].transpose()) - ctx.t[d];
    for (const auto& c : dim.comps) {
      const GsmComponentValues vals{c.w.constrained(), c.ell.constrained(), c.mu.constrained()};
      const Vec mu_chain = c.mu.chain();
      const Eigen::Index n = dim.axis.size();
      for (auto [which, f] : {std::pair{LatentClass::w, &c.w}, {LatentClass::ell, &c.ell},
                              {LatentClass::mu, &c.mu}}) {
        const Mat packed = gsm_gram_grad_packed(vals, dim.axis, which, mu_chain);
        // Prior pull in transformed coordinates: -(K_prior + jitter I)^-1 theta.
        const Mat& l = f->cached_chol;
        Vec pull = l.triangularView<Eigen::Lower>().solve(f->transformed());
        pull = l.transpose().triangularView<Eigen::Upper>().solve(pull);
        grad.segment(o, n) = packed_class_grad(r, packed) - pull;
        o += n;
      }
    }
  }
  grad[o] = model.noise_var() * (ctx.alpha.squaredNorm() - ctx.trinv);
  return grad;
}

Mat cross_factor(const GpModel& model, int dim, const Vec& test_inputs) {
  const Vec& axis = model.train_axes[dim];
  const Eigen::Index nt = test_inputs.size(), n = axis.size();
  Mat c = Mat::Zero(nt, n);
  if (model.kind == KernelKind::gsm) {
    const GsmDim& gd = model.gsm.dims[dim];
    for (const auto& comp : gd.comps) {
      const Vec wt = extend(comp.w, test_inputs);
      const Vec lt = extend(comp.ell, test_inputs);
      const Vec mt = extend(comp.mu, test_inputs);
      const Vec w = comp.w.constrained();
      const Vec l = comp.ell.constrained();
      const Vec m = comp.mu.constrained();
      for (Eigen::Index a = 0; a < nt; ++a)
        for (Eigen::Index b = 0; b < n; ++b)
          c(a, b) += wt[a] * w[b] * gibbs_eval(lt[a], l[b], test_inputs[a], axis[b]) *
                     std::cos(kTwoPi * (mt[a] * test_inputs[a] - m[b] * axis[b]));
    }
    return c;
  }
  const BaselineParams& b = model.baseline;
  const Vec& pars = b.dim_params[dim];
  switch (b.kind) {
    case KernelKind::se: {
      const SeParams p{dim == 0 ? std::exp(b.amplitude_log) : 1.0, std::exp(pars[0])};
      for (Eigen::Index a = 0; a < nt; ++a)
        for (Eigen::Index j = 0; j < n; ++j) c(a, j) = se_eval(p, test_inputs[a], axis[j]);
      break;
    }
    case KernelKind::sm: {
      SmParams p;
      const Transform t = Transform::logit(b.nyquists[dim]);
      for (int i = 0; i < b.q; ++i) {
        p.weights.push_back(std::exp(pars[3 * i]));
        p.frequency_stddevs.push_back(std::exp(pars[3 * i + 1]));
        p.mean_frequencies.push_back(t.inverse(pars[3 * i + 2]));
      }
      for (Eigen::Index a = 0; a < nt; ++a)
        for (Eigen::Index j = 0; j < n; ++j) c(a, j) = sm_eval(p, test_inputs[a] - axis[j]);
      break;
    }
    case KernelKind::ss: {
      SsParams p;
      const Transform t = Transform::logit(b.nyquists[dim]);
      for (int i = 0; i < b.q; ++i) p.frequencies.push_back(t.inverse(pars[i]));
      const double amp = dim == 0 ? std::exp(b.amplitude_log) : 1.0;
      for (Eigen::Index a = 0; a < nt; ++a)
        for (Eigen::Index j = 0; j < n; ++j) c(a, j) = amp * ss_eval(p, test_inputs[a] - axis[j]);
      break;
    }
    case KernelKind::gsm:
      break;
  }
  return c;
}

Vec prior_variance_factor(const GpModel& model, int dim, const Vec& test_inputs) {
  const Eigen::Index nt = test_inputs.size();
  Vec v = Vec::Zero(nt);
  if (model.kind == KernelKind::gsm) {
    for (const auto& comp : model.gsm.dims[dim].comps) {
      const Vec wt = extend(comp.w, test_inputs);
      v.array() += wt.array().square();
    }
    return v;
  }
  const BaselineParams& b = model.baseline;
  double zero_lag = 0.0;
  switch (b.kind) {
    case KernelKind::se:
      zero_lag = dim == 0 ? std::exp(b.amplitude_log) : 1.0;
      break;
    case KernelKind::sm: {
      const Vec& pars = b.dim_params[dim];
      for (int i = 0; i < b.q; ++i) {
        const double w = std::exp(pars[3 * i]);
        zero_lag += w * w;
      }
      break;
    }
    case KernelKind::ss:
      zero_lag = dim == 0 ? std::exp(b.amplitude_log) : 1.0;
      break;
    case KernelKind::gsm:
      break;
  }
  return Vec::Constant(nt, zero_lag);
}

Prediction predict_points(const GpModel& model, const Mat& points) {
  if (points.cols() != model.p())
    throw std::invalid_argument("predict: points must have one column per dimension");
  const Eigen::Index nt = points.rows();
  const Eigen::Index m = model.data_size();

  // Training covariance and its factorization.
  const std::vector<Mat> factors = model.factor_grams();
  Mat a = factors.size() == 1 ? factors[0] : materialise_product(factors);
  a.diagonal().array() += model.noise_var();
  const Mat l = jittered_cholesky(std::move(a));
  Vec alpha = l.triangularView<Eigen::Lower>().solve(model.train_y);
  alpha = l.transpose().triangularView<Eigen::Upper>().solve(alpha);

  // Cross covariance: product over dimensions of per-dimension cross factors.
  std::vector<Mat> cross;
  std::vector<Vec> prior_diag;
  for (int d = 0; d < model.p(); ++d) {
    cross.push_back(cross_factor(model, d, points.col(d)));
    prior_diag.push_back(prior_variance_factor(model, d, points.col(d)));
  }
  std::vector<Eigen::Index> dims;
  for (const Mat& f : factors) dims.push_back(f.rows());

  Mat kstar(nt, m);
  for (Eigen::Index a2 = 0; a2 < nt; ++a2) {
    for (Eigen::Index j = 0; j < m; ++j) {
      Eigen::Index rem = j;
      double prod = 1.0;
      for (int d = model.p() - 1; d >= 0; --d) {
        const Eigen::Index idx = rem % dims[d];
        rem /= dims[d];
        prod *= cross[d](a2, idx);
      }
      kstar(a2, j) = prod;
    }
  }

  Prediction out;
  out.mean = kstar * alpha;
  out.variance = Vec(nt);
  const Mat half = l.triangularView<Eigen::Lower>().solve(Mat(kstar.transpose()));
  for (Eigen::Index a2 = 0; a2 < nt; ++a2) {
    double kss = 1.0;
    for (int d = 0; d < model.p(); ++d) kss *= prior_diag[d][a2];
    double var = kss - half.col(a2).squaredNorm();
    if (var < -1e-10) throw std::runtime_error("predict: negative predictive variance");
    out.variance[a2] = std::max(var, 0.0);
  }
  return out;
}

Prediction predict_grid(const GpModel& model, const std::vector<Vec>& test_axes, Backend backend) {
  if (static_cast<int>(test_axes.size()) != model.p())
    throw std::invalid_argument("predict grid: need one test axis per dimension");
  if (backend == Backend::dense) {
    Eigen::Index nt = 1;
    for (const Vec& ax : test_axes) nt *= ax.size();
    Mat points(nt, model.p());
    for (Eigen::Index j = 0; j < nt; ++j) {
      Eigen::Index rem = j;
      for (int d = model.p() - 1; d >= 0; --d) {
        points(j, d) = test_axes[d][rem % test_axes[d].size()];
        rem /= test_axes[d].size();
      }
    }
    return predict_points(model, points);
  }

  const std::vector<Mat> factors = model.factor_grams();
  KronEig eig = kron_eig(factors);
  Vec lam = eig.lambda();
  Vec t(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    const double s = lam[i] + model.noise_var();
    if (!(s > 0.0)) throw std::runtime_error("predict grid: non-positive shifted eigenvalue");
    t[i] = 1.0 / s;
  }
  const Vec alpha = kron_solve(eig, model.noise_var(), model.train_y);

  std::vector<Mat> cross, bsq;
  std::vector<Vec> prior_diag;
  for (int d = 0; d < model.p(); ++d) {
    cross.push_back(cross_factor(model, d, test_axes[d]));
    prior_diag.push_back(prior_variance_factor(model, d, test_axes[d]));
    const Mat b = cross.back() * eig.u[d];
    bsq.push_back(b.cwiseProduct(b));
  }

  // Mean: (x) C_d alpha; variance: k** - (x) (B_d o B_d) t.
  std::vector<Eigen::Index> dims = eig.dims;
  Vec mean = alpha;
  for (int d = 0; d < model.p(); ++d) {
    mean = mode_apply(mean, dims, d, cross[d]);
    dims[d] = cross[d].rows();
  }
  dims = eig.dims;
  Vec explained = t;
  for (int d = 0; d < model.p(); ++d) {
    explained = mode_apply(explained, dims, d, bsq[d]);
    dims[d] = bsq[d].rows();
  }

  Prediction out;
  out.mean = std::move(mean);
  out.variance = Vec(explained.size());
  for (Eigen::Index j = 0; j < explained.size(); ++j) {
    Eigen::Index rem = j;
    double kss = 1.0;
    for (int d = model.p() - 1; d >= 0; --d) {
      kss *= prior_diag[d][rem % dims[d]];
      rem /= dims[d];
    }
    double var = kss - explained[j];
    if (var < -1e-10) throw std::runtime_error("predict grid: negative predictive variance");
    out.variance[j] = std::max(var, 0.0);
  }
  return out;
}

}  // namespace gsmgp
