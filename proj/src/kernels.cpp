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

#include "gsmgp/kernels.hpp"

#include <cmath>

namespace gsmgp {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;
constexpr double kTwoPiSq = 2.0 * M_PI * M_PI;
}  // namespace

double se_eval(const SeParams& p, double x, double x_prime) {
  p.validate();
  const double d = x - x_prime;
  return p.signal_variance * std::exp(-d * d / (2.0 * p.lengthscale * p.lengthscale));
}

double ss_eval(const SsParams& p, double tau) {
  p.validate();
  double acc = 0.0;
  for (double s : p.frequencies) acc += std::cos(kTwoPi * s * tau);
  return acc / static_cast<double>(p.frequencies.size());
}

double sm_eval(const SmParams& p, double tau) {
  p.validate();
  double acc = 0.0;
  for (size_t i = 0; i < p.weights.size(); ++i) {
    const double w = p.weights[i];
    const double sig = p.frequency_stddevs[i];
    acc += w * w * std::exp(-kTwoPiSq * sig * sig * tau * tau) *
           std::cos(kTwoPi * p.mean_frequencies[i] * tau);
  }
  return acc;
}

double gibbs_eval(double ell_x, double ell_xp, double x, double x_prime) {
  if (!(ell_x > 0.0) || !(ell_xp > 0.0))
    throw std::invalid_argument("gibbs: lengthscales must be > 0");
  const double s = ell_x * ell_x + ell_xp * ell_xp;
  const double d = x - x_prime;
  return std::sqrt(2.0 * ell_x * ell_xp / s) * std::exp(-d * d / s);
}

double bsm_eval(const BsmParams& p, double x, double x_prime) {
  p.validate();
  double acc = 0.0;
  for (const auto& c : p.components) {
    // xt' Sigma xt with xt = (x, -x')'.
    const double quad = c.sigma * c.sigma * x * x -
                        2.0 * c.rho * c.sigma * c.sigma_prime * x * x_prime +
                        c.sigma_prime * c.sigma_prime * x_prime * x_prime;
    const double cx1 = std::cos(kTwoPi * c.mu * x) + std::cos(kTwoPi * c.mu_prime * x);
    const double sx1 = std::sin(kTwoPi * c.mu * x) + std::sin(kTwoPi * c.mu_prime * x);
    const double cx2 = std::cos(kTwoPi * c.mu * x_prime) + std::cos(kTwoPi * c.mu_prime * x_prime);
    const double sx2 = std::sin(kTwoPi * c.mu * x_prime) + std::sin(kTwoPi * c.mu_prime * x_prime);
    acc += c.weight * c.weight * std::exp(-kTwoPiSq * quad) * (cx1 * cx2 + sx1 * sx2);
  }
  return acc;
}

double gsm_eval(const std::vector<std::pair<GsmPointValues, GsmPointValues>>& comp, double x,
                double x_prime) {
  double acc = 0.0;
  for (const auto& [a, b] : comp) {
    acc += a.w * b.w * gibbs_eval(a.ell, b.ell, x, x_prime) *
           std::cos(kTwoPi * (a.mu * x - b.mu * x_prime));
  }
  return acc;
}

Mat se_gram(const SeParams& p, const Vec& axis) {
  p.validate();
  const auto n = axis.size();
  Mat k(n, n);
  const double inv = 1.0 / (2.0 * p.lengthscale * p.lengthscale);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double d = axis[i] - axis[j];
      k(i, j) = p.signal_variance * std::exp(-d * d * inv);
    }
  return k;
}

Mat ss_gram(const SsParams& p, const Vec& axis) {
  p.validate();
  const auto n = axis.size();
  Mat k(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) k(i, j) = ss_eval(p, axis[i] - axis[j]);
  return k;
}

Mat sm_gram(const SmParams& p, const Vec& axis) {
  p.validate();
  const auto n = axis.size();
  Mat k(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) k(i, j) = sm_eval(p, axis[i] - axis[j]);
  return k;
}

Mat gsm_gram_component(const GsmComponentValues& v, const Vec& axis) {
  const auto n = axis.size();
  if (v.w.size() != n) throw std::invalid_argument("gsm gram: latent length != axis length");
  Mat k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double phi_i = kTwoPi * v.mu[i] * axis[i];
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double phi_j = kTwoPi * v.mu[j] * axis[j];
      const double val = v.w[i] * v.w[j] * gibbs_eval(v.ell[i], v.ell[j], axis[i], axis[j]) *
                         std::cos(phi_i - phi_j);
      k(i, j) = val;
      k(j, i) = val;
    }
  }
  return k;
}

Mat gsm_gram(const std::vector<GsmComponentValues>& comps, const Vec& axis) {
  if (comps.empty()) throw std::invalid_argument("gsm gram: need at least one component");
  Mat k = gsm_gram_component(comps[0], axis);
  for (size_t i = 1; i < comps.size(); ++i) k += gsm_gram_component(comps[i], axis);
  return k;
}

Mat gsm_gram_grad_packed(const GsmComponentValues& v, const Vec& axis, LatentClass which,
                         const Vec& mu_chain) {
  const auto n = axis.size();
  if (v.w.size() != n) throw std::invalid_argument("gsm gram grad: latent length != axis length");
  Mat d(n, n);
  switch (which) {
    case LatentClass::w:
      // d k_ij / d log w_i = k_ij (and the diagonal picks up both factors).
      return gsm_gram_component(v, axis);
    case LatentClass::ell:
      for (Eigen::Index i = 0; i < n; ++i) {
        const double phi_i = kTwoPi * v.mu[i] * axis[i];
        const double li2 = v.ell[i] * v.ell[i];
        for (Eigen::Index j = 0; j < n; ++j) {
          if (j == i) {
            d(i, j) = 0.0;  // k_ii = w_i^2 does not depend on l_i
            continue;
          }
          const double phi_j = kTwoPi * v.mu[j] * axis[j];
          const double s = li2 + v.ell[j] * v.ell[j];
          const double dx = axis[i] - axis[j];
          const double kij = v.w[i] * v.w[j] * gibbs_eval(v.ell[i], v.ell[j], axis[i], axis[j]) *
                             std::cos(phi_i - phi_j);
          d(i, j) = kij * (0.5 - li2 / s + 2.0 * dx * dx * li2 / (s * s));
        }
      }
      return d;
    case LatentClass::mu:
      if (mu_chain.size() != n)
        throw std::invalid_argument("gsm gram grad: mu chain length != axis length");
      for (Eigen::Index i = 0; i < n; ++i) {
        const double phi_i = kTwoPi * v.mu[i] * axis[i];
        for (Eigen::Index j = 0; j < n; ++j) {
          if (j == i) {
            d(i, j) = 0.0;  // cos(phi_i - phi_i) stationary in mu_i on the diagonal
            continue;
          }
          const double phi_j = kTwoPi * v.mu[j] * axis[j];
          d(i, j) = -v.w[i] * v.w[j] * gibbs_eval(v.ell[i], v.ell[j], axis[i], axis[j]) *
                    std::sin(phi_i - phi_j) * kTwoPi * axis[i] * mu_chain[i];
        }
      }
      return d;
  }
  throw std::invalid_argument("gsm gram grad: unknown latent class");
}

Mat expand_packed_grad(const Mat& packed, Eigen::Index j) {
  const auto n = packed.rows();
  Mat full = Mat::Zero(n, n);
  full.row(j) = packed.row(j);
  full.col(j) += packed.row(j).transpose();
  return full;
}

KronGram::KronGram(std::vector<Mat> f) : factors(std::move(f)) {
  if (factors.empty()) throw std::invalid_argument("kron gram: empty factor list");
  for (const auto& m : factors)
    if (m.rows() != m.cols()) throw std::invalid_argument("kron gram: factors must be square");
}

Eigen::Index KronGram::total_size() const {
  Eigen::Index n = 1;
  for (const auto& m : factors) n *= m.rows();
  return n;
}

Vec KronGram::diagonal() const {
  Vec d = factors[0].diagonal();
  for (size_t p = 1; p < factors.size(); ++p) {
    const Vec dp = factors[p].diagonal();
    Vec out(d.size() * dp.size());
    for (Eigen::Index i = 0; i < d.size(); ++i)
      out.segment(i * dp.size(), dp.size()) = d[i] * dp;
    d = std::move(out);
  }
  return d;
}

Mat KronGram::materialise() const {
  Mat k = factors[0];
  for (size_t p = 1; p < factors.size(); ++p) {
    const Mat& f = factors[p];
    Mat out(k.rows() * f.rows(), k.cols() * f.cols());
    for (Eigen::Index i = 0; i < k.rows(); ++i)
      for (Eigen::Index j = 0; j < k.cols(); ++j)
        out.block(i * f.rows(), j * f.cols(), f.rows(), f.cols()) = k(i, j) * f;
    k = std::move(out);
  }
  return k;
}

}  // namespace gsmgp
