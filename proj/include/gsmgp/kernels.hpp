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

#include <utility>
#include <vector>

#include "gsmgp/types.hpp"

namespace gsmgp {

// ---------------------------------------------------------------------------
// Pointwise kernel evaluations.
// ---------------------------------------------------------------------------

// Squared-exponential kernel sigma_f^2 * exp(-(x-x')^2 / (2 l^2)).
double se_eval(const SeParams& p, double x, double x_prime);

// Sparse-spectrum kernel (1/Q) * sum_i cos(2 pi s_i tau).
double ss_eval(const SsParams& p, double tau);

// Spectral mixture kernel sum_i w_i^2 exp(-2 pi^2 sigma_i^2 tau^2) cos(2 pi mu_i tau).
double sm_eval(const SmParams& p, double tau);

// Gibbs kernel with input-dependent lengthscales:
//   sqrt(2 l(x) l(x') / (l(x)^2 + l(x')^2)) * exp(-(x-x')^2 / (l(x)^2 + l(x')^2)).
double gibbs_eval(double ell_x, double ell_xp, double x, double x_prime);

// Bivariate spectral mixture kernel,
//   sum_i w_i^2 exp(-2 pi^2 xt' Sigma_i xt) Psi_i(x)' Psi_i(x'),  xt = (x, -x')',
// with the two-frequency feature Psi_i(x) = (cos 2pi mu x + cos 2pi mu' x,
//                                            sin 2pi mu x + sin 2pi mu' x)'.
double bsm_eval(const BsmParams& p, double x, double x_prime);

// Latent triple (w, l, mu) at a single input.
struct GsmPointValues {
  double w = 1.0;
  double ell = 1.0;
  double mu = 0.5;
};

// Generalised spectral mixture kernel at one input pair; `comp[i]` holds the
// latent values of component i at x (first) and x' (second):
//   sum_i w_i(x) w_i(x') k_gibbs,i(x,x') cos(2 pi (mu_i(x) x - mu_i(x') x')).
double gsm_eval(const std::vector<std::pair<GsmPointValues, GsmPointValues>>& comp, double x,
                double x_prime);

// ---------------------------------------------------------------------------
// Gram matrices.
// ---------------------------------------------------------------------------

Mat se_gram(const SeParams& p, const Vec& axis);
Mat ss_gram(const SsParams& p, const Vec& axis);
Mat sm_gram(const SmParams& p, const Vec& axis);

// Gram of a single GSM component with latent values aligned to `axis`.
Mat gsm_gram_component(const GsmComponentValues& v, const Vec& axis);

// Full GSM Gram: sum of component Grams.
Mat gsm_gram(const std::vector<GsmComponentValues>& comps, const Vec& axis);

enum class LatentClass { w, ell, mu };

// Packed per-entry gradient of one component Gram with respect to the
// transformed latents (log w, log l, logit mu).  The value-affecting structure
// is row/column sparse: dK/dtheta_j = e_j d_j' + d_j e_j' with d_j = row j of
// the returned matrix (the diagonal is consistent because row j's own entry is
// counted twice for the w class and vanishes for the l and mu classes).
// `mu_chain` must hold d mu_j / d(logit mu)_j for the mu class; ignored otherwise.
Mat gsm_gram_grad_packed(const GsmComponentValues& v, const Vec& axis, LatentClass which,
                         const Vec& mu_chain);

// Dense N x N matrix dK/dtheta_j recovered from a packed row (test helper).
Mat expand_packed_grad(const Mat& packed, Eigen::Index j);

// ---------------------------------------------------------------------------
// Kronecker product handle.
// ---------------------------------------------------------------------------

// K = K_1 (x) ... (x) K_P held as its factor list.  Row-major grid order with
// the last axis fastest, so factor 0 corresponds to the slowest index.
struct KronGram {
  std::vector<Mat> factors;

  explicit KronGram(std::vector<Mat> f);

  Eigen::Index total_size() const;
  // Kronecker product of factor diagonals.
  Vec diagonal() const;
  // Materialise the full matrix (small grids only; used by tests and the dense path).
  Mat materialise() const;
};

}  // namespace gsmgp
