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

#include "gsmgp/model.hpp"
#include "gsmgp/types.hpp"

namespace gsmgp {

enum class Backend { dense, kron };

struct Objective {
  double value = 0.0;  // L(theta), ascent convention
  Vec grad;            // d L / d (whitened latents, noise_log)
};

// Cholesky with escalating diagonal jitter (1e-8, 1e-6, 1e-4 times the mean
// diagonal) on failure; throws if the matrix stays indefinite.
Mat jittered_cholesky(Mat a);

// Backend-independent likelihood quantities used by the gradient assembly.
// For each dimension p, with A = K + sigma_n^2 I and alpha = A^-1 y:
//   s[p][a,b] = sum over rest indices of alpha(.,a,.) * gamma_p(.,b,.) where
//               gamma_p = alpha multiplied by every factor except p, so that
//               alpha' (dK/dtheta) alpha = <s[p], dK_p> for Kronecker-structured
//               derivatives, and
//   t[p][a,b] = the matching contraction of A^-1, so tr(A^-1 dK) = <t[p], dK_p>.
struct LikContext {
  double quad = 0.0;    // y' alpha
  double logdet = 0.0;  // log |A|
  double trinv = 0.0;   // tr(A^-1)
  Vec alpha;
  std::vector<Mat> s;
  std::vector<Mat> t;
};

LikContext dense_context(const std::vector<Mat>& factors, double noise_var, const Vec& y,
                         bool need_grad);

// Sum of the latent prior log-densities (zero for baselines): per latent
// function, -1/2 ||theta_tilde||^2 - sum_k log L_kk - (N/2) log 2 pi.
double prior_log_density(const GpModel& model);

// Marginalised log posterior L(theta): Gaussian log marginal likelihood with
// all normalisation constants plus the latent priors.
double nll_value(const GpModel& model, Backend backend);

// L(theta) and its gradient with respect to the packed whitened parameters.
Objective nll_gradient(const GpModel& model, Backend backend);

// Gradient with respect to the *transformed* (unwhitened) latents, same
// packing; used to verify the whitening identity grad_wh = L' grad_unwh.
Vec unwhitened_gradient(const GpModel& model, Backend backend);

struct Prediction {
  Vec mean;
  Vec variance;
};

// Dense prediction at arbitrary points (rows of `points`, one column per
// dimension); off-grid latents come from conditional-mean extension.
Prediction predict_points(const GpModel& model, const Mat& points);

// Prediction on a tensor grid of test axes; `backend` selects the dense or the
// eigendecomposition route (identical results within tolerance).
Prediction predict_grid(const GpModel& model, const std::vector<Vec>& test_axes, Backend backend);

// Per-dimension cross-covariance factor between test values and the training
// axis (component-summed for GSM).
Mat cross_factor(const GpModel& model, int dim, const Vec& test_inputs);

// Per-dimension prior variance factor at test inputs (zero-lag kernel values).
Vec prior_variance_factor(const GpModel& model, int dim, const Vec& test_inputs);

}  // namespace gsmgp
