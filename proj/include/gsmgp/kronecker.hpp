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

#include "gsmgp/gp_core.hpp"
#include "gsmgp/types.hpp"

namespace gsmgp {

// Per-dimension symmetric eigendecompositions K_p = U_p diag(v_p) U_p'.
struct KronEig {
  std::vector<Mat> u;
  std::vector<Vec> v;
  std::vector<Eigen::Index> dims;

  Eigen::Index total_size() const;
  // Kronecker product of the per-factor eigenvalue vectors.
  Vec lambda() const;
};

// Eigendecompose each factor, clamping round-off negatives (>= -eps_psd * max
// eigenvalue) to zero.  Deeper negatives are kept and surface as errors in
// kron_solve when the noise cannot cover them.
KronEig kron_eig(const std::vector<Mat>& factors);

// Apply `m` along mode p of the tensor `vec` with shape `dims` (row-major,
// last axis fastest); m has n_p columns and any number of rows.
Vec mode_apply(const Vec& vec, const std::vector<Eigen::Index>& dims, int p, const Mat& m);

// (K_1 (x) ... (x) K_P) vec without materialising the product.
Vec kron_mvm(const std::vector<Mat>& factors, const Vec& vec);

// alpha = (K + noise_var I)^-1 y via the eigenbasis.
Vec kron_solve(const KronEig& eig, double noise_var, const Vec& y);

// Gaussian log marginal likelihood (all constants included) plus
// `prior_terms`, evaluated through the eigendecomposition.
double kron_nll(const KronEig& eig, double noise_var, const Vec& y, double prior_terms = 0.0);

// Gradient of the log marginal likelihood for a list of per-dimension factor
// derivative matrices (dim index, dK_dim/dtheta); the returned vector holds one
// entry per derivative followed by the noise_log gradient.
Vec kron_gradient(const KronEig& eig, const std::vector<Mat>& factors,
                  const std::vector<std::pair<int, Mat>>& factor_grads, double noise_var,
                  const Vec& y);

// Likelihood context through the eigendecomposition (same contract as
// dense_context).
LikContext kron_context(const std::vector<Mat>& factors, double noise_var, const Vec& y,
                        bool need_grad);

}  // namespace gsmgp
