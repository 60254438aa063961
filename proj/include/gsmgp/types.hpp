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

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gsmgp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Relative eigenvalue tolerance below which a Gram matrix counts as PSD.
inline constexpr double kPsdTol = 1e-8;

struct SeParams {
  double signal_variance = 1.0;  // sigma_f^2
  double lengthscale = 1.0;
  void validate() const {
    if (!(signal_variance > 0.0)) throw std::invalid_argument("se: signal_variance must be > 0");
    if (!(lengthscale > 0.0)) throw std::invalid_argument("se: lengthscale must be > 0");
  }
};

struct SsParams {
  std::vector<double> frequencies;  // s_i, cycles per input unit
  void validate() const {
    if (frequencies.empty()) throw std::invalid_argument("ss: need at least one frequency");
  }
};

struct SmParams {
  std::vector<double> weights;            // w_i
  std::vector<double> mean_frequencies;   // mu_i
  std::vector<double> frequency_stddevs;  // sigma_i
  void validate() const {
    const size_t q = weights.size();
    if (q == 0 || mean_frequencies.size() != q || frequency_stddevs.size() != q)
      throw std::invalid_argument("sm: component lists must be nonempty and equally sized");
    for (size_t i = 0; i < q; ++i) {
      if (!(weights[i] > 0.0)) throw std::invalid_argument("sm: weights must be > 0");
      if (!(frequency_stddevs[i] > 0.0)) throw std::invalid_argument("sm: stddevs must be > 0");
    }
  }
};

struct BsmComponent {
  double weight = 1.0;  // w_i
  double mu = 0.0;      // first frequency mean
  double mu_prime = 0.0;
  double sigma = 1.0;  // first frequency stddev
  double sigma_prime = 1.0;
  double rho = 0.0;  // correlation, in (-1, 1)
};

struct BsmParams {
  std::vector<BsmComponent> components;
  void validate() const {
    if (components.empty()) throw std::invalid_argument("bsm: need at least one component");
    for (const auto& c : components) {
      if (!(c.weight > 0.0)) throw std::invalid_argument("bsm: weight must be > 0");
      if (!(c.sigma > 0.0) || !(c.sigma_prime > 0.0))
        throw std::invalid_argument("bsm: sigma must be > 0");
      if (!(c.rho > -1.0 && c.rho < 1.0)) throw std::invalid_argument("bsm: |rho| must be < 1");
    }
  }
};

// GSM latent values evaluated on a concrete input axis (one component, one dimension).
struct GsmComponentValues {
  Vec w;    // per-input weights, > 0
  Vec ell;  // per-input lengthscales, > 0
  Vec mu;   // per-input frequencies, in (0, F_N)
  void validate(double nyquist) const {
    const auto n = w.size();
    if (ell.size() != n || mu.size() != n)
      throw std::invalid_argument("gsm values: w, ell, mu must have the same length");
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!(w[j] > 0.0)) throw std::invalid_argument("gsm values: w must be > 0");
      if (!(ell[j] > 0.0)) throw std::invalid_argument("gsm values: ell must be > 0");
      if (!(mu[j] > 0.0 && mu[j] < nyquist))
        throw std::invalid_argument("gsm values: mu must lie strictly inside (0, F_N)");
    }
  }
};

// Square integration box with n x n uniform points, used by the Fourier oracles.
struct QuadratureSpec {
  double lo = -1.0;
  double hi = 1.0;
  int n = 401;
  void validate() const {
    if (!(hi > lo)) throw std::invalid_argument("quadrature: hi must exceed lo");
    if (n < 3) throw std::invalid_argument("quadrature: need at least 3 points per side");
  }
};

}  // namespace gsmgp
