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

#include <vector>

#include "gsmgp/model.hpp"
#include "gsmgp/types.hpp"

namespace gsmgp {

// Input-by-frequency amplitude map.
struct Spectrogram {
  Vec input_axis;      // N window centers / evaluation inputs
  Vec frequency_axis;  // M frequencies in [0, Nyquist]
  Mat amplitude;       // N x M, non-negative
};

// Symmetrised spectral density of a bivariate Gaussian mixture: each component
// contributes eight Gaussians, one per signed permutation of (mu, mu'),
// sharing the component covariance and weighted by w^2.
double surface_eval(const BsmParams& surface, double s, double s_prime);

// Symmetric frequency box covering every component mean plus six stddevs.
QuadratureSpec bsm_default_box(const BsmParams& surface, int n = 401);

// Trapezoid quadrature of the generalised Fourier transform of the surface.
// The eight symmetrised Gaussians pair into four cosine terms, so the kernel
// value is half the raw quadrature sum; surface_mass returns the raw mass.
class BsmOracle {
 public:
  BsmOracle(const BsmParams& surface, const QuadratureSpec& quad);
  double eval(double x, double x_prime, double* imag_out = nullptr) const;
  double surface_mass() const;

 private:
  Vec s_;        // quadrature nodes
  Vec weights_;  // trapezoid weights
  Mat density_;  // surface values on the node grid
};

double fourier_oracle_bsm(const BsmParams& surface, double x, double x_prime,
                          const QuadratureSpec& quad, double* imag_out = nullptr);

// Quadrature of the inverse transform of a one-dimensional latent-modulated
// kernel over an input box; diagnostic only (no closed form exists).
class GsmOracle {
 public:
  GsmOracle(const GsmParams& params, const QuadratureSpec& input_quad, int dim = 0);
  double eval(double s, double s_prime, double* imag_out = nullptr) const;
  // Real part on a frequency grid, computed in one pass over the kernel.
  Mat grid(const Vec& frequencies) const;

 private:
  Vec x_;
  Vec weights_;
  Mat gram_;
};

double fourier_oracle_gsm(const GsmParams& params, double s, double s_prime,
                          const QuadratureSpec& input_quad, double* imag_out = nullptr);

// Instantaneous Gaussian frequency bands implied by the latent functions:
// amplitude(x, s) = sum_i w_i(x)^2 N(s | mu_i(x), (1/(2 pi ell_i(x)))^2).
Spectrogram model_spectrogram(const GsmParams& params, const Vec& input_axis,
                              const Vec& frequency_axis, int dim = 0);

// Short-time discrete Fourier magnitude with a Hann window, 50% default
// overlap, and four-fold zero padding; frequency axis capped at Nyquist.
Spectrogram empirical_spectrogram(const Vec& x, const Vec& y, int window, double overlap = 0.5);

// Per-row argmax frequency; bin zero is skipped so a mean offset cannot
// masquerade as a ridge.
Vec spectrogram_ridge(const Spectrogram& spec, bool exclude_dc = true);

}  // namespace gsmgp

