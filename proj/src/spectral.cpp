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

#include "gsmgp/spectral.hpp"

#include <cmath>
#include <stdexcept>

#include "gsmgp/kernels.hpp"
#include "gsmgp/latent.hpp"

namespace gsmgp {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;
constexpr double kBoundaryTol = 1e-12;

double gauss2(double s, double sp, double ma, double mb, double va, double vb, double cov) {
  const double det = va * vb - cov * cov;
  const double da = s - ma, db = sp - mb;
  const double quad = (vb * da * da - 2.0 * cov * da * db + va * db * db) / det;
  return std::exp(-0.5 * quad) / (kTwoPi * std::sqrt(det));
}

Vec trapezoid_nodes(const QuadratureSpec& quad, Vec* weights) {
  quad.validate();
  Vec s(quad.n);
  const double h = (quad.hi - quad.lo) / static_cast<double>(quad.n - 1);
  for (int i = 0; i < quad.n; ++i) s[i] = quad.lo + h * i;
  *weights = Vec::Constant(quad.n, h);
  (*weights)[0] *= 0.5;
  (*weights)[quad.n - 1] *= 0.5;
  return s;
}

}  // namespace

double surface_eval(const BsmParams& surface, double s, double s_prime) {
  surface.validate();
  double acc = 0.0;
  for (const BsmComponent& c : surface.components) {
    const double va = c.sigma * c.sigma;
    const double vb = c.sigma_prime * c.sigma_prime;
    const double cov = c.rho * c.sigma * c.sigma_prime;
    const double w2 = c.weight * c.weight;
    const double means[4][2] = {{c.mu, c.mu},
                                {c.mu, c.mu_prime},
                                {c.mu_prime, c.mu},
                                {c.mu_prime, c.mu_prime}};
    for (const auto& m : means) {
      acc += w2 * gauss2(s, s_prime, m[0], m[1], va, vb, cov);
      acc += w2 * gauss2(s, s_prime, -m[0], -m[1], va, vb, cov);
    }
  }
  return acc;
}

QuadratureSpec bsm_default_box(const BsmParams& surface, int n) {
  // Eight stddevs past the outermost mean: the boundary density then sits
  // around exp(-32) of the peak, clearing the 1e-12 truncation guard (a
  // six-stddev margin would leave exp(-18) and always trip it).
  double extent = 0.0;
  for (const BsmComponent& c : surface.components) {
    const double smax = std::max(c.sigma, c.sigma_prime);
    extent = std::max({extent, std::abs(c.mu) + 8.0 * smax, std::abs(c.mu_prime) + 8.0 * smax});
  }
  return QuadratureSpec{-extent, extent, n};
}

BsmOracle::BsmOracle(const BsmParams& surface, const QuadratureSpec& quad) {
  s_ = trapezoid_nodes(quad, &weights_);
  const int n = quad.n;
  density_.resize(n, n);
  double peak = 0.0, boundary = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double v = surface_eval(surface, s_[i], s_[j]);
      density_(i, j) = v;
      peak = std::max(peak, v);
      if (i == 0 || j == 0 || i == n - 1 || j == n - 1) boundary = std::max(boundary, v);
    }
  if (boundary > kBoundaryTol * peak)
    throw std::invalid_argument("quadrature box too small: boundary density exceeds 1e-12 of peak");
}

double BsmOracle::eval(double x, double x_prime, double* imag_out) const {
  const Eigen::Index n = s_.size();
  Vec ca(n), sa(n), cb(n), sb(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = kTwoPi * x * s_[i];
    const double b = kTwoPi * x_prime * s_[i];
    ca[i] = weights_[i] * std::cos(a);
    sa[i] = weights_[i] * std::sin(a);
    cb[i] = weights_[i] * std::cos(b);
    sb[i] = weights_[i] * std::sin(b);
  }
  // e^{2 pi i (x s - x' s')} split into cos(a)cos(b)+sin(a)sin(b) and
  // sin(a)cos(b)-cos(a)sin(b); the pairing of the eight Gaussians into four
  // cosine terms halves the kernel value relative to the raw sum.
  const double re = ca.dot(density_ * cb) + sa.dot(density_ * sb);
  if (imag_out) *imag_out = 0.5 * (sa.dot(density_ * cb) - ca.dot(density_ * sb));
  return 0.5 * re;
}

double BsmOracle::surface_mass() const {
  return weights_.dot(density_ * weights_);
}

double fourier_oracle_bsm(const BsmParams& surface, double x, double x_prime,
                          const QuadratureSpec& quad, double* imag_out) {
  return BsmOracle(surface, quad).eval(x, x_prime, imag_out);
}

GsmOracle::GsmOracle(const GsmParams& params, const QuadratureSpec& input_quad, int dim) {
  x_ = trapezoid_nodes(input_quad, &weights_);
  const GsmDim& gd = params.dims.at(dim);
  std::vector<GsmComponentValues> comps;
  for (const auto& c : gd.comps)
    comps.push_back({extend(c.w, x_), extend(c.ell, x_), extend(c.mu, x_)});
  gram_ = gsm_gram(comps, x_);
  const Eigen::Index n = x_.size();
  const double peak = gram_.diagonal().cwiseAbs().maxCoeff();
  const double corner = std::max(std::abs(gram_(0, n - 1)), std::abs(gram_(n - 1, 0)));
  if (corner > kBoundaryTol * peak)
    throw std::invalid_argument(
        "quadrature box too small: kernel has not decayed at the off-diagonal corners");
}

double GsmOracle::eval(double s, double s_prime, double* imag_out) const {
  const Eigen::Index n = x_.size();
  Vec ca(n), sa(n), cb(n), sb(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = kTwoPi * s * x_[i];
    const double b = kTwoPi * s_prime * x_[i];
    ca[i] = weights_[i] * std::cos(a);
    sa[i] = weights_[i] * std::sin(a);
    cb[i] = weights_[i] * std::cos(b);
    sb[i] = weights_[i] * std::sin(b);
  }
  const double re = ca.dot(gram_ * cb) + sa.dot(gram_ * sb);
  if (imag_out) *imag_out = -(sa.dot(gram_ * cb) - ca.dot(gram_ * sb));
  return re;
}

Mat GsmOracle::grid(const Vec& frequencies) const {
  const Eigen::Index n = x_.size(), m = frequencies.size();
  Mat c(n, m), s(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index f = 0; f < m; ++f) {
      const double a = kTwoPi * frequencies[f] * x_[i];
      c(i, f) = weights_[i] * std::cos(a);
      s(i, f) = weights_[i] * std::sin(a);
    }
  return c.transpose() * gram_ * c + s.transpose() * gram_ * s;
}

double fourier_oracle_gsm(const GsmParams& params, double s, double s_prime,
                          const QuadratureSpec& input_quad, double* imag_out) {
  return GsmOracle(params, input_quad).eval(s, s_prime, imag_out);
}

Spectrogram model_spectrogram(const GsmParams& params, const Vec& input_axis,
                              const Vec& frequency_axis, int dim) {
  const GsmDim& gd = params.dims.at(dim);
  Spectrogram out;
  out.input_axis = input_axis;
  out.frequency_axis = frequency_axis;
  out.amplitude = Mat::Zero(input_axis.size(), frequency_axis.size());
  for (const auto& c : gd.comps) {
    const Vec w = extend(c.w, input_axis);
    const Vec ell = extend(c.ell, input_axis);
    const Vec mu = extend(c.mu, input_axis);
    for (Eigen::Index i = 0; i < input_axis.size(); ++i) {
      const double band = 1.0 / (kTwoPi * ell[i]);
      const double norm = w[i] * w[i] / (band * std::sqrt(kTwoPi));
      for (Eigen::Index j = 0; j < frequency_axis.size(); ++j) {
        const double z = (frequency_axis[j] - mu[i]) / band;
        out.amplitude(i, j) += norm * std::exp(-0.5 * z * z);
      }
    }
  }
  return out;
}

Spectrogram empirical_spectrogram(const Vec& x, const Vec& y, int window, double overlap) {
  const Eigen::Index n = x.size();
  if (n != y.size()) throw std::invalid_argument("spectrogram: x and y lengths differ");
  if (window < 2 || window > n) throw std::invalid_argument("spectrogram: bad window length");
  if (!(overlap >= 0.0 && overlap < 1.0))
    throw std::invalid_argument("spectrogram: overlap must lie in [0, 1)");
  const double dt = (x[n - 1] - x[0]) / static_cast<double>(n - 1);
  for (Eigen::Index i = 1; i < n; ++i)
    if (std::abs((x[i] - x[i - 1]) - dt) > 1e-6 * std::abs(dt))
      throw std::invalid_argument("spectrogram: input series is not equispaced");

  Vec hann(window);
  for (int k = 0; k < window; ++k)
    hann[k] = 0.5 - 0.5 * std::cos(kTwoPi * k / static_cast<double>(window - 1));

  const int hop = std::max(1, static_cast<int>(std::lround(window * (1.0 - overlap))));
  const int nfft = 4 * window;
  const double nyquist = 1.0 / (2.0 * dt);
  std::vector<double> freqs;
  for (int j = 0; j <= nfft / 2; ++j) {
    const double f = static_cast<double>(j) / (nfft * dt);
    if (f <= nyquist * (1.0 + 1e-12)) freqs.push_back(f);
  }

  std::vector<Eigen::Index> starts;
  for (Eigen::Index s = 0; s + window <= n; s += hop) starts.push_back(s);

  Spectrogram out;
  out.frequency_axis = Eigen::Map<const Vec>(freqs.data(), static_cast<Eigen::Index>(freqs.size()));
  out.input_axis = Vec(starts.size());
  out.amplitude = Mat::Zero(starts.size(), static_cast<Eigen::Index>(freqs.size()));
  for (std::size_t f = 0; f < starts.size(); ++f) {
    const Eigen::Index s0 = starts[f];
    out.input_axis[f] = x[s0 + window / 2];
    for (std::size_t j = 0; j < freqs.size(); ++j) {
      double re = 0.0, im = 0.0;
      for (int k = 0; k < window; ++k) {
        const double phase = -kTwoPi * freqs[j] * (k * dt);
        const double v = hann[k] * y[s0 + k];
        re += v * std::cos(phase);
        im += v * std::sin(phase);
      }
      out.amplitude(f, j) = std::hypot(re, im);
    }
  }
  return out;
}

Vec spectrogram_ridge(const Spectrogram& spec, bool exclude_dc) {
  const Eigen::Index n = spec.amplitude.rows(), m = spec.amplitude.cols();
  const Eigen::Index first = exclude_dc && m > 1 ? 1 : 0;
  Vec ridge(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index best = first;
    for (Eigen::Index j = first; j < m; ++j)
      if (spec.amplitude(i, j) > spec.amplitude(i, best)) best = j;
    ridge[i] = spec.frequency_axis[best];
  }
  return ridge;
}

}  // namespace gsmgp
