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
#include <vector>

#include "doctest.h"
#include "gsmgp/kernels.hpp"
#include "gsmgp/latent.hpp"
#include "gsmgp/model.hpp"
#include "gsmgp/rng.hpp"
#include "gsmgp/types.hpp"

namespace {

using namespace gsmgp;

constexpr double kTwoPi = 6.283185307179586476925286766559;

Vec linspace(double lo, double hi, Eigen::Index n) { return Vec::LinSpaced(n, lo, hi); }

BsmParams narrow_q1() { return {{{0.8, 0.4, 0.9, 0.005, 0.006, 0.2}}}; }

BsmParams narrow_q3() {
  return {{{1.0, 0.3, 0.7, 0.0045, 0.0055, -0.3},
           {0.6, 0.9, 1.1, 0.007, 0.005, 0.1},
           {0.4, 0.5, 0.25, 0.006, 0.0065, 0.4}}};
}

double weight_mass(const BsmParams& p) {
  double m = 0.0;
  for (const auto& c : p.components) m += c.weight * c.weight;
  return m;
}

// Worst |oracle - closed form| over a 5 x 5 grid on [-1, 1]^2.
double oracle_error(const BsmParams& surface, const QuadratureSpec& quad) {
  const BsmOracle oracle(surface, quad);
  const Vec pts = linspace(-1.0, 1.0, 5);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < pts.size(); ++i)
    for (Eigen::Index j = 0; j < pts.size(); ++j)
      worst = std::max(worst,
                       std::abs(oracle.eval(pts[i], pts[j]) - bsm_eval(surface, pts[i], pts[j])));
  return worst;
}

}  // namespace

TEST_CASE("spectral: frozen surface value") {
  // Reference value: sum over the eight signed permutations of two bivariate normal
  // densities at the origin, evaluated independently.
  BsmParams p{{{1.0, 0.0, 0.0, 0.7, 0.3, 0.0}}};
  CHECK(surface_eval(p, 0.0, 0.0) == doctest::Approx(6.063045451119823).epsilon(1e-12));
}

TEST_CASE("spectral: surface symmetries and sign") {
  Rng rng(7);
  BsmParams same{{{0.8, 0.4, 0.9, 0.05, 0.05, 0.2}}};  // sigma = sigma'
  BsmParams mixed{{{0.8, 0.4, 0.9, 0.05, 0.07, 0.2}}};
  BsmParams swapped{{{0.8, 0.9, 0.4, 0.07, 0.05, 0.2}}};  // (mu, sigma) pairs exchanged
  for (int t = 0; t < 1000; ++t) {
    const double s = rng.uniform(-1.5, 1.5);
    const double sp = rng.uniform(-1.5, 1.5);
    CHECK(surface_eval(mixed, s, sp) >= 0.0);
    // Coordinate swap is exact when sigma = sigma'.
    CHECK(surface_eval(same, s, sp) == doctest::Approx(surface_eval(same, sp, s)).epsilon(1e-12));
    // In general it must be paired with swapping the component parameters.
    CHECK(surface_eval(mixed, s, sp) ==
          doctest::Approx(surface_eval(swapped, sp, s)).epsilon(1e-12));
    // Sign flip of both arguments is always exact.
    CHECK(surface_eval(mixed, -s, -sp) ==
          doctest::Approx(surface_eval(mixed, s, sp)).epsilon(1e-12));
  }
}

TEST_CASE("spectral: quadrature oracle matches the closed-form kernel") {
  for (const BsmParams& surface : {narrow_q1(), narrow_q3()}) {
    const QuadratureSpec quad = bsm_default_box(surface, 401);
    const BsmOracle oracle(surface, quad);

    // Kernel scale for the tolerance denominators.
    double kmax = 1.0;
    const Vec pts = linspace(-1.0, 1.0, 5);
    for (Eigen::Index i = 0; i < pts.size(); ++i)
      for (Eigen::Index j = 0; j < pts.size(); ++j)
        kmax = std::max(kmax, std::abs(bsm_eval(surface, pts[i], pts[j])));

    for (Eigen::Index i = 0; i < pts.size(); ++i) {
      for (Eigen::Index j = 0; j < pts.size(); ++j) {
        double imag = 0.0;
        const double val = oracle.eval(pts[i], pts[j], &imag);
        CHECK(std::abs(val - bsm_eval(surface, pts[i], pts[j])) <= 1e-3 * kmax);
        CHECK(std::abs(imag) <= 1e-6 * kmax);
      }
    }

    // k(0,0) = 4 sum w^2 and the raw surface mass is twice that (eight unit
    // Gaussians per component against the half-sum pairing).
    const double mass = weight_mass(surface);
    CHECK(oracle.eval(0.0, 0.0) == doctest::Approx(4.0 * mass).epsilon(1e-3));
    CHECK(oracle.surface_mass() == doctest::Approx(8.0 * mass).epsilon(1e-3));

    // Free-function wrapper is the same quadrature.
    CHECK(fourier_oracle_bsm(surface, 0.3, -0.4, quad) ==
          doctest::Approx(oracle.eval(0.3, -0.4)).epsilon(1e-12));
  }
}

TEST_CASE("spectral: doubling the quadrature nodes improves the oracle") {
  const BsmParams surface = narrow_q1();
  const double err_coarse = oracle_error(surface, bsm_default_box(surface, 401));
  const double err_fine = oracle_error(surface, bsm_default_box(surface, 801));
  CHECK(err_fine <= 0.5 * err_coarse);
}

TEST_CASE("spectral: too-small quadrature box is rejected") {
  BsmParams wide{{{1.0, 0.0, 0.0, 1.0, 1.0, 0.0}}};
  CHECK_NOTHROW(BsmOracle(wide, bsm_default_box(wide, 101)));
  CHECK_THROWS_AS(BsmOracle(wide, QuadratureSpec{-1.0, 1.0, 101}), std::invalid_argument);
}

TEST_CASE("spectral: latent-modulated oracle concentrates on the diagonal") {
  // Constant latents: the kernel is stationary, so the generalised transform
  // should be (numerically) diagonal with the ridge at the latent frequency.
  const Vec axis = linspace(-10.0, 10.0, 41);
  const HyperPrior prior = HyperPrior::for_range(20.0);
  const double band = 0.1;  // spectral bandwidth; ell = 1/(2 pi band)
  const GsmParams params = GsmParams::constant({axis}, 1, prior, 1.0, 1.0 / (kTwoPi * band), 0.3);
  const QuadratureSpec box{-10.0, 10.0, 401};
  const GsmOracle oracle(params, box);

  const Vec freqs = linspace(0.0, 2.0, 41);
  const Mat g = oracle.grid(freqs);
  Eigen::Index bi = 0, bj = 0;
  g.cwiseAbs().maxCoeff(&bi, &bj);
  CHECK(bi == bj);
  CHECK(std::abs(freqs[bi] - 0.3) <= freqs[1] - freqs[0]);

  // The finite integration box leaves a slowly decaying windowing shoulder
  // beside the diagonal (measured ~6% of the peak), so concentration means a
  // peak-to-shoulder ratio of at least ten.
  const double diag_max = g.diagonal().cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < freqs.size(); ++i)
    for (Eigen::Index j = 0; j < freqs.size(); ++j)
      if (i != j) CHECK(std::abs(g(i, j)) <= 0.10 * diag_max);

  // grid() is the same quadrature as eval().
  CHECK(g(6, 6) == doctest::Approx(oracle.eval(freqs[6], freqs[6])).epsilon(1e-10));
  CHECK(g(6, 10) == doctest::Approx(oracle.eval(freqs[6], freqs[10])).epsilon(1e-10));

  // Symmetries of the quadrature, and a vanishing imaginary part on the diagonal.
  CHECK(std::abs(oracle.eval(0.25, 0.4) - oracle.eval(0.4, 0.25)) <= 1e-6 * diag_max);
  CHECK(std::abs(oracle.eval(-0.25, -0.4) - oracle.eval(0.25, 0.4)) <= 1e-6 * diag_max);
  double imag = 0.0;
  oracle.eval(0.3, 0.3, &imag);
  CHECK(std::abs(imag) <= 1e-9 * diag_max);

  CHECK(fourier_oracle_gsm(params, 0.3, 0.3, box) ==
        doctest::Approx(oracle.eval(0.3, 0.3)).epsilon(1e-12));
}

TEST_CASE("spectral: latent-modulated oracle rejects undecayed kernels") {
  const Vec axis = linspace(-10.0, 10.0, 41);
  const HyperPrior prior = HyperPrior::for_range(20.0);
  const GsmParams params = GsmParams::constant({axis}, 1, prior, 1.0, 5.0, 0.3);
  CHECK_THROWS_AS(GsmOracle(params, QuadratureSpec{-10.0, 10.0, 201}), std::invalid_argument);
}

TEST_CASE("spectral: model spectrogram bands") {
  const Vec axis = linspace(0.0, 1.0, 11);  // Nyquist 5
  const HyperPrior prior = HyperPrior::for_range(1.0);

  // Reference value: w^2 N(s | mu, (1/(2 pi ell))^2) at w=1.2, ell=0.4, mu=0.9, s=1.
  {
    const GsmParams params = GsmParams::constant({axis}, 1, prior, 1.2, 0.4, 0.9);
    Vec freq(1);
    freq[0] = 1.0;
    const Spectrogram spec = model_spectrogram(params, axis, freq);
    CHECK(spec.amplitude.rows() == axis.size());
    CHECK(spec.amplitude(0, 0) == doctest::Approx(1.398930730442034).epsilon(1e-12));
  }

  // Constant latents give identical rows; the ridge sits at mu and each row
  // integrates to the squared weight once the band is fully covered.
  const double w = 1.2, ell = 1.5, mu = 0.9;
  const double band = 1.0 / (2.0 * M_PI * ell);
  const GsmParams params = GsmParams::constant({axis}, 1, prior, w, ell, mu);
  const Vec freq = linspace(mu - 6.0 * band, mu + 6.0 * band, 241);
  const Spectrogram spec = model_spectrogram(params, axis, freq);
  for (Eigen::Index i = 1; i < spec.amplitude.rows(); ++i)
    CHECK((spec.amplitude.row(i) - spec.amplitude.row(0)).cwiseAbs().maxCoeff() <= 1e-12);

  Eigen::Index best = 0;
  spec.amplitude.row(0).maxCoeff(&best);
  CHECK(std::abs(freq[best] - mu) <= freq[1] - freq[0]);

  double mass = 0.0;
  for (Eigen::Index j = 0; j + 1 < freq.size(); ++j)
    mass += 0.5 * (spec.amplitude(0, j) + spec.amplitude(0, j + 1)) * (freq[j + 1] - freq[j]);
  CHECK(mass == doctest::Approx(w * w).epsilon(0.01));
}

TEST_CASE("spectral: empirical spectrogram of a pure tone") {
  const int n = 256;
  const double dt = 0.01, f0 = 7.0;
  Vec x(n), y(n);
  for (int i = 0; i < n; ++i) {
    x[i] = i * dt;
    y[i] = std::cos(kTwoPi * f0 * x[i]);
  }
  const int window = 64;
  const Spectrogram spec = empirical_spectrogram(x, y, window);
  const double bin = spec.frequency_axis[1] - spec.frequency_axis[0];
  CHECK(spec.frequency_axis[0] == 0.0);
  CHECK(spec.frequency_axis[spec.frequency_axis.size() - 1] <= 0.5 / dt * (1.0 + 1e-9));
  const Vec ridge = spectrogram_ridge(spec);
  for (Eigen::Index i = 0; i < ridge.size(); ++i) CHECK(std::abs(ridge[i] - f0) <= bin);

  // Window centers advance by hop steps starting at the half-window sample.
  CHECK(spec.input_axis[0] == doctest::Approx(x[window / 2]));
  CHECK(spec.input_axis[1] == doctest::Approx(x[window / 2 + window / 2]));
}

TEST_CASE("spectral: empirical spectrogram of silence is zero") {
  const Vec x = linspace(0.0, 1.0, 64);
  const Vec y = Vec::Zero(64);
  const Spectrogram spec = empirical_spectrogram(x, y, 16);
  CHECK(spec.amplitude.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("spectral: empirical spectrogram tracks a descending chirp") {
  // Frequencies must stay well above the window resolution 1/(window * dt)
  // (about 6.3 cycles per unit here) or the Hann main lobe swallows the tone.
  const int n = 400;
  Vec x(n), y(n);
  double phase = 0.0;
  double prev_mu = 25.0;
  for (int i = 0; i < n; ++i) {
    x[i] = static_cast<double>(i) / (n - 1);
    const double mu = 20.0 + 5.0 * (1.0 - x[i]) * (1.0 - x[i]);
    if (i > 0) phase += 0.5 * (mu + prev_mu) * (x[i] - x[i - 1]);
    prev_mu = mu;
    y[i] = std::sin(kTwoPi * phase);
  }
  const Spectrogram spec = empirical_spectrogram(x, y, 64);
  const double bin = spec.frequency_axis[1] - spec.frequency_axis[0];
  const Vec ridge = spectrogram_ridge(spec);
  REQUIRE(ridge.size() >= 4);
  for (Eigen::Index i = 1; i < ridge.size(); ++i) CHECK(ridge[i] <= ridge[i - 1] + 1e-9);
  CHECK(ridge[0] - ridge[ridge.size() - 1] >= 2.5);
  // The ridge should sit near the instantaneous frequency at each window center.
  for (Eigen::Index i = 0; i < ridge.size(); ++i) {
    const double c = spec.input_axis[i];
    const double mu = 20.0 + 5.0 * (1.0 - c) * (1.0 - c);
    CHECK(std::abs(ridge[i] - mu) <= 2.0 * bin);
  }
}

TEST_CASE("spectral: empirical spectrogram input validation") {
  const Vec x = linspace(0.0, 1.0, 32);
  const Vec y = Vec::Ones(32);
  CHECK_THROWS_AS(empirical_spectrogram(x, Vec::Ones(31), 8), std::invalid_argument);
  CHECK_THROWS_AS(empirical_spectrogram(x, y, 1), std::invalid_argument);
  CHECK_THROWS_AS(empirical_spectrogram(x, y, 33), std::invalid_argument);
  CHECK_THROWS_AS(empirical_spectrogram(x, y, 8, 1.0), std::invalid_argument);
  Vec warped = x;
  warped[5] += 0.01;
  CHECK_THROWS_AS(empirical_spectrogram(warped, y, 8), std::invalid_argument);
}

TEST_CASE("spectral: ridge skips the zero-frequency bin") {
  Spectrogram spec;
  spec.frequency_axis = linspace(0.0, 2.0, 3);
  spec.input_axis = linspace(0.0, 1.0, 2);
  spec.amplitude = Mat(2, 3);
  spec.amplitude << 10.0, 1.0, 5.0, 10.0, 6.0, 2.0;
  const Vec with_dc = spectrogram_ridge(spec, false);
  const Vec without_dc = spectrogram_ridge(spec, true);
  CHECK(with_dc[0] == 0.0);
  CHECK(with_dc[1] == 0.0);
  CHECK(without_dc[0] == 2.0);
  CHECK(without_dc[1] == 1.0);
}
