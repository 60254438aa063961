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

#include "gsmgp/checks.hpp"

#include <cmath>
#include <stdexcept>

#include "gsmgp/gp_core.hpp"
#include "gsmgp/kernels.hpp"
#include "gsmgp/latent.hpp"
#include "gsmgp/model.hpp"
#include "gsmgp/rng.hpp"
#include "gsmgp/spectral.hpp"
#include "gsmgp/train.hpp"

namespace gsmgp {

namespace {

Vec linspace(double lo, double hi, Eigen::Index n) {
  Vec x(n);
  for (Eigen::Index i = 0; i < n; ++i)
    x[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return x;
}

GridDataset random_dataset(const std::vector<Eigen::Index>& dims, std::uint64_t seed) {
  GridDataset data;
  Eigen::Index total = 1;
  for (Eigen::Index n : dims) {
    data.axes.push_back(linspace(0.0, 1.0, n));
    total *= n;
  }
  Rng rng(seed);
  data.y = Vec(total);
  for (Eigen::Index i = 0; i < total; ++i) data.y[i] = rng.normal();
  data.mask.assign(static_cast<std::size_t>(total), true);
  return data;
}

GpModel random_gsm_model(const std::vector<Eigen::Index>& dims, int q, std::uint64_t seed) {
  const GridDataset data = random_dataset(dims, mix_seed(seed, 0));
  const HyperPrior prior = HyperPrior::for_range(1.0, 1.0);
  GpModel model;
  model.kind = KernelKind::gsm;
  model.train_axes = data.axes;
  model.train_y = data.y;
  model.gsm = GsmParams::sample(data.axes, q, prior, mix_seed(seed, 1));
  model.noise_log = -1.0;
  return model;
}

// Worst relative eigenvalue deficit of a symmetric Gram matrix.
double eig_deficit(const Mat& gram) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(gram);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  return std::max(0.0, -lo) / std::max(hi, 1e-300);
}

// Max relative difference between the analytic gradient and central finite
// differences of the objective, guarded against negligible coordinates.
double fd_residual(GpModel model, Backend backend, double h) {
  const Vec x0 = model.pack();
  model.unpack(x0);
  const Objective obj = nll_gradient(model, backend);
  Vec fd(x0.size());
  for (Eigen::Index i = 0; i < x0.size(); ++i) {
    Vec x = x0;
    x[i] = x0[i] + h;
    model.unpack(x);
    const double fp = nll_value(model, backend);
    x[i] = x0[i] - h;
    model.unpack(x);
    const double fm = nll_value(model, backend);
    fd[i] = (fp - fm) / (2.0 * h);
  }
  const double guard = 1e-3 * (1.0 + fd.cwiseAbs().maxCoeff());
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x0.size(); ++i)
    worst = std::max(worst, std::abs(obj.grad[i] - fd[i]) / std::max(std::abs(fd[i]), guard));
  return worst;
}

BsmParams random_surface(int q, std::uint64_t seed) {
  Rng rng(seed);
  BsmParams p;
  for (int i = 0; i < q; ++i) {
    BsmComponent c;
    c.weight = rng.uniform(0.5, 1.5);
    c.mu = rng.uniform(0.2, 1.2);
    c.mu_prime = rng.uniform(0.2, 1.2);
    c.sigma = rng.uniform(0.0045, 0.007);
    c.sigma_prime = rng.uniform(0.0045, 0.007);
    c.rho = rng.uniform(-0.5, 0.5);
    p.components.push_back(c);
  }
  return p;
}

// Max closed-form vs quadrature error on a 5x5 grid in [-1,1]^2, relative to
// the largest kernel magnitude on the grid.
double bsm_quadrature_residual(const BsmParams& surface, int nodes) {
  const BsmOracle oracle(surface, bsm_default_box(surface, nodes));
  const Vec pts = linspace(-1.0, 1.0, 5);
  double worst = 0.0, scale = 0.0;
  for (Eigen::Index i = 0; i < pts.size(); ++i)
    for (Eigen::Index j = 0; j < pts.size(); ++j)
      scale = std::max(scale, std::abs(bsm_eval(surface, pts[i], pts[j])));
  for (Eigen::Index i = 0; i < pts.size(); ++i)
    for (Eigen::Index j = 0; j < pts.size(); ++j) {
      const double closed = bsm_eval(surface, pts[i], pts[j]);
      const double quad = oracle.eval(pts[i], pts[j]);
      worst = std::max(worst, std::abs(closed - quad));
    }
  return worst / std::max(scale, 1e-300);
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(a)); }

double rel_diff(const Vec& a, const Vec& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, a.cwiseAbs().maxCoeff());
}

std::vector<CheckResult> suite_psd() {
  std::vector<CheckResult> out;
  const Vec axis = linspace(0.0, 1.0, 50);
  const HyperPrior prior = HyperPrior::for_range(1.0, 1.0);

  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const GsmParams params = GsmParams::sample({axis}, 2, prior, mix_seed(11, k));
    std::vector<GsmComponentValues> comps;
    for (int i = 0; i < params.q(); ++i) comps.push_back(params.dims[0].values(i));
    worst = std::max(worst, eig_deficit(gsm_gram(comps, axis)));
  }
  out.push_back({"gsm-random-grams", worst <= kPsdTol, worst, kPsdTol});

  const double se = eig_deficit(se_gram({1.3, 0.2}, axis));
  out.push_back({"se-gram", se <= kPsdTol, se, kPsdTol});
  const double sm = eig_deficit(sm_gram({{1.0, 0.7}, {0.3, 1.2}, {0.1, 0.4}}, axis));
  out.push_back({"sm-gram", sm <= kPsdTol, sm, kPsdTol});
  const double ss = eig_deficit(ss_gram({{0.5, 2.0}}, axis));
  out.push_back({"ss-gram", ss <= kPsdTol, ss, kPsdTol});
  return out;
}

std::vector<CheckResult> suite_fourier() {
  std::vector<CheckResult> out;
  const double r1 = bsm_quadrature_residual(random_surface(1, 101), 401);
  out.push_back({"bsm-quadrature-q1", r1 <= 1e-3, r1, 1e-3});
  const double r3 = bsm_quadrature_residual(random_surface(3, 103), 401);
  out.push_back({"bsm-quadrature-q3", r3 <= 1e-3, r3, 1e-3});

  // Stationary latents: the transform of the kernel must peak at the
  // modulation frequency (within one frequency-grid step).
  const Vec axis = linspace(-10.0, 10.0, 41);
  const HyperPrior prior = HyperPrior::for_range(20.0, 1.0);
  GsmParams params = GsmParams::constant({axis}, 1, prior, 1.0, 1.0 / (2.0 * M_PI * 0.1), 0.3);
  QuadratureSpec input_box;
  input_box.lo = -10.0;
  input_box.hi = 10.0;
  input_box.n = 401;
  const GsmOracle oracle(params, input_box);
  const Vec freqs = linspace(0.0, 2.0, 41);
  const Mat surf = oracle.grid(freqs);
  Eigen::Index bi = 0, bj = 0;
  surf.maxCoeff(&bi, &bj);
  const double step = freqs[1] - freqs[0];
  const double res =
      std::max(std::abs(freqs[bi] - 0.3), std::abs(freqs[bj] - 0.3));
  out.push_back({"gsm-oracle-ridge", res <= step + 1e-12, res, step});
  return out;
}

std::vector<CheckResult> suite_gradient() {
  std::vector<CheckResult> out;
  const double h = 1e-5;

  const double g1 = fd_residual(random_gsm_model({20}, 2, 21), Backend::dense, h);
  out.push_back({"gsm-series-q2", g1 <= 1e-4, g1, 1e-4});
  const double g2 = fd_residual(random_gsm_model({5, 5}, 1, 22), Backend::dense, h);
  out.push_back({"gsm-grid-q1", g2 <= 1e-4, g2, 1e-4});

  const GridDataset series = random_dataset({20}, 23);
  for (const KernelKind kind : {KernelKind::se, KernelKind::sm, KernelKind::ss}) {
    TrainConfig cfg;
    cfg.kind = kind;
    cfg.q = 2;
    GpModel model = make_candidate(cfg, series, mix_seed(24, static_cast<int>(kind)));
    const double g = fd_residual(model, Backend::dense, h);
    out.push_back({std::string(kernel_kind_name(kind)) + "-series", g <= 1e-4, g, 1e-4});
  }
  return out;
}

std::vector<CheckResult> suite_kronecker() {
  std::vector<CheckResult> out;
  const std::vector<std::vector<Eigen::Index>> grids = {{8, 8}, {4, 4, 4}};
  for (const auto& dims : grids) {
    GpModel model = random_gsm_model(dims, 1, 31 + static_cast<int>(dims.size()));
    std::string tag;
    for (std::size_t d = 0; d < dims.size(); ++d)
      tag += (d ? "x" : "") + std::to_string(dims[d]);

    const double nd = nll_value(model, Backend::dense);
    const double nk = nll_value(model, Backend::kron);
    const double rn = rel_diff(nd, nk);
    out.push_back({"nll-" + tag, rn <= 1e-6, rn, 1e-6});

    const Objective gd = nll_gradient(model, Backend::dense);
    const Objective gk = nll_gradient(model, Backend::kron);
    const double rg = rel_diff(gd.grad, gk.grad);
    out.push_back({"gradient-" + tag, rg <= 1e-6, rg, 1e-6});

    std::vector<Vec> test_axes;
    for (std::size_t d = 0; d < dims.size(); ++d) test_axes.push_back(linspace(-0.1, 1.1, 5));
    const Prediction pd = predict_grid(model, test_axes, Backend::dense);
    const Prediction pk = predict_grid(model, test_axes, Backend::kron);
    const double rp = std::max(rel_diff(pd.mean, pk.mean), rel_diff(pd.variance, pk.variance));
    out.push_back({"predict-" + tag, rp <= 1e-6, rp, 1e-6});
  }
  return out;
}

std::vector<CheckResult> suite_reduction() {
  std::vector<CheckResult> out;
  Rng rng(41);

  const SmParams sm{{1.0}, {0.5}, {0.2}};
  const double ell_sm = 1.0 / (2.0 * M_PI * 0.2);
  double worst_sm = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double x = rng.uniform(-1.0, 1.0), xp = rng.uniform(-1.0, 1.0);
    const GsmPointValues a{1.0, ell_sm, 0.5}, b{1.0, ell_sm, 0.5};
    worst_sm = std::max(worst_sm, std::abs(gsm_eval({{a, b}}, x, xp) - sm_eval(sm, x - xp)));
  }
  out.push_back({"gsm-equals-sm", worst_sm <= 1e-10, worst_sm, 1e-10});

  const SeParams se{1.0, 0.3};
  double worst_se = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double x = rng.uniform(-1.0, 1.0), xp = rng.uniform(-1.0, 1.0);
    const GsmPointValues a{1.0, 0.3, 0.0}, b{1.0, 0.3, 0.0};
    worst_se = std::max(worst_se, std::abs(gsm_eval({{a, b}}, x, xp) - se_eval(se, x, xp)));
  }
  out.push_back({"gsm-equals-se", worst_se <= 1e-10, worst_se, 1e-10});
  return out;
}

}  // namespace

std::vector<std::string> check_suite_names() {
  return {"psd", "fourier", "gradient", "kronecker", "reduction"};
}

std::vector<CheckResult> run_check_suite(const std::string& suite) {
  if (suite == "psd") return suite_psd();
  if (suite == "fourier") return suite_fourier();
  if (suite == "gradient") return suite_gradient();
  if (suite == "kronecker") return suite_kronecker();
  if (suite == "reduction") return suite_reduction();
  throw std::invalid_argument("unknown check suite '" + suite + "'");
}

}  // namespace gsmgp
