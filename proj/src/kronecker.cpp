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

#include "gsmgp/kronecker.hpp"

#include <cmath>

namespace gsmgp {

namespace {
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
}

Eigen::Index KronEig::total_size() const {
  Eigen::Index n = 1;
  for (auto d : dims) n *= d;
  return n;
}

Vec KronEig::lambda() const {
  Vec lam = v[0];
  for (size_t p = 1; p < v.size(); ++p) {
    Vec out(lam.size() * v[p].size());
    for (Eigen::Index i = 0; i < lam.size(); ++i)
      out.segment(i * v[p].size(), v[p].size()) = lam[i] * v[p];
    lam = std::move(out);
  }
  return lam;
}

KronEig kron_eig(const std::vector<Mat>& factors) {
  if (factors.empty()) throw std::invalid_argument("kron eig: empty factor list");
  KronEig eig;
  for (const Mat& k : factors) {
    Eigen::SelfAdjointEigenSolver<Mat> solver(k);
    if (solver.info() != Eigen::Success) throw std::runtime_error("kron eig: eigensolver failed");
    Vec vals = solver.eigenvalues();
    const double vmax = vals.cwiseAbs().maxCoeff();
    const double tol = kPsdTol * std::max(vmax, 1.0);
    for (Eigen::Index i = 0; i < vals.size(); ++i)
      if (vals[i] < 0.0 && vals[i] >= -tol) vals[i] = 0.0;
    eig.u.push_back(solver.eigenvectors());
    eig.v.push_back(std::move(vals));
    eig.dims.push_back(k.rows());
  }
  return eig;
}

Vec mode_apply(const Vec& vec, const std::vector<Eigen::Index>& dims, int p, const Mat& m) {
  Eigen::Index pre = 1, post = 1;
  for (int q = 0; q < p; ++q) pre *= dims[q];
  for (size_t q = p + 1; q < dims.size(); ++q) post *= dims[q];
  const Eigen::Index np = dims[p];
  if (vec.size() != pre * np * post) throw std::invalid_argument("mode apply: length mismatch");
  if (m.cols() != np) throw std::invalid_argument("mode apply: matrix width mismatch");

  Vec out(pre * m.rows() * post);
  for (Eigen::Index a = 0; a < pre; ++a) {
    Eigen::Map<const RowMat> block(vec.data() + a * np * post, np, post);
    Eigen::Map<RowMat> dst(out.data() + a * m.rows() * post, m.rows(), post);
    dst = m * block;
  }
  return out;
}

Vec kron_mvm(const std::vector<Mat>& factors, const Vec& vec) {
  std::vector<Eigen::Index> dims;
  Eigen::Index total = 1;
  for (const Mat& f : factors) {
    dims.push_back(f.rows());
    total *= f.rows();
  }
  if (vec.size() != total) throw std::invalid_argument("kron mvm: length mismatch");
  Vec out = vec;
  for (int p = 0; p < static_cast<int>(factors.size()); ++p) {
    out = mode_apply(out, dims, p, factors[p]);
    dims[p] = factors[p].rows();
  }
  return out;
}

namespace {

// Shift y into the eigenbasis: (x) U_p' y.
Vec to_eigenbasis(const KronEig& eig, const Vec& y) {
  Vec out = y;
  for (int p = 0; p < static_cast<int>(eig.u.size()); ++p)
    out = mode_apply(out, eig.dims, p, eig.u[p].transpose());
  return out;
}

Vec from_eigenbasis(const KronEig& eig, const Vec& y) {
  Vec out = y;
  for (int p = 0; p < static_cast<int>(eig.u.size()); ++p)
    out = mode_apply(out, eig.dims, p, eig.u[p]);
  return out;
}

Vec shifted_inverse(const KronEig& eig, double noise_var) {
  Vec lam = eig.lambda();
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    const double s = lam[i] + noise_var;
    if (!(s > 0.0)) throw std::runtime_error("kron solve: non-positive shifted eigenvalue");
    lam[i] = 1.0 / s;
  }
  return lam;
}

}  // namespace

Vec kron_solve(const KronEig& eig, double noise_var, const Vec& y) {
  if (y.size() != eig.total_size()) throw std::invalid_argument("kron solve: length mismatch");
  const Vec t = shifted_inverse(eig, noise_var);
  Vec z = to_eigenbasis(eig, y);
  z.array() *= t.array();
  return from_eigenbasis(eig, z);
}

double kron_nll(const KronEig& eig, double noise_var, const Vec& y, double prior_terms) {
  const Vec t = shifted_inverse(eig, noise_var);
  Vec z = to_eigenbasis(eig, y);
  const double quad = (z.array().square() * t.array()).sum();
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < t.size(); ++i) logdet -= std::log(t[i]);
  const double m = static_cast<double>(y.size());
  return -0.5 * quad - 0.5 * logdet - 0.5 * m * std::log(2.0 * M_PI) + prior_terms;
}

LikContext kron_context(const std::vector<Mat>& factors, double noise_var, const Vec& y,
                        bool need_grad) {
  KronEig eig = kron_eig(factors);
  if (y.size() != eig.total_size()) throw std::invalid_argument("kron context: length mismatch");
  const Vec t = shifted_inverse(eig, noise_var);
  Vec z = to_eigenbasis(eig, y);

  LikContext ctx;
  ctx.quad = (z.array().square() * t.array()).sum();
  ctx.logdet = 0.0;
  for (Eigen::Index i = 0; i < t.size(); ++i) ctx.logdet -= std::log(t[i]);
  ctx.trinv = t.sum();
  Vec zt = z;
  zt.array() *= t.array();
  ctx.alpha = from_eigenbasis(eig, zt);
  if (!need_grad) return ctx;

  const int np = static_cast<int>(factors.size());
  for (int p = 0; p < np; ++p) {
    // gamma_p = alpha with every factor except p applied.
    Vec gamma = ctx.alpha;
    for (int q = 0; q < np; ++q)
      if (q != p) gamma = mode_apply(gamma, eig.dims, q, factors[q]);

    // s_p[a,b] = sum over rest of alpha fibers times gamma fibers.
    Eigen::Index pre = 1, post = 1;
    for (int q = 0; q < p; ++q) pre *= eig.dims[q];
    for (int q = p + 1; q < np; ++q) post *= eig.dims[q];
    const Eigen::Index n = eig.dims[p];
    Mat s = Mat::Zero(n, n);
    for (Eigen::Index a = 0; a < pre; ++a) {
      Eigen::Map<const RowMat> ab(ctx.alpha.data() + a * n * post, n, post);
      Eigen::Map<const RowMat> gb(gamma.data() + a * n * post, n, post);
      s.noalias() += ab * gb.transpose();
    }
    ctx.s.push_back(std::move(s));

    // u_p[k] = contraction of the t tensor with the eigenvalues of every other
    // factor; then tr(A^-1 (K_1 (x) .. D .. (x) K_P)) = <U diag(u) U', D>.
    Vec u = t;
    std::vector<Eigen::Index> tdims = eig.dims;
    for (int q = 0; q < np; ++q) {
      if (q == p) continue;
      u = mode_apply(u, tdims, q, eig.v[q].transpose());
      tdims[q] = 1;
    }
    // u now has shape (1,..,n,..,1) = n.
    ctx.t.push_back(eig.u[p] * u.asDiagonal() * eig.u[p].transpose());
  }
  return ctx;
}

Vec kron_gradient(const KronEig& eig, const std::vector<Mat>& factors,
                  const std::vector<std::pair<int, Mat>>& factor_grads, double noise_var,
                  const Vec& y) {
  LikContext ctx = kron_context(factors, noise_var, y, true);
  Vec grad(factor_grads.size() + 1);
  for (size_t i = 0; i < factor_grads.size(); ++i) {
    const auto& [p, d] = factor_grads[i];
    grad[i] = 0.5 * ((ctx.s[p].array() * d.array()).sum() - (ctx.t[p].array() * d.array()).sum());
  }
  grad[factor_grads.size()] = noise_var * (ctx.alpha.squaredNorm() - ctx.trinv);
  return grad;
}

}  // namespace gsmgp
