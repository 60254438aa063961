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

#include <cmath>
#include <deque>
#include <functional>
#include <string>
#include <utility>

#include "gsmgp/types.hpp"

namespace gsmgp {

struct LbfgsOptions {
  int max_iterations = 500;
  int history = 10;
  double gradient_tolerance = 1e-5;      // infinity norm of the gradient
  double objective_tolerance = 1e-9;     // relative change between iterations
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  int max_line_search_steps = 40;
  // Called after each accepted step with (iteration, value, gradient inf-norm).
  std::function<void(int, double, double)> on_iteration;
};

struct LbfgsResult {
  Vec x;
  double value = 0.0;
  int iterations = 0;
  std::string reason;  // "gradient", "objective", "iterations", "line_search"
};

// Minimizes f using limited-memory BFGS with a strong-Wolfe line search.
// f(x, grad) must fill grad and return the objective value.
inline LbfgsResult lbfgs_minimize(const std::function<double(const Vec&, Vec&)>& f, Vec x0,
                                  const LbfgsOptions& opts = {}) {
  const Eigen::Index n = x0.size();
  Vec x = std::move(x0), g(n), gnew(n);
  double fx = f(x, g);

  std::deque<Vec> s_hist, y_hist;
  std::deque<double> rho_hist;

  LbfgsResult res;
  auto finish = [&](std::string reason) {
    res.x = x;
    res.value = fx;
    res.reason = std::move(reason);
    return res;
  };

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    res.iterations = iter;
    if (g.lpNorm<Eigen::Infinity>() <= opts.gradient_tolerance) return finish("gradient");

    // Two-loop recursion for the search direction.
    Vec q = g;
    std::vector<double> alpha_coeffs(s_hist.size());
    for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
      alpha_coeffs[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alpha_coeffs[i] * y_hist[i];
    }
    if (!s_hist.empty()) {
      const double gamma = s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
      q *= gamma;
    }
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(q);
      q += (alpha_coeffs[i] - beta) * s_hist[i];
    }
    Vec d = -q;
    double dg = d.dot(g);
    if (!(dg < 0.0)) {  // not a descent direction: restart from steepest descent
      d = -g;
      dg = -g.squaredNorm();
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }

    // Strong-Wolfe line search (bracket + zoom).
    const double f0 = fx, g0 = dg;
    double step = 1.0, prev_step = 0.0, prev_f = f0, prev_g = g0;
    double fnew = f0;
    bool found = false;
    Vec xtrial;

    auto eval = [&](double a) {
      xtrial = x + a * d;
      fnew = f(xtrial, gnew);
      return gnew.dot(d);
    };

    auto zoom = [&](double lo, double hi, double flo, double glo) {
      for (int z = 0; z < opts.max_line_search_steps; ++z) {
        const double a = 0.5 * (lo + hi);
        const double ga = eval(a);
        if (!std::isfinite(fnew) || fnew > f0 + opts.wolfe_c1 * a * g0 || fnew >= flo) {
          hi = a;
        } else {
          if (std::abs(ga) <= -opts.wolfe_c2 * g0) {
            found = true;
            step = a;
            return;
          }
          if (ga * (hi - lo) >= 0.0) hi = lo;
          lo = a;
          flo = fnew;
          glo = ga;
        }
        if (std::abs(hi - lo) < 1e-16 * std::max(1.0, std::abs(lo))) break;
      }
      // Accept the best point seen in the zoom interval if it at least decreases.
      const double a = 0.5 * (lo + hi);
      eval(a);
      if (std::isfinite(fnew) && fnew < f0) {
        found = true;
        step = a;
      }
      (void)glo;
    };

    for (int ls = 0; ls < opts.max_line_search_steps && !found; ++ls) {
      const double ga = eval(step);
      if (!std::isfinite(fnew) || fnew > f0 + opts.wolfe_c1 * step * g0 ||
          (ls > 0 && fnew >= prev_f)) {
        zoom(prev_step, step, prev_f, prev_g);
        break;
      }
      if (std::abs(ga) <= -opts.wolfe_c2 * g0) {
        found = true;
        break;
      }
      if (ga >= 0.0) {
        zoom(step, prev_step, fnew, ga);
        break;
      }
      prev_step = step;
      prev_f = fnew;
      prev_g = ga;
      step *= 2.0;
    }
    if (!found) return finish("line_search");

    const Vec snew = xtrial - x;
    const Vec ynew = gnew - g;
    x = xtrial;
    g = gnew;
    const double prev_fx = fx;
    fx = fnew;
    res.iterations = iter + 1;
    if (opts.on_iteration) opts.on_iteration(iter + 1, fx, g.lpNorm<Eigen::Infinity>());

    const double sy = snew.dot(ynew);
    if (sy > 1e-12 * snew.norm() * ynew.norm()) {
      s_hist.push_back(snew);
      y_hist.push_back(ynew);
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > opts.history) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }

    const double denom = std::max({std::abs(prev_fx), std::abs(fx), 1.0});
    if (std::abs(prev_fx - fx) <= opts.objective_tolerance * denom) return finish("objective");
  }
  return finish("iterations");
}

}  // namespace gsmgp

