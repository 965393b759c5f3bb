// Copyright 2026 The pcefold Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "pcefold/error.hpp"

namespace pcefold {

using Objective = std::function<double(std::span<const double>)>;

enum class OptimizerKind { trust_region_linear, nelder_mead };

struct OptimizeOptions {
  int budget = 160;  // objective evaluations
  double rho_begin = 0.5;
  double rho_end = 1e-4;
  std::uint64_t seed = 0;
  OptimizerKind kind = OptimizerKind::trust_region_linear;
};

struct TrajectoryPoint {
  int iter = 0;
  double loss = 0.0;
};

struct OptimizeResult {
  std::vector<double> x_best;
  double f_best = std::numeric_limits<double>::infinity();
  std::vector<TrajectoryPoint> trajectory;  // every evaluation, in order
  int evaluations = 0;
};

namespace detail {

/// Budgeted evaluation with best-so-far tracking.
class Evaluator {
 public:
  Evaluator(const Objective& f, int budget, OptimizeResult& out) : f_(f), budget_(budget), out_(out) {}

  bool exhausted() const { return out_.evaluations >= budget_; }

  double operator()(const std::vector<double>& x) {
    const double v = f_(x);
    out_.trajectory.push_back({out_.evaluations, v});
    ++out_.evaluations;
    if (v < out_.f_best || out_.x_best.empty()) {
      out_.f_best = v;
      out_.x_best = x;
    }
    return v;
  }

 private:
  const Objective& f_;
  int budget_;
  OptimizeResult& out_;
};

/// Solves A x = b (row-major n x n) by Gaussian elimination with partial
/// pivoting. Returns nullopt when A is numerically singular.
inline std::optional<std::vector<double>> solve_linear(std::vector<double> a, std::vector<double> b, std::size_t n) {
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
    if (std::abs(a[piv * n + col]) < 1e-14) return std::nullopt;
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
      std::swap(b[col], b[piv]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / a[col * n + col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i * n + c] * x[c];
    x[i] = s / a[i * n + i];
  }
  return x;
}

inline std::optional<std::vector<double>> invert(const std::vector<double>& a, std::size_t n) {
  std::vector<double> inv(n * n);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> e(n, 0.0);
    e[k] = 1.0;
    auto col = solve_linear(a, e, n);
    if (!col) return std::nullopt;
    for (std::size_t r = 0; r < n; ++r) inv[r * n + k] = (*col)[r];
  }
  return inv;
}

inline double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

/// Unconstrained linear-approximation trust region in the style of
/// COBYLA: a simplex of n+1 interpolation points defines a linear model
/// around the best vertex, steps of length rho follow its descent
/// direction, and rho shrinks when the model stops predicting progress on
/// a well-shaped simplex.
inline void run_trust_region_linear(Evaluator& eval, std::vector<double> x0, const OptimizeOptions& opt) {
  const std::size_t n = x0.size();
  constexpr double kAlpha = 0.25;  // minimum vertex-to-face distance / rho
  constexpr double kBeta = 2.1;    // maximum vertex distance / rho
  double rho = opt.rho_begin;

  std::vector<std::vector<double>> pts{x0};
  std::vector<double> vals{eval(x0)};
  for (std::size_t k = 0; k < n && !eval.exhausted(); ++k) {
    auto x = x0;
    x[k] += rho;
    vals.push_back(eval(x));
    pts.push_back(std::move(x));
  }
  if (pts.size() < n + 1 || n == 0) return;

  while (!eval.exhausted()) {
    const std::size_t best = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
    // D has columns d_k = y_k - y_best for k != best
    std::vector<std::size_t> others;
    for (std::size_t k = 0; k <= n; ++k)
      if (k != best) others.push_back(k);
    std::vector<double> dmat(n * n), rhs(n);
    for (std::size_t c = 0; c < n; ++c) {
      for (std::size_t r = 0; r < n; ++r) dmat[r * n + c] = pts[others[c]][r] - pts[best][r];
    }
    // model gradient g solves D^T g = f_k - f_best
    std::vector<double> dt(n * n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) dt[r * n + c] = dmat[c * n + r];
    for (std::size_t c = 0; c < n; ++c) rhs[c] = vals[others[c]] - vals[best];
    auto inv = invert(dmat, n);  // rows w_k: distance of vertex k to opposite face is 1/|w_k|
    auto grad = solve_linear(dt, rhs, n);

    // geometry diagnostics
    std::size_t worst = 0;
    double worst_measure = 0.0;
    bool acceptable = inv.has_value();
    if (inv) {
      for (std::size_t c = 0; c < n; ++c) {
        double dist = 0.0, wnorm = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          dist += dmat[r * n + c] * dmat[r * n + c];
          wnorm += (*inv)[c * n + r] * (*inv)[c * n + r];
        }
        dist = std::sqrt(dist);
        const double sigma = 1.0 / std::sqrt(wnorm);
        double measure = 0.0;
        if (dist > kBeta * rho) measure = dist / rho;
        else if (sigma < kAlpha * rho) measure = kAlpha * rho / sigma;
        if (measure > worst_measure) {
          worst_measure = measure;
          worst = c;
        }
      }
      acceptable = worst_measure == 0.0;
    }

    auto geometry_step = [&]() {
      // replace the worst vertex by a point rho away from the best vertex,
      // normal to the face opposite it, on the side the model prefers
      std::vector<double> dir(n, 0.0);
      if (inv) {
        for (std::size_t r = 0; r < n; ++r) dir[r] = (*inv)[worst * n + r];
      } else {
        dir[worst % n] = 1.0;
      }
      const double dn = norm2(dir);
      double slope = 0.0;
      if (grad)
        for (std::size_t r = 0; r < n; ++r) slope += (*grad)[r] * dir[r];
      const double sign = slope > 0.0 ? -1.0 : 1.0;
      auto x = pts[best];
      for (std::size_t r = 0; r < n; ++r) x[r] += sign * rho * dir[r] / dn;
      const double v = eval(x);
      pts[others[worst]] = std::move(x);
      vals[others[worst]] = v;
    };

    const double gnorm = grad ? norm2(*grad) : 0.0;
    if (!grad || !inv || !(gnorm > 0.0) || !std::isfinite(gnorm)) {
      if (!acceptable || !inv) {
        geometry_step();
        continue;
      }
      if (rho <= opt.rho_end) break;
      rho = rho > 3.0 * opt.rho_end ? std::max(0.5 * rho, opt.rho_end) : opt.rho_end;
      continue;
    }

    std::vector<double> step(n);
    for (std::size_t r = 0; r < n; ++r) step[r] = -rho * (*grad)[r] / gnorm;
    auto trial = pts[best];
    for (std::size_t r = 0; r < n; ++r) trial[r] += step[r];
    const double ftrial = eval(trial);
    const double predicted = rho * gnorm;
    const double ratio = (vals[best] - ftrial) / predicted;

    // vertex whose replacement by the trial point keeps the simplex fattest
    std::size_t replace = 0;
    double replace_score = -1.0;
    for (std::size_t c = 0; c < n; ++c) {
      double w = 0.0, dist = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        w += (*inv)[c * n + r] * step[r];
        dist += dmat[r * n + c] * dmat[r * n + c];
      }
      const double score = std::abs(w) * std::max(1.0, std::sqrt(dist) / rho);
      if (score > replace_score) {
        replace_score = score;
        replace = c;
      }
    }
    if (ftrial < vals[best]) {
      pts[others[replace]] = trial;
      vals[others[replace]] = ftrial;
    } else if (replace_score > 1.0) {
      pts[others[replace]] = trial;
      vals[others[replace]] = ftrial;
    }

    if (ratio < 0.1) {
      if (!acceptable) {
        if (!eval.exhausted()) geometry_step();
        continue;
      }
      if (rho <= opt.rho_end) break;
      rho = rho > 3.0 * opt.rho_end ? std::max(0.5 * rho, opt.rho_end) : opt.rho_end;
    }
  }
}

inline void run_nelder_mead(Evaluator& eval, const std::vector<double>& x0, const OptimizeOptions& opt) {
  const std::size_t n = x0.size();
  std::mt19937_64 rng(opt.seed);
  std::vector<std::vector<double>> pts{x0};
  std::vector<double> vals{eval(x0)};
  for (std::size_t k = 0; k < n && !eval.exhausted(); ++k) {
    auto x = x0;
    x[k] += (rng() & 1u) ? opt.rho_begin : -opt.rho_begin;
    vals.push_back(eval(x));
    pts.push_back(std::move(x));
  }
  if (pts.size() < n + 1 || n == 0) return;

  std::vector<std::size_t> order(n + 1);
  while (!eval.exhausted()) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t lo = order.front(), hi = order.back(), second = order[n - 1];
    double spread = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
      double d = 0.0;
      for (std::size_t r = 0; r < n; ++r) d = std::max(d, std::abs(pts[k][r] - pts[lo][r]));
      spread = std::max(spread, d);
    }
    if (spread < opt.rho_end) break;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t k = 0; k <= n; ++k) {
      if (k == hi) continue;
      for (std::size_t r = 0; r < n; ++r) centroid[r] += pts[k][r] / static_cast<double>(n);
    }
    auto along = [&](double t) {
      std::vector<double> x(n);
      for (std::size_t r = 0; r < n; ++r) x[r] = centroid[r] + t * (pts[hi][r] - centroid[r]);
      return x;
    };
    auto xr = along(-1.0);
    const double fr = eval(xr);
    if (fr < vals[lo]) {
      if (eval.exhausted()) break;
      auto xe = along(-2.0);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[hi] = std::move(xe);
        vals[hi] = fe;
      } else {
        pts[hi] = std::move(xr);
        vals[hi] = fr;
      }
    } else if (fr < vals[second]) {
      pts[hi] = std::move(xr);
      vals[hi] = fr;
    } else {
      if (eval.exhausted()) break;
      const bool outside = fr < vals[hi];
      auto xc = along(outside ? -0.5 : 0.5);
      const double fc = eval(xc);
      if (fc < std::min(fr, vals[hi])) {
        pts[hi] = std::move(xc);
        vals[hi] = fc;
      } else {
        for (std::size_t k = 0; k <= n && !eval.exhausted(); ++k) {
          if (k == lo) continue;
          for (std::size_t r = 0; r < n; ++r) pts[k][r] = pts[lo][r] + 0.5 * (pts[k][r] - pts[lo][r]);
          vals[k] = eval(pts[k]);
        }
      }
    }
  }
}

}  // namespace detail

/// Derivative-free local minimisation within `budget` evaluations.
/// Deterministic for fixed (x0, options); never returns a point worse
/// than x0.
inline OptimizeResult minimize(const Objective& f, std::vector<double> x0, const OptimizeOptions& opt = {}) {
  if (opt.budget < 1) throw Error(Errc::InvalidArgument, "budget must be >= 1");
  OptimizeResult out;
  detail::Evaluator eval(f, opt.budget, out);
  if (opt.kind == OptimizerKind::nelder_mead) {
    detail::run_nelder_mead(eval, x0, opt);
  } else {
    detail::run_trust_region_linear(eval, std::move(x0), opt);
  }
  return out;
}

}  // namespace pcefold
