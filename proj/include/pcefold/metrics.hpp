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
#include <span>
#include <utility>
#include <vector>

#include "pcefold/error.hpp"

namespace pcefold {

/// 100 (E - E_opt) / |E_opt|.
inline double gap_percent(double energy, double opt) {
  if (opt == 0.0) throw Error(Errc::ZeroOptimum, "optimum energy is zero");
  const double gap = 100.0 * (energy - opt) / std::abs(opt);
  // tolerate round-off in energies recomputed along different paths
  if (gap < -1e-9) throw Error(Errc::BelowOptimum, "energy lies below the optimum");
  return std::max(gap, 0.0);
}

inline constexpr double kZ95 = 1.959964;

/// Wilson score interval for a binomial proportion.
inline std::pair<double, double> wilson_ci(long long successes, long long trials, double z = kZ95) {
  if (trials < 1 || successes < 0 || successes > trials) {
    throw Error(Errc::InvalidCounts, "need 0 <= successes <= trials and trials >= 1");
  }
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

/// Quantile by linear interpolation between closest ranks: position
/// (n - 1) q in the sorted sample.
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw Error(Errc::EmptyInput, "quantile of an empty sample");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

struct Metrics {
  double p_below = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
  double median_gap = 0.0;
  double iqr_lo = 0.0;
  double iqr_hi = 0.0;
  double mean_gap = 0.0;
  int n_seeds = 0;
};

/// Near-optimal recovery counts gaps strictly below `threshold` percent.
inline Metrics summarize(std::span<const double> gaps, double threshold = 1.0) {
  if (gaps.empty()) throw Error(Errc::EmptyInput, "no gaps to summarize");
  Metrics m;
  m.n_seeds = static_cast<int>(gaps.size());
  long long hits = 0;
  double sum = 0.0;
  for (double g : gaps) {
    if (g < threshold) ++hits;
    sum += g;
  }
  m.p_below = static_cast<double>(hits) / static_cast<double>(gaps.size());
  std::tie(m.wilson_lo, m.wilson_hi) = wilson_ci(hits, static_cast<long long>(gaps.size()));
  const std::vector<double> v(gaps.begin(), gaps.end());
  m.median_gap = quantile(v, 0.5);
  m.iqr_lo = quantile(v, 0.25);
  m.iqr_hi = quantile(v, 0.75);
  m.mean_gap = sum / static_cast<double>(gaps.size());
  return m;
}

}  // namespace pcefold
