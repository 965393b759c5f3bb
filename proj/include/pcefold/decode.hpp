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
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "pcefold/error.hpp"
#include "pcefold/rna_qubo.hpp"
#include "pcefold/statevector.hpp"
#include "pcefold/train.hpp"

namespace pcefold {

struct DecodeParams {
  double alpha = 8.0;
  double beta = 1.0;
  double sigma_noise = 0.2;
  int k = 1;
  int t_ls = 3;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(alpha > 0.0)) throw Error(Errc::InvalidArgument, "alpha must be > 0");
    if (beta < 0.0) throw Error(Errc::InvalidArgument, "beta must be >= 0");
    if (sigma_noise < 0.0) throw Error(Errc::InvalidArgument, "sigma_noise must be >= 0");
    if (k < 1) throw Error(Errc::InvalidArgument, "K must be >= 1");
    if (t_ls < 0) throw Error(Errc::InvalidArgument, "T_ls must be >= 0");
  }
};

struct DecodeResult {
  Bits bits;
  double energy = 0.0;
  bool feasible = true;
  int restarts_used = 0;
  std::vector<int> commits;
  /// pagd_k only: energy of each restart in restart order.
  std::vector<double> restart_energies;
};

inline Bits sign_round(std::span<const double> evs) {
  Bits x(evs.size());
  for (std::size_t i = 0; i < evs.size(); ++i) x[i] = evs[i] < 0.0 ? 1 : 0;
  return x;
}

namespace detail {

/// field[i] = sum_{j != i, x_j = 1} Q_ij
inline std::vector<double> coupling_field(const QuboInstance& inst, const Bits& x) {
  const std::size_t m = inst.m();
  std::vector<double> field(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    if (!x[j]) continue;
    const auto row = inst.row(j);
    for (std::size_t i = 0; i < m; ++i)
      if (i != j) field[i] += row[i];
  }
  return field;
}

inline void set_bit(const QuboInstance& inst, Bits& x, std::vector<double>& field, std::size_t i, bool on) {
  x[i] = on ? 1 : 0;
  const auto row = inst.row(i);
  const double sgn = on ? 1.0 : -1.0;
  for (std::size_t k = 0; k < inst.m(); ++k)
    if (k != i) field[k] += sgn * row[k];
}

inline bool has_set_conflict_neighbor(const QuboInstance& inst, const Bits& x, std::size_t i) {
  for (int j : inst.conflict_neighbors(i))
    if (x[j]) return true;
  return false;
}

}  // namespace detail

/// Sign rounding, greedy repair of violated conflicts (largest energy
/// contribution cleared first), then up to `t_ls` passes of first-improvement
/// single-bit flips that keep the string feasible.
inline DecodeResult sign_ls(std::span<const double> evs, const QuboInstance& inst, int t_ls) {
  if (evs.size() != inst.m()) throw Error(Errc::LengthMismatch, "EV vector length differs from m");
  if (t_ls < 0) throw Error(Errc::InvalidArgument, "T must be >= 0");
  const std::size_t m = inst.m();
  Bits x = sign_round(evs);
  auto field = detail::coupling_field(inst, x);

  while (true) {
    int victim = -1;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      if (!x[i] || !detail::has_set_conflict_neighbor(inst, x, i)) continue;
      const double contribution = inst.q(i, i) + 2.0 * field[i];
      if (contribution > worst) {
        worst = contribution;
        victim = static_cast<int>(i);
      }
    }
    if (victim < 0) break;
    detail::set_bit(inst, x, field, victim, false);
  }

  for (int pass = 0; pass < t_ls; ++pass) {
    bool flipped = false;
    for (std::size_t i = 0; i < m; ++i) {
      const double marginal = inst.q(i, i) + 2.0 * field[i];
      if (x[i]) {
        if (-marginal < 0.0) {
          detail::set_bit(inst, x, field, i, false);
          flipped = true;
        }
      } else if (marginal < 0.0 && !detail::has_set_conflict_neighbor(inst, x, i)) {
        detail::set_bit(inst, x, field, i, true);
        flipped = true;
      }
    }
    if (!flipped) break;
  }

  DecodeResult r;
  r.energy = qubo_energy(inst, x);
  r.feasible = is_feasible(inst, x);
  r.bits = std::move(x);
  return r;
}

/// Greedy commit-and-prune: repeatedly commit the active variable with the
/// largest (-Delta_i) * soft_bit_i^beta among those with Delta_i < 0, then
/// drop it and its conflict neighbours from the active set. Ties go to the
/// lowest index.
inline DecodeResult pagd(std::span<const double> evs, const QuboInstance& inst, double alpha, double beta) {
  if (evs.size() != inst.m()) throw Error(Errc::LengthMismatch, "EV vector length differs from m");
  if (!(alpha > 0.0)) throw Error(Errc::InvalidArgument, "alpha must be > 0");
  if (beta < 0.0) throw Error(Errc::InvalidArgument, "beta must be >= 0");
  const std::size_t m = inst.m();
  std::vector<double> prior(m);
  for (std::size_t i = 0; i < m; ++i) prior[i] = beta == 0.0 ? 1.0 : std::pow(soft_bit(evs[i], alpha), beta);

  std::vector<double> delta(m);
  for (std::size_t i = 0; i < m; ++i) delta[i] = inst.q(i, i);
  std::vector<std::uint8_t> active(m, 1);
  DecodeResult r;
  r.bits.assign(m, 0);
  while (true) {
    int pick = -1;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      if (!active[i] || !(delta[i] < 0.0)) continue;
      const double score = -delta[i] * prior[i];
      if (score > best) {
        best = score;
        pick = static_cast<int>(i);
      }
    }
    if (pick < 0) break;
    r.bits[pick] = 1;
    r.commits.push_back(pick);
    active[pick] = 0;
    for (int j : inst.conflict_neighbors(pick)) active[j] = 0;
    const auto row = inst.row(pick);
    for (std::size_t i = 0; i < m; ++i)
      if (active[i]) delta[i] += 2.0 * row[i];
  }
  r.energy = qubo_energy(inst, r.bits);
  r.feasible = true;
  r.restarts_used = 1;
  return r;
}

/// Seed of restart k's perturbation stream (splitmix64 of seed ^ k).
inline std::uint64_t restart_seed(std::uint64_t seed, std::uint64_t k) {
  std::uint64_t z = (seed ^ k) + 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Best of K PAGD runs. Restart 0 uses the unperturbed EVs; restart k >= 1
/// adds i.i.d. N(0, sigma^2) noise from its own stream, so the first K
/// restarts are identical for any larger K. Ties keep the earlier restart.
///
/// Returns the best-so-far result after each budget in `budgets` (any order),
/// all taken from one restart sequence of length max(budgets).
inline std::vector<DecodeResult> pagd_k_prefix(std::span<const double> evs, const QuboInstance& inst,
                                               const DecodeParams& params, std::span<const int> budgets) {
  params.validate();
  if (evs.size() != inst.m()) throw Error(Errc::LengthMismatch, "EV vector length differs from m");
  if (budgets.empty()) throw Error(Errc::InvalidArgument, "no restart budgets given");
  int k_max = 0;
  for (int b : budgets) {
    if (b < 1) throw Error(Errc::InvalidArgument, "K must be >= 1");
    k_max = std::max(k_max, b);
  }
  std::vector<DecodeResult> snapshots(budgets.size());
  DecodeResult best;
  std::vector<double> energies;
  energies.reserve(k_max);
  std::vector<double> perturbed(evs.begin(), evs.end());
  for (int k = 0; k < k_max; ++k) {
    if (k > 0) {
      std::mt19937_64 rng(restart_seed(params.seed, static_cast<std::uint64_t>(k)));
      std::normal_distribution<double> noise(0.0, params.sigma_noise);
      for (std::size_t i = 0; i < evs.size(); ++i)
        perturbed[i] = evs[i] + (params.sigma_noise > 0.0 ? noise(rng) : 0.0);
    }
    auto r = pagd(perturbed, inst, params.alpha, params.beta);
    energies.push_back(r.energy);
    if (k == 0 || r.energy < best.energy) best = std::move(r);
    for (std::size_t b = 0; b < budgets.size(); ++b) {
      if (budgets[b] != k + 1) continue;
      snapshots[b] = best;
      snapshots[b].restarts_used = k + 1;
      snapshots[b].restart_energies = energies;
    }
  }
  return snapshots;
}

inline DecodeResult pagd_k(std::span<const double> evs, const QuboInstance& inst, const DecodeParams& params) {
  const int budget[] = {params.k};
  return std::move(pagd_k_prefix(evs, inst, params, budget).front());
}

inline EvVector random_evs(std::size_t m, std::uint64_t seed) {
  if (m < 1) throw Error(Errc::InvalidArgument, "m must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  EvVector ev;
  ev.values.resize(m);
  for (auto& v : ev.values) v = dist(rng);
  return ev;
}

}  // namespace pcefold
