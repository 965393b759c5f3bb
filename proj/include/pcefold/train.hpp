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
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "pcefold/ansatz.hpp"
#include "pcefold/encoding.hpp"
#include "pcefold/error.hpp"
#include "pcefold/optimize.hpp"
#include "pcefold/rna_qubo.hpp"
#include "pcefold/statevector.hpp"

namespace pcefold {

/// 1 / (1 + exp(-z)), stable for large |z|.
inline double logistic(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// Soft binary value: near 1 for negative expectation values.
inline double soft_bit(double ev, double alpha) { return logistic(-alpha * ev); }

/// x^T Q x for real x (diagonal counted as Q_aa x_a^2).
inline double quadratic_form(const QuboInstance& inst, std::span<const double> x) {
  const std::size_t m = inst.m();
  double s = 0.0;
  for (std::size_t a = 0; a < m; ++a) {
    if (x[a] == 0.0) continue;
    const auto row = inst.row(a);
    double acc = row[a] * x[a];
    for (std::size_t b = a + 1; b < m; ++b) acc += 2.0 * row[b] * x[b];
    s += x[a] * acc;
  }
  return s;
}

inline double qubo_sigmoid_loss(std::span<const double> evs, const QuboInstance& inst, double alpha) {
  if (evs.size() != inst.m()) throw Error(Errc::LengthMismatch, "EV vector length differs from m");
  if (!(alpha > 0.0)) throw Error(Errc::InvalidArgument, "alpha must be > 0");
  std::vector<double> x(evs.size());
  for (std::size_t a = 0; a < evs.size(); ++a) x[a] = soft_bit(evs[a], alpha);
  return quadratic_form(inst, x);
}

/// Ising form of Q / max|Q| under x = (1 - s) / 2:
/// E(x) = sum_{i<j} J_ij s_i s_j + sum_i h_i s_i + constant.
struct IsingModel {
  std::size_t m = 0;
  std::vector<double> j;  // m x m, upper triangle used
  std::vector<double> h;
  double constant = 0.0;
  double scale = 1.0;  // max |Q|
};

inline IsingModel ising_decompose(const QuboInstance& inst) {
  const std::size_t m = inst.m();
  IsingModel is;
  is.m = m;
  is.j.assign(m * m, 0.0);
  is.h.assign(m, 0.0);
  double mx = 0.0;
  for (double v : inst.matrix()) mx = std::max(mx, std::abs(v));
  is.scale = mx > 0.0 ? mx : 1.0;
  for (std::size_t a = 0; a < m; ++a) {
    const double d = inst.q(a, a) / is.scale;
    is.h[a] -= 0.5 * d;
    is.constant += 0.5 * d;
    for (std::size_t b = a + 1; b < m; ++b) {
      // pair weight P = 2 Q_ab: P x_a x_b = P/4 (1 - s_a - s_b + s_a s_b)
      const double quarter = 0.5 * inst.q(a, b) / is.scale;
      if (quarter == 0.0) continue;
      is.j[a * m + b] += quarter;
      is.h[a] -= quarter;
      is.h[b] -= quarter;
      is.constant += quarter;
    }
  }
  return is;
}

inline double ising_energy(const IsingModel& is, std::span<const double> z) {
  double e = 0.0;
  for (std::size_t a = 0; a < is.m; ++a) {
    e += is.h[a] * z[a];
    for (std::size_t b = a + 1; b < is.m; ++b) e += is.j[a * is.m + b] * z[a] * z[b];
  }
  return e;
}

/// Ising energy (without the constant) at z_i = tanh(alpha e_i).
inline double ising_tanh_loss(std::span<const double> evs, const IsingModel& is, double alpha) {
  if (evs.size() != is.m) throw Error(Errc::LengthMismatch, "EV vector length differs from m");
  if (!(alpha > 0.0)) throw Error(Errc::InvalidArgument, "alpha must be > 0");
  std::vector<double> z(evs.size());
  for (std::size_t a = 0; a < evs.size(); ++a) z[a] = std::tanh(alpha * evs[a]);
  return ising_energy(is, z);
}

inline double ising_tanh_loss(std::span<const double> evs, const QuboInstance& inst, double alpha) {
  return ising_tanh_loss(evs, ising_decompose(inst), alpha);
}

enum class LossKind { qubo_sigmoid, ising_tanh };

struct TrainConfig {
  double alpha = 8.0;
  int max_iters = 160;  // 0 evaluates the random initialisation only
  std::uint64_t seed = 0;
  double init_low = -std::numbers::pi;
  double init_high = std::numbers::pi;
  OptimizerKind optimizer = OptimizerKind::trust_region_linear;
  LossKind loss = LossKind::qubo_sigmoid;
  double rho_begin = 0.5;
  double rho_end = 1e-4;
  bool sampled = false;  // shot-sampled EVs instead of exact ones
  int shots = 1 << 14;
};

struct TrainedResult {
  std::vector<double> initial_params;
  std::vector<double> best_params;
  double initial_loss = 0.0;
  double best_loss = 0.0;
  std::vector<TrajectoryPoint> loss_trajectory;
  EvVector final_evs;
  int iters_used = 0;
};

inline std::vector<double> random_parameters(std::size_t count, const TrainConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> dist(cfg.init_low, cfg.init_high);
  std::vector<double> p(count);
  for (auto& v : p) v = dist(rng);
  return p;
}

inline EvVector circuit_evs(const CircuitSpec& spec, const EncodingMap& enc, std::span<const double> params,
                            const TrainConfig& cfg, std::uint64_t sample_seed) {
  const StateVector psi = simulate(spec, params);
  return cfg.sampled ? sample_expectations(psi, enc, cfg.shots, sample_seed) : expectations(psi, enc);
}

inline TrainedResult train(const CircuitSpec& spec, const EncodingMap& enc, const QuboInstance& inst,
                           const TrainConfig& cfg) {
  if (enc.slots.size() != inst.m()) throw Error(Errc::EncodingMismatch, "encoding does not cover the instance");
  if (enc.n != spec.n) throw Error(Errc::QubitMismatch, "encoding and circuit registers differ");
  if (!(cfg.alpha > 0.0)) throw Error(Errc::InvalidArgument, "alpha must be > 0");
  if (cfg.max_iters < 0) throw Error(Errc::InvalidArgument, "max_iters must be >= 0");

  const IsingModel ising = cfg.loss == LossKind::ising_tanh ? ising_decompose(inst) : IsingModel{};
  std::uint64_t sample_counter = cfg.seed * 0x9E3779B97F4A7C15ull;
  auto loss_of = [&](const EvVector& ev) {
    return cfg.loss == LossKind::qubo_sigmoid ? qubo_sigmoid_loss(ev.values, inst, cfg.alpha)
                                              : ising_tanh_loss(ev.values, ising, cfg.alpha);
  };

  TrainedResult res;
  res.initial_params = random_parameters(spec.param_count(), cfg);
  if (cfg.max_iters == 0) {
    res.best_params = res.initial_params;
    res.final_evs = circuit_evs(spec, enc, res.best_params, cfg, sample_counter);
    res.initial_loss = res.best_loss = loss_of(res.final_evs);
    res.loss_trajectory = {{0, res.best_loss}};
    return res;
  }

  const Objective objective = [&](std::span<const double> theta) {
    return loss_of(circuit_evs(spec, enc, theta, cfg, sample_counter++));
  };
  OptimizeOptions opt;
  opt.budget = cfg.max_iters;
  opt.rho_begin = cfg.rho_begin;
  opt.rho_end = cfg.rho_end;
  opt.seed = cfg.seed;
  opt.kind = cfg.optimizer;
  auto out = minimize(objective, res.initial_params, opt);

  res.best_params = out.x_best;
  res.best_loss = out.f_best;
  res.initial_loss = out.trajectory.front().loss;
  res.loss_trajectory = std::move(out.trajectory);
  res.iters_used = out.evaluations;
  // exact re-evaluation is reproducible; sampled EVs are re-drawn
  res.final_evs = circuit_evs(spec, enc, res.best_params, cfg, sample_counter);
  return res;
}

}  // namespace pcefold
