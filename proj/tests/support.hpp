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

// Independent reference implementations used only by the tests.

#include <bit>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pcefold/pcefold.hpp"

namespace testing_support {

using namespace pcefold;

/// Random instance with negative diagonal energies, a conflict graph of the
/// given density, stacking rewards on a fraction of the remaining pairs and
/// the default penalty.
inline QuboInstance random_instance(std::size_t m, double conflict_density, std::uint64_t seed,
                                    double stacking_fraction = 0.3) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> energy(-3.5, -0.5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> e(m);
  for (auto& v : e) v = energy(rng);
  RelationSets rel;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b) {
      if (unit(rng) < conflict_density) {
        rel.conflicts.emplace_back(a, b);
      } else if (unit(rng) < stacking_fraction) {
        rel.stackings.emplace_back(a, b);
      }
    }
  double mean_abs = 0.0;
  for (double v : e) mean_abs += std::abs(v);
  mean_abs /= static_cast<double>(std::max<std::size_t>(m, 1));
  QuboCoeffs c;
  c.r = -0.5 * mean_abs;
  c.t = default_penalty(e, c.r, rel.stackings.size());
  std::vector<double> q(m * m, 0.0);
  for (std::size_t a = 0; a < m; ++a) q[a * m + a] = e[a];
  for (auto [a, b] : rel.stackings) q[a * m + b] = q[b * m + a] = c.r / 2;
  for (auto [a, b] : rel.conflicts) q[a * m + b] = q[b * m + a] = c.t / 2;
  return QuboInstance(m, std::move(q), rel, c);
}

/// Direct double sum x^T Q x over all (a, b).
inline double energy_by_definition(const QuboInstance& inst, const Bits& x) {
  double e = 0.0;
  for (std::size_t a = 0; a < inst.m(); ++a)
    for (std::size_t b = 0; b < inst.m(); ++b) e += inst.q(a, b) * x[a] * x[b];
  return e;
}

inline Bits bits_of(std::uint64_t mask, std::size_t m) {
  Bits x(m);
  for (std::size_t i = 0; i < m; ++i) x[i] = (mask >> i) & 1u;
  return x;
}

/// Independent-set test straight from the conflict list.
inline bool independent(const QuboInstance& inst, const Bits& x) {
  for (std::size_t a = 0; a < inst.m(); ++a)
    for (std::size_t b = a + 1; b < inst.m(); ++b)
      if (x[a] && x[b] && inst.conflicts(a, b)) return false;
  return true;
}

struct Exhaustive {
  double best_feasible = std::numeric_limits<double>::infinity();
  double best_infeasible = std::numeric_limits<double>::infinity();
  Bits argmin;
};

inline Exhaustive enumerate_all(const QuboInstance& inst) {
  Exhaustive out;
  const std::size_t m = inst.m();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    const Bits x = bits_of(mask, m);
    const double e = energy_by_definition(inst, x);
    if (independent(inst, x)) {
      if (e < out.best_feasible) {
        out.best_feasible = e;
        out.argmin = x;
      }
    } else {
      out.best_infeasible = std::min(out.best_infeasible, e);
    }
  }
  return out;
}

/// Feasible minimum by a Gray-code walk with incremental energy and
/// conflict counts. Suited to m up to about 24.
inline Exhaustive gray_feasible_optimum(const QuboInstance& inst) {
  Exhaustive out;
  const std::size_t m = inst.m();
  Bits x(m, 0);
  std::vector<double> field(m, 0.0);  // 2 * sum_j Q_ij x_j
  std::vector<int> clash(m, 0);       // set conflict neighbours
  double energy = 0.0;
  long long violations = 0;
  out.best_feasible = 0.0;
  out.argmin = x;
  for (std::uint64_t step = 1; step < (std::uint64_t{1} << m); ++step) {
    const int i = std::countr_zero(step);
    const double sign = x[i] ? -1.0 : 1.0;
    energy += sign * (inst.q(i, i) + field[i]);
    violations += static_cast<long long>(sign) * clash[i];
    x[i] ^= 1;
    for (std::size_t j = 0; j < m; ++j)
      if (j != static_cast<std::size_t>(i)) field[j] += sign * 2.0 * inst.q(j, i);
    for (int j : inst.conflict_neighbors(i)) clash[j] += static_cast<int>(sign);
    if (violations == 0) {
      // the running sum drifts; settle near-ties with a fresh evaluation
      if (energy < out.best_feasible + 1e-6) {
        const double exact = energy_by_definition(inst, x);
        if (exact < out.best_feasible) {
          out.best_feasible = exact;
          out.argmin = x;
        }
      }
    } else {
      out.best_infeasible = std::min(out.best_infeasible, energy);
    }
  }
  return out;
}

// ---- dense linear algebra for the simulator oracle ----

using C = std::complex<double>;
using Mat = std::vector<std::vector<C>>;

inline Mat identity(std::size_t d) {
  Mat m(d, std::vector<C>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) m[i][i] = 1.0;
  return m;
}

inline Mat matmul(const Mat& a, const Mat& b) {
  const std::size_t d = a.size();
  Mat c(d, std::vector<C>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k) {
      if (a[i][k] == C(0.0)) continue;
      for (std::size_t j = 0; j < d; ++j) c[i][j] += a[i][k] * b[k][j];
    }
  return c;
}

inline Mat kron(const Mat& a, const Mat& b) {
  const std::size_t da = a.size(), db = b.size();
  Mat c(da * db, std::vector<C>(da * db, 0.0));
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = 0; j < da; ++j)
      for (std::size_t k = 0; k < db; ++k)
        for (std::size_t l = 0; l < db; ++l) c[i * db + k][j * db + l] = a[i][j] * b[k][l];
  return c;
}

inline Mat pauli(char which) {
  const C i{0.0, 1.0};
  switch (which) {
    case 'X':
      return {{0.0, 1.0}, {1.0, 0.0}};
    case 'Y':
      return {{0.0, -i}, {i, 0.0}};
    case 'Z':
      return {{1.0, 0.0}, {0.0, -1.0}};
  }
  return identity(2);
}

/// exp(A) by scaling and squaring a 20-term Taylor series.
inline Mat expm(Mat a) {
  const std::size_t d = a.size();
  double norm = 0.0;
  for (const auto& row : a)
    for (const auto& v : row) norm = std::max(norm, std::abs(v));
  int squarings = 0;
  while (norm * static_cast<double>(d) > 0.5) {
    norm /= 2;
    ++squarings;
  }
  for (auto& row : a)
    for (auto& v : row) v /= std::pow(2.0, squarings);
  Mat result = identity(d), term = identity(d);
  for (int k = 1; k <= 20; ++k) {
    term = matmul(term, a);
    for (auto& row : term)
      for (auto& v : row) v /= static_cast<double>(k);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) result[i][j] += term[i][j];
  }
  for (int s = 0; s < squarings; ++s) result = matmul(result, result);
  return result;
}

/// Operator on n qubits acting as `ops[q]` on qubit q (identity elsewhere);
/// qubit 0 is the least-significant index bit, so it is the rightmost factor.
inline Mat tensor(const std::vector<Mat>& ops) {
  Mat out = identity(1);
  for (std::size_t q = ops.size(); q-- > 0;) out = kron(out, ops[q]);
  return out;
}

inline Mat ry_matrix(double theta) {
  // exp(-i theta Y / 2)
  Mat y = pauli('Y');
  for (auto& row : y)
    for (auto& v : row) v *= C(0.0, -theta / 2);
  return expm(y);
}

/// exp(-i theta/4 (X_a X_b + Y_a Y_b)) on n qubits, built from full-size
/// Pauli products.
inline Mat ms_matrix(int n, int a, int b, double theta) {
  std::vector<Mat> xs(n, identity(2)), ys(n, identity(2));
  xs[a] = xs[b] = pauli('X');
  ys[a] = ys[b] = pauli('Y');
  Mat h = tensor(xs);
  const Mat yy = tensor(ys);
  for (std::size_t i = 0; i < h.size(); ++i)
    for (std::size_t j = 0; j < h.size(); ++j) h[i][j] = (h[i][j] + yy[i][j]) * C(0.0, -theta / 4);
  return expm(h);
}

inline std::vector<C> mat_vec(const Mat& u, const std::vector<C>& v) {
  std::vector<C> out(v.size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += u[i][j] * v[j];
  return out;
}

/// Dense-matrix reference for simulate(): every gate becomes a 2^n x 2^n
/// matrix applied to the state vector.
inline std::vector<C> dense_simulate(const CircuitSpec& spec, const std::vector<double>& params) {
  const int n = spec.n;
  std::vector<C> psi(std::size_t{1} << n, 0.0);
  psi[0] = 1.0;
  auto ry_layer = [&](double theta) { psi = mat_vec(tensor(std::vector<Mat>(n, ry_matrix(theta))), psi); };
  for (int l = 0; l < spec.p; ++l) {
    ry_layer(params[2 * l]);
    for (const auto& pr : spec.layers[l].flattened()) psi = mat_vec(ms_matrix(n, pr.a, pr.b, params[2 * l + 1]), psi);
  }
  ry_layer(params[2 * spec.p]);
  return psi;
}

inline double dense_expectation(const std::vector<C>& psi, int n, const Slot& s) {
  std::vector<Mat> ops(n, identity(2));
  const char c = s.species == Pauli::XX ? 'X' : s.species == Pauli::YY ? 'Y' : 'Z';
  ops[s.a] = ops[s.b] = pauli(c);
  const auto v = mat_vec(tensor(ops), psi);
  C acc = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) acc += std::conj(psi[i]) * v[i];
  return acc.real();
}

// ---- graph references ----

/// Maximum spanning tree weight by trying every (n-1)-subset of edges.
inline double brute_force_max_spanning_tree(int n, const PairImportance& imp) {
  const PairList all = imp.pairs();
  const int e = static_cast<int>(all.size());
  double best = -1.0;
  std::vector<int> pick(n - 1);
  // iterate over combinations of n-1 edges
  std::vector<bool> sel(e, false);
  std::fill(sel.begin(), sel.begin() + (n - 1), true);
  do {
    std::vector<int> parent(n);
    for (int i = 0; i < n; ++i) parent[i] = i;
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    bool acyclic = true;
    double w = 0.0;
    for (int k = 0; k < e && acyclic; ++k) {
      if (!sel[k]) continue;
      const int ra = find(all[k].a), rb = find(all[k].b);
      if (ra == rb) acyclic = false;
      parent[ra] = rb;
      w += imp.at(all[k]);
    }
    if (acyclic) best = std::max(best, w);
  } while (std::prev_permutation(sel.begin(), sel.end()));
  return best;
}

inline bool connected(int n, const PairList& edges) {
  std::vector<std::vector<int>> adj(n);
  for (const auto& p : edges) {
    adj[p.a].push_back(p.b);
    adj[p.b].push_back(p.a);
  }
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v : adj[u])
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
  }
  return count == n;
}

// ---- statistics references ----

/// Wilson interval written out from the textbook form
/// (p + z^2/2n +- z sqrt(p(1-p)/n + z^2/4n^2)) / (1 + z^2/n).
inline std::pair<double, double> wilson_reference(double k, double n) {
  const double z = 1.959964;
  const double p = k / n;
  const double a = p + z * z / (2 * n);
  const double b = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n));
  const double d = 1 + z * z / n;
  return {(a - b) / d, (a + b) / d};
}

/// Quantile as the weighted mean of the two order statistics around
/// h = (n - 1) q, using nth_element instead of a full sort.
inline double quantile_reference(std::vector<double> v, double q) {
  const double h = (static_cast<double>(v.size()) - 1) * q;
  const auto lo = static_cast<std::size_t>(h);
  std::nth_element(v.begin(), v.begin() + lo, v.end());
  const double x_lo = v[lo];
  if (lo + 1 >= v.size()) return x_lo;
  const double x_hi = *std::min_element(v.begin() + lo + 1, v.end());
  return x_lo + (h - static_cast<double>(lo)) * (x_hi - x_lo);
}

/// Short sequences whose instances have 1..max_m variables.
inline std::vector<QuboInstance> small_sequence_corpus(std::size_t max_m, int count, std::uint64_t seed) {
  std::vector<QuboInstance> out;
  std::mt19937_64 rng(seed);
  const char alphabet[] = "ACGU";
  const EnergyTable table = default_stacking_table();
  int attempts = 0;
  while (static_cast<int>(out.size()) < count && attempts < 100000) {
    ++attempts;
    std::string s(10 + rng() % 12, 'A');
    for (auto& ch : s) ch = alphabet[rng() % 4];
    const auto inst = build_qubo(parse_sequence(s, "rand" + std::to_string(attempts)), table);
    if (inst.m() >= 1 && inst.m() <= max_m) out.push_back(inst);
  }
  return out;
}

}  // namespace testing_support
