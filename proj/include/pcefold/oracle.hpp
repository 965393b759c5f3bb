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
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "pcefold/decode.hpp"
#include "pcefold/error.hpp"
#include "pcefold/qubo_io.hpp"
#include "pcefold/rna_qubo.hpp"

namespace pcefold {

struct OracleResult {
  Bits bits;
  double energy = 0.0;
  bool proved_optimal = false;
  long long nodes_explored = 0;
};

namespace detail {

/// Depth-first branch and bound over independent sets of the conflict
/// graph. Variables are branched in ascending diagonal order, "include"
/// first. Every node's partial selection is itself feasible and updates the
/// incumbent.
class BranchAndBound {
 public:
  BranchAndBound(const QuboInstance& inst, long long node_limit) : inst_(inst), node_limit_(node_limit) {
    const std::size_t m = inst.m();
    order_.resize(m);
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) { return inst.q(a, a) < inst.q(b, b); });
    neg_partners_.resize(m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (i != j && inst.q(i, j) < 0.0 && !inst.conflicts(i, j)) neg_partners_[i].push_back(static_cast<int>(j));
    in_r_.assign(m, 0);
    selected_.assign(m, 0);
  }

  void seed_incumbent(const Bits& x) {
    if (!is_feasible(inst_, x)) return;
    const double e = qubo_energy(inst_, x);
    if (e < best_energy_) {
      best_energy_ = e;
      best_bits_ = x;
    }
  }

  OracleResult run() {
    if (best_bits_.empty()) {
      best_bits_.assign(inst_.m(), 0);
      best_energy_ = 0.0;
    }
    std::vector<int> r = order_;
    std::vector<double> d(r.size());
    for (std::size_t k = 0; k < r.size(); ++k) d[k] = inst_.q(r[k], r[k]);
    dfs(r, d, 0.0);
    OracleResult out;
    out.bits = best_bits_;
    out.energy = qubo_energy(inst_, best_bits_);
    out.proved_optimal = !aborted_;
    out.nodes_explored = nodes_;
    return out;
  }

  /// Optimistic lower bound on any feasible completion of the current
  /// selection using only variables in `r` (with marginals `d`).
  double bound(const std::vector<int>& r, const std::vector<double>& d, double energy) {
    ++stamp_;
    for (int v : r) in_r_[v] = stamp_;
    std::vector<double> value(r.size());
    double simple = energy;
    for (std::size_t k = 0; k < r.size(); ++k) {
      double v = d[k];
      for (int j : neg_partners_[r[k]])
        if (in_r_[j] == stamp_) v += inst_.q(r[k], j);
      value[k] = v;
      simple += std::min(0.0, v);
    }
    // at most one member of each conflict clique can be chosen
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < r.size(); ++k)
      if (value[k] < 0.0) idx.push_back(k);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return value[a] < value[b]; });
    std::vector<std::vector<int>> cliques;
    double clique_bound = energy;
    for (std::size_t k : idx) {
      const int v = r[k];
      bool placed = false;
      for (auto& c : cliques) {
        bool all = true;
        for (int u : c)
          if (!inst_.conflicts(u, v)) {
            all = false;
            break;
          }
        if (all) {
          c.push_back(v);
          placed = true;
          break;
        }
      }
      if (!placed) {
        cliques.push_back({v});
        clique_bound += value[k];  // sorted ascending: first member is the minimum
      }
    }
    return std::max(simple, clique_bound);
  }

 private:
  void dfs(const std::vector<int>& r, const std::vector<double>& d, double energy) {
    if (aborted_) return;
    if (++nodes_ > node_limit_) {
      aborted_ = true;
      return;
    }
    if (energy < best_energy_ - 1e-12) {
      best_energy_ = energy;
      best_bits_ = selected_;
    }
    if (r.empty()) return;
    if (bound(r, d, energy) >= best_energy_ - 1e-9) return;

    const int v = r.front();
    {
      std::vector<int> r_in;
      std::vector<double> d_in;
      const auto row = inst_.row(v);
      for (std::size_t k = 1; k < r.size(); ++k) {
        if (inst_.conflicts(v, r[k])) continue;
        r_in.push_back(r[k]);
        d_in.push_back(d[k] + 2.0 * row[r[k]]);
      }
      selected_[v] = 1;
      dfs(r_in, d_in, energy + d.front());
      selected_[v] = 0;
    }
    std::vector<int> r_out(r.begin() + 1, r.end());
    std::vector<double> d_out(d.begin() + 1, d.end());
    dfs(r_out, d_out, energy);
  }

  const QuboInstance& inst_;
  long long node_limit_;
  std::vector<int> order_;
  std::vector<std::vector<int>> neg_partners_;
  std::vector<int> in_r_;
  int stamp_ = 0;
  Bits selected_;
  Bits best_bits_;
  double best_energy_ = std::numeric_limits<double>::infinity();
  long long nodes_ = 0;
  bool aborted_ = false;
};

}  // namespace detail

/// Exact minimum over feasible strings. `proved_optimal` is false when the
/// node budget ran out; the incumbent is returned in that case.
inline OracleResult exact_solve(const QuboInstance& inst, long long node_limit = 50'000'000) {
  if (node_limit < 1) throw Error(Errc::InvalidArgument, "node_limit must be >= 1");
  detail::BranchAndBound bb(inst, node_limit);
  if (inst.m() > 0) {
    const std::vector<double> neutral(inst.m(), 0.0);
    bb.seed_incumbent(pagd(neutral, inst, 8.0, 0.0).bits);
  }
  return bb.run();
}

inline nlohmann::json oracle_to_json(const OracleResult& r) {
  std::string bits;
  for (auto b : r.bits) bits.push_back(b ? '1' : '0');
  return {{"bits", bits}, {"energy", r.energy}, {"proved_optimal", r.proved_optimal},
          {"nodes_explored", r.nodes_explored}};
}

inline OracleResult oracle_from_json(const nlohmann::json& j) {
  OracleResult r;
  for (char c : j.at("bits").get<std::string>()) r.bits.push_back(c == '1' ? 1 : 0);
  r.energy = j.at("energy").get<double>();
  r.proved_optimal = j.at("proved_optimal").get<bool>();
  r.nodes_explored = j.at("nodes_explored").get<long long>();
  return r;
}

/// JSON sidecar cache keyed by instance content hash. An unproved cached
/// result is re-solved when a larger node budget is requested.
inline OracleResult cached_exact_solve(const QuboInstance& inst, const std::filesystem::path& dir,
                                       long long node_limit) {
  const auto path = dir / ("oracle_" + content_hash_hex(inst) + ".json");
  if (std::filesystem::exists(path)) {
    std::ifstream in(path);
    nlohmann::json j;
    try {
      in >> j;
      auto r = oracle_from_json(j);
      if (r.bits.size() == inst.m() && (r.proved_optimal || j.value("node_limit", 0LL) >= node_limit)) return r;
    } catch (const nlohmann::json::exception&) {
      // unreadable sidecar: fall through and re-solve
    }
  }
  auto r = exact_solve(inst, node_limit);
  std::filesystem::create_directories(dir);
  auto j = oracle_to_json(r);
  j["node_limit"] = node_limit;
  j["sequence_id"] = inst.sequence_id();
  std::ofstream(path) << j.dump(1) << '\n';
  return r;
}

}  // namespace pcefold
