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
#include <compare>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "pcefold/encoding.hpp"
#include "pcefold/error.hpp"
#include "pcefold/rna_qubo.hpp"

namespace pcefold {

/// Unordered qubit pair stored with a < b.
struct QubitPair {
  int a = 0;
  int b = 0;

  QubitPair() = default;
  QubitPair(int x, int y) : a(std::min(x, y)), b(std::max(x, y)) {}

  friend auto operator<=>(const QubitPair&, const QubitPair&) = default;
};

using PairList = std::vector<QubitPair>;

/// Importance score for every one of the C(n, 2) qubit pairs.
class PairImportance {
 public:
  PairImportance() = default;
  explicit PairImportance(int n) : n_(n), scores_(static_cast<std::size_t>(n) * (n - 1) / 2, 0.0) {}

  int n() const { return n_; }
  std::size_t size() const { return scores_.size(); }

  std::size_t index(int a, int b) const {
    if (a > b) std::swap(a, b);
    // row-major upper triangle without diagonal
    return static_cast<std::size_t>(a) * (2 * n_ - a - 1) / 2 + (b - a - 1);
  }
  double at(int a, int b) const { return scores_[index(a, b)]; }
  double at(const QubitPair& p) const { return at(p.a, p.b); }
  void add(int a, int b, double v) { scores_[index(a, b)] += v; }
  void set(int a, int b, double v) { scores_[index(a, b)] = v; }

  /// All pairs in (a, b) lexicographic order.
  PairList pairs() const {
    PairList out;
    out.reserve(scores_.size());
    for (int a = 0; a < n_; ++a)
      for (int b = a + 1; b < n_; ++b) out.emplace_back(a, b);
    return out;
  }

  double max() const { return scores_.empty() ? 0.0 : *std::max_element(scores_.begin(), scores_.end()); }

 private:
  int n_ = 0;
  std::vector<double> scores_;
};

/// Direct pairs receive the full coupling weight |Q_ij| + |Q_ji|; the
/// distinct cross pairs between the two encodings receive half of it.
inline PairImportance importance_scores(const QuboInstance& inst, const EncodingMap& enc) {
  if (enc.slots.size() != inst.m()) throw Error(Errc::EncodingMismatch, "encoding does not cover the instance");
  PairImportance imp(enc.n);
  const std::size_t m = inst.m();
  for (std::size_t i = 0; i < m; ++i) {
    const QubitPair pi(enc.slots[i].a, enc.slots[i].b);
    for (std::size_t j = i + 1; j < m; ++j) {
      const double w = std::abs(inst.q(i, j)) + std::abs(inst.q(j, i));
      if (!(w > 0.0)) continue;
      const QubitPair pj(enc.slots[j].a, enc.slots[j].b);
      imp.add(pi.a, pi.b, w);
      imp.add(pj.a, pj.b, w);
      QubitPair cross[4];
      int n_cross = 0;
      for (int u : {pi.a, pi.b}) {
        for (int v : {pj.a, pj.b}) {
          if (u == v) continue;
          const QubitPair c(u, v);
          if (c == pi || c == pj) continue;
          if (std::find(cross, cross + n_cross, c) != cross + n_cross) continue;
          cross[n_cross++] = c;
        }
      }
      for (int k = 0; k < n_cross; ++k) imp.add(cross[k].a, cross[k].b, 0.5 * w);
    }
  }
  return imp;
}

enum class Topology { NN, InformedK, Informed2K, All };

inline const char* topology_name(Topology t) {
  switch (t) {
    case Topology::NN: return "NN";
    case Topology::InformedK: return "InformedK";
    case Topology::Informed2K: return "Informed2K";
    case Topology::All: return "All";
  }
  return "?";
}

inline Topology topology_from_name(const std::string& s) {
  if (s == "NN" || s == "nn") return Topology::NN;
  if (s == "InformedK" || s == "Informed-k" || s == "informed_k" || s == "informed-k") return Topology::InformedK;
  if (s == "Informed2K" || s == "Informed-2k" || s == "informed_2k" || s == "informed-2k") return Topology::Informed2K;
  if (s == "All" || s == "all") return Topology::All;
  throw Error(Errc::Parse, "unknown topology " + s);
}

namespace detail {

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(int x, int y) {
    x = find(x);
    y = find(y);
    if (x == y) return false;
    if (rank_[x] < rank_[y]) std::swap(x, y);
    parent_[y] = x;
    if (rank_[x] == rank_[y]) ++rank_[x];
    return true;
  }

 private:
  std::vector<int> parent_;
  std::vector<int> rank_;
};

/// Descending score, ties by (a, b).
inline void sort_by_score(PairList& pairs, const std::vector<double>& score_of) {
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (score_of[x] != score_of[y]) return score_of[x] > score_of[y];
    return pairs[x] < pairs[y];
  });
  PairList sorted;
  sorted.reserve(pairs.size());
  for (auto k : order) sorted.push_back(pairs[k]);
  pairs = std::move(sorted);
}

inline std::vector<int> seeded_permutation(int n, std::uint64_t seed) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);
  for (int k = n; k > 1; --k) std::swap(perm[k - 1], perm[static_cast<int>(rng() % k)]);
  return perm;
}

}  // namespace detail

/// Kruskal maximum spanning forest over `pairs` (already sorted by
/// preference). Returns accepted pairs in acceptance order.
inline PairList kruskal_max(int n, const PairList& sorted_pairs) {
  detail::DisjointSets ds(n);
  PairList tree;
  for (const auto& p : sorted_pairs) {
    if (ds.unite(p.a, p.b)) {
      tree.push_back(p);
      if (static_cast<int>(tree.size()) == n - 1) break;
    }
  }
  return tree;
}

inline PairList pairs_by_importance(const PairImportance& imp) {
  PairList pairs = imp.pairs();
  std::vector<double> s(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) s[k] = imp.at(pairs[k]);
  detail::sort_by_score(pairs, s);
  return pairs;
}

inline PairList select_topology(Topology kind, int n, const PairImportance& imp, std::uint64_t seed) {
  if (n < 2) throw Error(Errc::InvalidArgument, "topology needs at least 2 qubits");
  if (imp.n() != n) throw Error(Errc::InvalidArgument, "importance register size differs from n");
  switch (kind) {
    case Topology::NN: {
      const auto order = detail::seeded_permutation(n, seed);
      PairList path;
      for (int k = 0; k + 1 < n; ++k) path.emplace_back(order[k], order[k + 1]);
      return path;
    }
    case Topology::InformedK:
      return kruskal_max(n, pairs_by_importance(imp));
    case Topology::Informed2K: {
      const PairList ranked = pairs_by_importance(imp);
      PairList out = kruskal_max(n, ranked);
      const std::set<QubitPair> used(out.begin(), out.end());
      int extra = n - 1;
      for (const auto& p : ranked) {
        if (extra == 0) break;
        if (used.count(p)) continue;
        out.push_back(p);
        --extra;
      }
      return out;
    }
    case Topology::All: {
      PairList all = imp.pairs();
      std::mt19937_64 rng(seed);
      for (std::size_t k = all.size(); k > 1; --k) std::swap(all[k - 1], all[rng() % k]);
      return all;
    }
  }
  return {};
}

/// Simple undirected device coupling graph.
struct DeviceGraph {
  int nodes = 0;
  PairList edges;

  bool has_edge(int u, int v) const {
    return std::binary_search(sorted_edges().begin(), sorted_edges().end(), QubitPair(u, v));
  }

  std::vector<std::vector<int>> adjacency() const {
    std::vector<std::vector<int>> adj(nodes);
    for (const auto& e : edges) {
      adj[e.a].push_back(e.b);
      adj[e.b].push_back(e.a);
    }
    return adj;
  }

  /// Hop distances from `src`; -1 for unreachable nodes.
  std::vector<int> distances_from(int src) const {
    const auto adj = adjacency();
    std::vector<int> dist(nodes, -1);
    std::queue<int> q;
    dist[src] = 0;
    q.push(src);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int v : adj[u]) {
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          q.push(v);
        }
      }
    }
    return dist;
  }

  void validate() const {
    std::set<QubitPair> seen;
    for (const auto& e : edges) {
      if (e.a == e.b || e.a < 0 || e.b >= nodes) throw Error(Errc::InvalidArgument, "bad device edge");
      if (!seen.insert(e).second) throw Error(Errc::InvalidArgument, "duplicate device edge");
    }
  }

 private:
  const PairList& sorted_edges() const {
    if (sorted_cache_.size() != edges.size()) {
      sorted_cache_ = edges;
      std::sort(sorted_cache_.begin(), sorted_cache_.end());
    }
    return sorted_cache_;
  }
  mutable PairList sorted_cache_;
};

inline nlohmann::json device_to_json(const DeviceGraph& g) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : g.edges) edges.push_back({e.a, e.b});
  return {{"nodes", g.nodes}, {"edges", std::move(edges)}};
}

inline DeviceGraph device_from_json(const nlohmann::json& j) {
  DeviceGraph g;
  try {
    g.nodes = j.at("nodes").get<int>();
    for (const auto& e : j.at("edges")) g.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Parse, std::string("malformed device graph: ") + e.what());
  }
  g.validate();
  return g;
}

/// Two heavy-hex cells sharing one side (21 qubits, 22 couplers) plus two
/// pendant qubits hanging off the outer vertices: 23 nodes, 24 edges.
inline DeviceGraph heavy_hex_two_cell() {
  DeviceGraph g;
  g.nodes = 23;
  for (int k = 0; k < 12; ++k) g.edges.emplace_back(k, (k + 1) % 12);
  // second ring closes through the shared side 0-1-2
  g.edges.emplace_back(2, 12);
  for (int k = 12; k < 20; ++k) g.edges.emplace_back(k, k + 1);
  g.edges.emplace_back(20, 0);
  g.edges.emplace_back(6, 21);
  g.edges.emplace_back(16, 22);
  return g;
}

/// I / (1 + lambda * max(d - 1, 0)).
inline double swap_discounted(double importance, int distance, double lambda) {
  return importance / (1.0 + lambda * std::max(distance - 1, 0));
}

namespace detail {

inline void check_subset(const DeviceGraph& dev, const std::vector<int>& subset) {
  std::set<int> seen;
  for (int v : subset) {
    if (v < 0 || v >= dev.nodes) throw Error(Errc::SubsetNotInDevice, "node " + std::to_string(v) + " not in device");
    if (!seen.insert(v).second) throw Error(Errc::SubsetNotInDevice, "duplicate node in subset");
  }
}

}  // namespace detail

/// Logical pairs whose physical images are native couplers.
inline PairList native_pairs(const DeviceGraph& dev, const std::vector<int>& subset) {
  PairList out;
  const int n = static_cast<int>(subset.size());
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (dev.has_edge(subset[a], subset[b])) out.emplace_back(a, b);
  return out;
}

/// Spanning tree on SWAP-discounted importance restricted to native
/// couplers of the subset (non-native pairs only bridge a disconnected
/// native subgraph), followed by every remaining native pair. `subset[q]`
/// is the physical node hosting logical qubit q.
inline PairList hardware_aware_select(const PairImportance& imp, const DeviceGraph& dev,
                                      const std::vector<int>& subset, double lambda = 0.3) {
  detail::check_subset(dev, subset);
  const int n = static_cast<int>(subset.size());
  if (imp.n() != n) throw Error(Errc::InvalidArgument, "importance register size differs from subset size");
  if (lambda < 0) throw Error(Errc::InvalidArgument, "lambda must be >= 0");

  PairList native, other;
  std::vector<double> native_s, other_s;
  for (int a = 0; a < n; ++a) {
    const auto dist = dev.distances_from(subset[a]);
    for (int b = a + 1; b < n; ++b) {
      const int d = dist[subset[b]];
      const double s = swap_discounted(imp.at(a, b), d < 0 ? n : d, lambda);
      if (d == 1) {
        native.emplace_back(a, b);
        native_s.push_back(s);
      } else {
        other.emplace_back(a, b);
        other_s.push_back(s);
      }
    }
  }
  detail::sort_by_score(native, native_s);
  detail::sort_by_score(other, other_s);

  detail::DisjointSets ds(n);
  PairList out;
  std::set<QubitPair> used;
  for (const auto& p : native) {
    if (ds.unite(p.a, p.b)) {
      out.push_back(p);
      used.insert(p);
    }
  }
  for (const auto& p : other) {
    if (static_cast<int>(out.size()) >= n - 1) break;
    if (ds.unite(p.a, p.b)) {
      out.push_back(p);
      used.insert(p);
    }
  }
  for (const auto& p : native) {
    if (!used.count(p)) out.push_back(p);
  }
  return out;
}

namespace detail {

/// Proper edge colouring helpers over an explicit colour table.
class EdgeColoring {
 public:
  EdgeColoring(const PairList& edges, int n_colors) : edges_(edges), color_(edges.size(), -1), n_colors_(n_colors) {
    int n = 0;
    for (const auto& e : edges) n = std::max(n, e.b + 1);
    at_.assign(n, std::vector<int>(n_colors, -1));
  }

  int n_colors() const { return n_colors_; }
  int color(std::size_t e) const { return color_[e]; }
  bool free(int v, int c) const { return at_[v][c] < 0; }
  int edge_at(int v, int c) const { return at_[v][c]; }

  int first_free(int v) const {
    for (int c = 0; c < n_colors_; ++c)
      if (free(v, c)) return c;
    return -1;
  }

  void assign(std::size_t e, int c) {
    if (color_[e] >= 0) {
      at_[edges_[e].a][color_[e]] = -1;
      at_[edges_[e].b][color_[e]] = -1;
    }
    color_[e] = c;
    if (c >= 0) {
      at_[edges_[e].a][c] = static_cast<int>(e);
      at_[edges_[e].b][c] = static_cast<int>(e);
    }
  }

  int other(std::size_t e, int v) const { return edges_[e].a == v ? edges_[e].b : edges_[e].a; }

  /// Edges of the maximal (c1, c2)-alternating path starting at v with c1.
  std::vector<int> kempe_path(int v, int c1, int c2) const {
    std::vector<int> path;
    int c = c1;
    int cur = v;
    while (true) {
      const int e = edge_at(cur, c);
      if (e < 0) break;
      if (!path.empty() && e == path.front()) break;  // closed cycle
      path.push_back(e);
      cur = other(e, cur);
      c = (c == c1) ? c2 : c1;
    }
    return path;
  }

  void swap_path(const std::vector<int>& path, int c1, int c2) {
    std::vector<int> old(path.size());
    for (std::size_t k = 0; k < path.size(); ++k) {
      old[k] = color_[path[k]];
      assign(path[k], -1);
    }
    for (std::size_t k = 0; k < path.size(); ++k) assign(path[k], old[k] == c1 ? c2 : c1);
  }

 private:
  PairList edges_;
  std::vector<int> color_;
  std::vector<std::vector<int>> at_;
  int n_colors_;
};

inline bool is_bipartite(int n, const PairList& edges) {
  std::vector<std::vector<int>> adj(n);
  for (const auto& e : edges) {
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  std::vector<int> side(n, -1);
  for (int s = 0; s < n; ++s) {
    if (side[s] >= 0) continue;
    side[s] = 0;
    std::queue<int> q;
    q.push(s);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int v : adj[u]) {
        if (side[v] < 0) {
          side[v] = 1 - side[u];
          q.push(v);
        } else if (side[v] == side[u]) {
          return false;
        }
      }
    }
  }
  return true;
}

/// Delta colours for bipartite graphs by alternating-path recolouring.
inline void color_bipartite(EdgeColoring& col, const PairList& edges) {
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const int u = edges[e].a, v = edges[e].b;
    const int alpha = col.first_free(u);
    const int beta = col.first_free(v);
    if (col.free(v, alpha)) {
      col.assign(e, alpha);
      continue;
    }
    // alpha is used at v: flip the alpha/beta path from v so alpha frees up.
    col.swap_path(col.kempe_path(v, alpha, beta), alpha, beta);
    col.assign(e, alpha);
  }
}

/// Misra-Gries: at most Delta + 1 colours on any simple graph.
inline void color_misra_gries(EdgeColoring& col, const PairList& edges, int n) {
  std::vector<std::vector<std::pair<int, int>>> adj(n);  // (neighbour, edge id)
  for (std::size_t e = 0; e < edges.size(); ++e) {
    adj[edges[e].a].emplace_back(edges[e].b, static_cast<int>(e));
    adj[edges[e].b].emplace_back(edges[e].a, static_cast<int>(e));
  }
  auto edge_between = [&](int u, int v) {
    for (auto [w, id] : adj[u])
      if (w == v) return id;
    return -1;
  };
  for (std::size_t e0 = 0; e0 < edges.size(); ++e0) {
    const int u = edges[e0].a;
    // maximal fan of u starting at the uncoloured neighbour
    std::vector<int> fan{edges[e0].b};
    std::vector<char> in_fan(n, 0);
    in_fan[fan[0]] = 1;
    bool grown = true;
    while (grown) {
      grown = false;
      const int last = fan.back();
      for (auto [w, id] : adj[u]) {
        if (in_fan[w]) continue;
        const int c = col.color(id);
        if (c >= 0 && col.free(last, c)) {
          fan.push_back(w);
          in_fan[w] = 1;
          grown = true;
          break;
        }
      }
    }
    const int c = col.first_free(u);
    const int d = col.first_free(fan.back());
    if (c != d) {
      // invert the cd-path through u (starts with d at u)
      col.swap_path(col.kempe_path(u, d, c), d, c);
    }
    // find w in fan with d free and prefix still a fan
    std::size_t w_idx = fan.size() - 1;
    for (std::size_t k = 0; k < fan.size(); ++k) {
      bool prefix_ok = true;
      for (std::size_t t = 0; t + 1 <= k && prefix_ok; ++t) {
        const int id = edge_between(u, fan[t + 1]);
        const int ct = col.color(id);
        prefix_ok = ct >= 0 && col.free(fan[t], ct);
      }
      if (prefix_ok && col.free(fan[k], d)) {
        w_idx = k;
        break;
      }
    }
    // rotate the fan prefix
    for (std::size_t k = 0; k < w_idx; ++k) {
      const int id_next = edge_between(u, fan[k + 1]);
      const int cn = col.color(id_next);
      col.assign(id_next, -1);
      col.assign(edge_between(u, fan[k]), cn);
    }
    col.assign(edge_between(u, fan[w_idx]), d);
  }
}

}  // namespace detail

/// Partitions `pairs` into sublayers of qubit-disjoint pairs. First-fit
/// greedy is kept when it already meets the Delta (bipartite) or Delta+1
/// bound; otherwise the colouring is rebuilt to meet it. Classes are then
/// equalised by Kempe-path swaps. Input order is preserved in each sublayer.
inline std::vector<PairList> edge_color(const PairList& pairs) {
  if (pairs.empty()) return {};
  {
    std::set<QubitPair> seen;
    for (const auto& p : pairs) {
      if (p.a == p.b || p.a < 0) throw Error(Errc::InvalidPair, "invalid pair");
      if (!seen.insert(p).second) throw Error(Errc::InvalidPair, "duplicate pair");
    }
  }
  int n = 0;
  for (const auto& p : pairs) n = std::max(n, p.b + 1);
  std::vector<int> degree(n, 0);
  for (const auto& p : pairs) {
    ++degree[p.a];
    ++degree[p.b];
  }
  const int delta = *std::max_element(degree.begin(), degree.end());
  const bool bipartite = detail::is_bipartite(n, pairs);
  const int target = bipartite ? delta : delta + 1;

  detail::EdgeColoring col(pairs, 2 * delta);
  for (std::size_t e = 0; e < pairs.size(); ++e) {
    for (int c = 0; c < col.n_colors(); ++c) {
      if (col.free(pairs[e].a, c) && col.free(pairs[e].b, c)) {
        col.assign(e, c);
        break;
      }
    }
  }
  int used = 0;
  for (std::size_t e = 0; e < pairs.size(); ++e) used = std::max(used, col.color(e) + 1);
  if (used > target) {
    col = detail::EdgeColoring(pairs, target);
    if (bipartite) {
      detail::color_bipartite(col, pairs);
    } else {
      detail::color_misra_gries(col, pairs, n);
    }
    used = target;
  }

  // equalise class sizes
  auto class_sizes = [&] {
    std::vector<int> sz(used, 0);
    for (std::size_t e = 0; e < pairs.size(); ++e) ++sz[col.color(e)];
    return sz;
  };
  for (int guard = 0; guard < static_cast<int>(pairs.size()) * used; ++guard) {
    const auto sz = class_sizes();
    const int big = static_cast<int>(std::max_element(sz.begin(), sz.end()) - sz.begin());
    const int small = static_cast<int>(std::min_element(sz.begin(), sz.end()) - sz.begin());
    if (sz[big] - sz[small] < 2) break;
    bool swapped = false;
    for (std::size_t e = 0; e < pairs.size() && !swapped; ++e) {
      if (col.color(e) != big) continue;
      for (int end : {pairs[e].a, pairs[e].b}) {
        if (!col.free(end, small)) continue;
        // path starting at a vertex missing `small`: begins and ends with `big`
        // when it has odd length, which shifts one edge to `small`.
        const auto path = col.kempe_path(end, big, small);
        if (path.size() % 2 == 1) {
          col.swap_path(path, big, small);
          swapped = true;
          break;
        }
      }
    }
    if (!swapped) break;
  }

  std::vector<PairList> layers(used);
  for (std::size_t e = 0; e < pairs.size(); ++e) layers[col.color(e)].push_back(pairs[e]);
  layers.erase(std::remove_if(layers.begin(), layers.end(), [](const PairList& l) { return l.empty(); }),
               layers.end());
  return layers;
}

struct AnnealConfig {
  int steps = 5000;
  std::optional<double> initial_temperature;  // default: max importance
  double cooling = 0.995;
};

struct AnnealResult {
  std::vector<int> placement;  // placement[logical] = physical node
  double score = 0.0;
  double initial_score = 0.0;
  std::vector<double> best_trace;  // best-so-far after every step
};

/// Sum of importance carried by native couplers under `placement`.
inline double placement_score(const PairImportance& imp, const DeviceGraph& dev, const std::vector<int>& placement) {
  double s = 0.0;
  for (const auto& p : native_pairs(dev, placement)) s += imp.at(p);
  return s;
}

/// Sum of the k largest importance values, ignoring the device.
inline double importance_ceiling(const PairImportance& imp, std::size_t k) {
  std::vector<double> v;
  for (const auto& p : imp.pairs()) v.push_back(imp.at(p));
  std::sort(v.begin(), v.end(), std::greater<>());
  v.resize(std::min(k, v.size()));
  return std::accumulate(v.begin(), v.end(), 0.0);
}

/// Simulated annealing over logical-to-physical relabelings of `subset`
/// using pairwise swaps and geometric cooling.
inline AnnealResult anneal_relabel(const PairImportance& imp, const DeviceGraph& dev, const std::vector<int>& subset,
                                   const AnnealConfig& cfg = {}, std::uint64_t seed = 0) {
  detail::check_subset(dev, subset);
  const int n = static_cast<int>(subset.size());
  if (imp.n() != n) throw Error(Errc::InvalidArgument, "importance register size differs from subset size");

  AnnealResult res;
  std::vector<int> cur = subset;
  double cur_score = placement_score(imp, dev, cur);
  res.initial_score = cur_score;
  res.placement = cur;
  res.score = cur_score;
  if (n < 2) return res;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double temp = cfg.initial_temperature.value_or(imp.max());
  if (!(temp > 0.0)) temp = 1.0;
  res.best_trace.reserve(cfg.steps);
  for (int step = 0; step < cfg.steps; ++step) {
    const int x = static_cast<int>(rng() % n);
    int y = static_cast<int>(rng() % (n - 1));
    if (y >= x) ++y;
    std::swap(cur[x], cur[y]);
    const double s = placement_score(imp, dev, cur);
    const double delta = s - cur_score;
    if (delta >= 0.0 || unit(rng) < std::exp(delta / temp)) {
      cur_score = s;
      if (s > res.score) {
        res.score = s;
        res.placement = cur;
      }
    } else {
      std::swap(cur[x], cur[y]);
    }
    temp *= cfg.cooling;
    res.best_trace.push_back(res.score);
  }
  return res;
}

/// Layerwise ansatz: p entangling layers, each preceded by a shared R_y angle,
/// then a final R_y layer. Parameter layout is
/// [theta_0, phi_0, theta_1, phi_1, ..., theta_{p-1}, phi_{p-1}, theta_p].
struct CircuitSpec {
  struct Layer {
    std::vector<PairList> sublayers;  // applied in order; pairs within a sublayer in order

    PairList flattened() const {
      PairList out;
      for (const auto& s : sublayers) out.insert(out.end(), s.begin(), s.end());
      return out;
    }
  };

  int n = 0;
  int p = 0;
  std::vector<Layer> layers;

  std::size_t param_count() const { return 2 * static_cast<std::size_t>(p) + 1; }
  static std::size_t theta_index(int layer) { return 2 * static_cast<std::size_t>(layer); }
  static std::size_t phi_index(int layer) { return 2 * static_cast<std::size_t>(layer) + 1; }
};

/// One pair list broadcasts to every layer. With `colorize`, each layer's
/// pairs are reordered into edge-coloured sublayers.
inline CircuitSpec build_circuit(int n, int p, const std::vector<PairList>& pair_layers, bool colorize = false) {
  if (p < 1) throw Error(Errc::InvalidArgument, "depth p must be >= 1");
  if (n < 1) throw Error(Errc::InvalidArgument, "n must be >= 1");
  if (pair_layers.size() != 1 && pair_layers.size() != static_cast<std::size_t>(p)) {
    throw Error(Errc::InvalidArgument, "need one pair list or one per layer");
  }
  CircuitSpec spec;
  spec.n = n;
  spec.p = p;
  for (int l = 0; l < p; ++l) {
    const PairList& pairs = pair_layers.size() == 1 ? pair_layers[0] : pair_layers[l];
    if (pairs.empty()) throw Error(Errc::InvalidPair, "entangling layer has no pairs");
    for (const auto& q : pairs) {
      if (q.a < 0 || q.a >= q.b || q.b >= n) throw Error(Errc::InvalidPair, "pair outside register");
    }
    CircuitSpec::Layer layer;
    if (colorize) {
      layer.sublayers = edge_color(pairs);
    } else {
      layer.sublayers = {pairs};
    }
    spec.layers.push_back(std::move(layer));
  }
  return spec;
}

inline nlohmann::json circuit_to_json(const CircuitSpec& spec) {
  using nlohmann::json;
  json layers = json::array();
  for (const auto& layer : spec.layers) {
    json subs = json::array();
    for (const auto& s : layer.sublayers) {
      json pl = json::array();
      for (const auto& q : s) pl.push_back({q.a, q.b});
      subs.push_back(std::move(pl));
    }
    layers.push_back({{"sublayers", std::move(subs)}});
  }
  json layout = json::array();
  for (int l = 0; l < spec.p; ++l) {
    layout.push_back("theta_" + std::to_string(l));
    layout.push_back("phi_" + std::to_string(l));
  }
  layout.push_back("theta_" + std::to_string(spec.p));
  return {{"n", spec.n}, {"p", spec.p}, {"param_count", spec.param_count()}, {"param_layout", layout},
          {"layers", std::move(layers)}};
}

}  // namespace pcefold
