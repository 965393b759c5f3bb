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

#include <cmath>
#include <numeric>
#include <set>

#include "doctest.h"
#include "support.hpp"

using namespace pcefold;
using namespace testing_support;

namespace {

/// Two variables coupled by Q_01 = Q_10 = w/2 on the given slots.
QuboInstance coupled_pair(double w) {
  RelationSets rel;
  return QuboInstance(2, {-1.0, w / 2, w / 2, -1.0}, rel);
}

PairImportance random_importance(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  PairImportance imp(n);
  for (const auto& p : imp.pairs()) imp.set(p.a, p.b, std::round(u(rng) * 4) / 4);  // ties are likely
  return imp;
}

double weight(const PairImportance& imp, const PairList& pairs) {
  double w = 0.0;
  for (const auto& p : pairs) w += imp.at(p);
  return w;
}

}  // namespace

TEST_CASE("importance on disjoint pairs") {
  EncodingMap enc{4, {{0, 1, Pauli::XX}, {2, 3, Pauli::ZZ}}};
  const auto imp = importance_scores(coupled_pair(4.0), enc);
  CHECK(imp.at(0, 1) == 4.0);
  CHECK(imp.at(2, 3) == 4.0);
  CHECK(imp.at(0, 2) == 2.0);
  CHECK(imp.at(0, 3) == 2.0);
  CHECK(imp.at(1, 2) == 2.0);
  CHECK(imp.at(1, 3) == 2.0);
}

TEST_CASE("importance on the same pair and shared qubits") {
  EncodingMap same{2, {{0, 1, Pauli::XX}, {0, 1, Pauli::YY}}};
  const auto imp = importance_scores(coupled_pair(4.0), same);
  CHECK(imp.at(0, 1) == 8.0);

  // pairs (0,1) and (1,2): one cross pair (0,2)
  EncodingMap shared{3, {{0, 1, Pauli::XX}, {1, 2, Pauli::XX}}};
  const auto s = importance_scores(coupled_pair(4.0), shared);
  CHECK(s.at(0, 1) == 4.0);
  CHECK(s.at(1, 2) == 4.0);
  CHECK(s.at(0, 2) == 2.0);

  RelationSets rel;
  const QuboInstance diag(2, {-1.0, 0.0, 0.0, -2.0}, rel);
  const auto zero = importance_scores(diag, shared);
  for (const auto& p : zero.pairs()) CHECK(zero.at(p) == 0.0);

  EncodingMap short_enc{3, {{0, 1, Pauli::XX}}};
  try {
    importance_scores(diag, short_enc);
    FAIL("expected EncodingMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EncodingMismatch);
  }
}

TEST_CASE("informed topologies") {
  PairImportance imp(4);
  imp.set(1, 3, 100.0);
  const auto tree = select_topology(Topology::InformedK, 4, imp, 0);
  CHECK(tree.size() == 3);
  CHECK(std::find(tree.begin(), tree.end(), QubitPair(1, 3)) != tree.end());
  CHECK(connected(4, tree));

  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const int n = 3 + static_cast<int>(seed % 5);  // up to 7 qubits
    const auto r = random_importance(n, seed);
    const auto k = select_topology(Topology::InformedK, n, r, seed);
    CHECK(k.size() == static_cast<std::size_t>(n - 1));
    CHECK(connected(n, k));
    CHECK(weight(r, k) == doctest::Approx(brute_force_max_spanning_tree(n, r)));
    // seed independence
    CHECK(select_topology(Topology::InformedK, n, r, seed + 99) == k);
    const auto k2 = select_topology(Topology::Informed2K, n, r, seed);
    CHECK(select_topology(Topology::Informed2K, n, r, seed + 5) == k2);
    const std::size_t expect2 = std::min<std::size_t>(2 * (n - 1), static_cast<std::size_t>(n * (n - 1) / 2));
    CHECK(k2.size() == expect2);
    CHECK(std::set<QubitPair>(k2.begin(), k2.end()).size() == k2.size());
    CHECK(std::equal(k.begin(), k.end(), k2.begin()));
  }
}

TEST_CASE("Kruskal tie-break is lexicographic") {
  PairImportance flat(4);
  for (const auto& p : flat.pairs()) flat.set(p.a, p.b, 1.0);
  const PairList expect{{0, 1}, {0, 2}, {0, 3}};
  CHECK(select_topology(Topology::InformedK, 4, flat, 0) == expect);
}

TEST_CASE("NN and All topologies") {
  PairImportance imp(6);
  const auto a = select_topology(Topology::NN, 6, imp, 1);
  CHECK(a == select_topology(Topology::NN, 6, imp, 1));
  CHECK(a.size() == 5);
  CHECK(connected(6, a));
  std::vector<int> degree(6, 0);
  for (const auto& p : a) {
    ++degree[p.a];
    ++degree[p.b];
  }
  CHECK(*std::max_element(degree.begin(), degree.end()) <= 2);
  int differing = 0;
  for (std::uint64_t s = 2; s < 12; ++s) differing += select_topology(Topology::NN, 6, imp, s) != a;
  CHECK(differing > 0);
  const auto all = select_topology(Topology::All, 6, imp, 3);
  CHECK(all.size() == 15);
  CHECK(std::set<QubitPair>(all.begin(), all.end()).size() == 15);
}

TEST_CASE("swap discount") {
  CHECK(swap_discounted(100.0, 2, 0.3) == doctest::Approx(76.923).epsilon(1e-4));
  CHECK(swap_discounted(100.0, 1, 0.3) == 100.0);
  CHECK(swap_discounted(100.0, 0, 0.3) == 100.0);
  CHECK(swap_discounted(100.0, 3, 0.3) == doctest::Approx(100.0 / 1.6));
}

TEST_CASE("two-cell heavy-hex device") {
  const auto dev = heavy_hex_two_cell();
  CHECK(dev.nodes == 23);
  CHECK(dev.edges.size() == 24);
  CHECK(connected(23, dev.edges));
  const auto j = device_to_json(dev);
  CHECK(device_to_json(device_from_json(j)) == j);
  const auto file = device_from_json(nlohmann::json::parse(std::ifstream(std::string(PCEFOLD_DATA_DIR) + "/heavy_hex_two_cell.json")));
  CHECK(file.edges == dev.edges);
}

TEST_CASE("hardware-aware selection on the two-cell device") {
  const auto dev = heavy_hex_two_cell();
  std::vector<int> subset(23);
  std::iota(subset.begin(), subset.end(), 0);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto imp = random_importance(23, seed);
    const auto pairs = hardware_aware_select(imp, dev, subset, 0.3);
    CHECK(pairs.size() == 24);
    for (const auto& p : pairs) CHECK(dev.has_edge(subset[p.a], subset[p.b]));
    PairList tree(pairs.begin(), pairs.begin() + 22);
    CHECK(connected(23, tree));
  }
  // relabelled subset: output is still native under the mapping
  std::vector<int> shuffled = subset;
  std::mt19937_64 rng(2);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const auto pairs = hardware_aware_select(random_importance(23, 9), dev, shuffled, 0.3);
  CHECK(pairs.size() == 24);
  for (const auto& p : pairs) CHECK(dev.has_edge(shuffled[p.a], shuffled[p.b]));
  try {
    hardware_aware_select(random_importance(2, 0), dev, {0, 99}, 0.3);
    FAIL("expected SubsetNotInDevice");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SubsetNotInDevice);
  }
}

TEST_CASE("hardware-aware selection bridges a disconnected native subgraph") {
  const auto dev = heavy_hex_two_cell();
  // nodes 0,1 adjacent; 5 and 9 isolated from them and each other
  const std::vector<int> subset{0, 1, 5, 9};
  PairImportance imp(4);
  for (const auto& p : imp.pairs()) imp.set(p.a, p.b, 1.0);
  const auto pairs = hardware_aware_select(imp, dev, subset, 0.3);
  CHECK(pairs.size() == 3);
  CHECK(connected(4, pairs));
}

TEST_CASE("with all pairs native the discount is inert") {
  DeviceGraph full;
  full.nodes = 5;
  for (int a = 0; a < 5; ++a)
    for (int b = a + 1; b < 5; ++b) full.edges.emplace_back(a, b);
  const auto imp = random_importance(5, 4);
  const std::vector<int> subset{0, 1, 2, 3, 4};
  const auto hw = hardware_aware_select(imp, full, subset, 0.3);
  const auto k = select_topology(Topology::InformedK, 5, imp, 0);
  CHECK(std::equal(k.begin(), k.end(), hw.begin()));
  CHECK(hw.size() == 10);
}

TEST_CASE("edge colouring") {
  const PairList path{{0, 1}, {1, 2}, {2, 3}};
  CHECK(edge_color(path).size() == 2);

  const auto dev = heavy_hex_two_cell();
  const auto layers = edge_color(dev.edges);
  REQUIRE(layers.size() == 3);
  for (const auto& l : layers) CHECK(l.size() == 8);

  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 3 + trial % 9;
    PairList edges;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (rng() % 3 == 0) edges.emplace_back(a, b);
    if (edges.empty()) continue;
    std::shuffle(edges.begin(), edges.end(), rng);
    const auto col = edge_color(edges);
    std::vector<int> degree(n, 0);
    for (const auto& e : edges) {
      ++degree[e.a];
      ++degree[e.b];
    }
    CHECK(static_cast<int>(col.size()) <= *std::max_element(degree.begin(), degree.end()) + 1);
    std::multiset<QubitPair> all;
    for (const auto& layer : col) {
      std::set<int> used;
      for (const auto& e : layer) {
        CHECK(used.insert(e.a).second);
        CHECK(used.insert(e.b).second);
        all.insert(e);
      }
      // input order preserved inside each sublayer
      std::vector<std::size_t> pos;
      for (const auto& e : layer) pos.push_back(std::find(edges.begin(), edges.end(), e) - edges.begin());
      CHECK(std::is_sorted(pos.begin(), pos.end()));
    }
    CHECK(all == std::multiset<QubitPair>(edges.begin(), edges.end()));
  }
  try {
    edge_color({{0, 1}, {0, 1}});
    FAIL("expected InvalidPair");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidPair);
  }
}

TEST_CASE("annealed relabelling") {
  const auto dev = heavy_hex_two_cell();
  std::vector<int> subset(23);
  std::iota(subset.begin(), subset.end(), 0);
  // one dominant pair on non-adjacent physical nodes under the identity
  PairImportance focus(23);
  focus.set(0, 11, 0.0);
  focus.set(3, 17, 50.0);
  const auto r = anneal_relabel(focus, dev, subset, {}, 1);
  CHECK(dev.has_edge(r.placement[3], r.placement[17]));
  CHECK(r.score >= r.initial_score);
  CHECK(std::is_sorted(r.best_trace.begin(), r.best_trace.end()));
  CHECK(r.score == doctest::Approx(placement_score(focus, dev, r.placement)));

  const auto imp = random_importance(23, 12);
  const auto a = anneal_relabel(imp, dev, subset, {}, 5);
  const auto b = anneal_relabel(imp, dev, subset, {}, 5);
  CHECK(a.placement == b.placement);
  CHECK(a.score >= a.initial_score);
  CHECK(a.score <= importance_ceiling(imp, 24) + 1e-9);
  CHECK(std::set<int>(a.placement.begin(), a.placement.end()).size() == 23);
}

TEST_CASE("circuit layout") {
  const PairList pairs{{0, 1}, {1, 2}};
  CHECK(build_circuit(3, 2, {pairs}).param_count() == 5);
  const auto deep = build_circuit(3, 10, {pairs});
  CHECK(deep.param_count() == 21);
  for (const auto& l : deep.layers) CHECK(l.flattened() == pairs);
  CHECK(CircuitSpec::theta_index(1) == 2);
  CHECK(CircuitSpec::phi_index(1) == 3);
  const auto coloured = build_circuit(3, 1, {pairs}, true);
  CHECK(coloured.layers[0].sublayers.size() == 2);
  try {
    build_circuit(2, 1, {{{0, 2}}});
    FAIL("expected InvalidPair");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidPair);
  }
  const auto j = circuit_to_json(deep);
  CHECK(j.at("param_count") == 21);
}
