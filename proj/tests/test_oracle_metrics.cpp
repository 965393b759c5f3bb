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
#include <filesystem>
#include <map>

#include "doctest.h"
#include "support.hpp"

using namespace pcefold;
using namespace testing_support;

TEST_CASE("oracle trivial cases") {
  RelationSets none;
  const QuboInstance sep(4, {-1.0, 0, 0, 0, 0, 2.0, 0, 0, 0, 0, -0.5, 0, 0, 0, 0, 0.0}, none);
  const auto r = exact_solve(sep, 1000);
  CHECK(r.bits == Bits{1, 0, 1, 0});
  CHECK(r.proved_optimal);

  RelationSets edge;
  edge.conflicts = {{0, 1}};
  const QuboInstance pick(2, {-5.0, 20.0, 20.0, -3.0}, edge);
  CHECK(exact_solve(pick, 100).bits == Bits{1, 0});
  try {
    exact_solve(pick, 0);
    FAIL("expected InvalidArgument");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidArgument);
  }
}

TEST_CASE("oracle equals feasible-restricted enumeration") {
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 4 + trial % 17;
    const double density = 0.1 + 0.1 * (trial % 8);
    const auto inst = random_instance(m, density, 7000 + trial);
    const auto ex = m <= 10 ? enumerate_all(inst) : gray_feasible_optimum(inst);
    const auto r = exact_solve(inst, 10'000'000);
    CHECK(r.proved_optimal);
    CHECK(is_feasible(inst, r.bits));
    CHECK(r.energy == doctest::Approx(ex.best_feasible).epsilon(1e-9));
  }
}

TEST_CASE("Gray-code walk agrees with direct enumeration") {
  for (int trial = 0; trial < 30; ++trial) {
    const auto inst = random_instance(5 + trial % 8, 0.4, 6100 + trial);
    const auto a = enumerate_all(inst);
    const auto b = gray_feasible_optimum(inst);
    CHECK(b.best_feasible == doctest::Approx(a.best_feasible).epsilon(1e-12));
    CHECK(b.best_infeasible == doctest::Approx(a.best_infeasible).epsilon(1e-12));
  }
}

TEST_CASE("oracle bound is admissible on sampled subtrees") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const auto inst = random_instance(12, 0.5, 8000 + trial);
    detail::BranchAndBound bb(inst, 1000);
    // random partial selection S (independent) and remaining set R
    Bits s(inst.m(), 0);
    for (std::size_t i = 0; i < inst.m(); ++i)
      if (rng() % 4 == 0) {
        s[i] = 1;
        if (!independent(inst, s)) s[i] = 0;
      }
    std::vector<int> r;
    std::vector<double> d;
    for (std::size_t i = 0; i < inst.m(); ++i) {
      if (s[i] || rng() % 3 == 0) continue;
      bool free = true;
      for (std::size_t j = 0; j < inst.m(); ++j) free &= !(s[j] && inst.conflicts(i, j));
      if (!free) continue;
      r.push_back(static_cast<int>(i));
      double delta = inst.q(i, i);
      for (std::size_t j = 0; j < inst.m(); ++j)
        if (s[j]) delta += 2.0 * inst.q(i, j);
      d.push_back(delta);
    }
    const double e_s = qubo_energy(inst, s);
    const double bound = bb.bound(r, d, e_s);
    // best completion by enumerating subsets of R
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << r.size()); ++mask) {
      Bits x = s;
      for (std::size_t k = 0; k < r.size(); ++k)
        if ((mask >> k) & 1u) x[r[k]] = 1;
      if (!independent(inst, x)) continue;
      best = std::min(best, qubo_energy(inst, x));
    }
    CHECK(bound <= best + 1e-9);
  }
}

TEST_CASE("oracle optima of the simulator benchmarks") {
  // minima confirmed with an external MILP solver for the bundled table
  const std::map<int, double> optimum{{50, -18.183},       {80, -25.365},       {120, -29.32875},
                                      {152, -35.92776316}, {195, -32.26807692}, {240, -46.5314375}};
  const auto table = default_stacking_table();
  for (const auto& [id, e] : optimum) {
    CAPTURE(id);
    const auto inst = build_qubo(load_sequence(std::string(PCEFOLD_DATA_DIR) + "/seq_" + std::to_string(id) + ".fa"), table);
    const auto r = exact_solve(inst, 10'000'000);
    CHECK(r.proved_optimal);
    CHECK(r.energy == doctest::Approx(e).epsilon(1e-8));
  }
}

TEST_CASE("oracle node budget and cache") {
  const auto inst = build_qubo(load_sequence(std::string(PCEFOLD_DATA_DIR) + "/seq_120.fa"), default_stacking_table());
  const auto capped = exact_solve(inst, 3);
  CHECK_FALSE(capped.proved_optimal);
  CHECK(capped.nodes_explored <= 4);
  CHECK(is_feasible(inst, capped.bits));

  const auto dir = std::filesystem::temp_directory_path() / "pcefold_oracle_cache_test";
  std::filesystem::remove_all(dir);
  const auto first = cached_exact_solve(inst, dir, 1'000'000);
  CHECK(first.proved_optimal);
  CHECK(std::distance(std::filesystem::directory_iterator(dir), std::filesystem::directory_iterator{}) == 1);
  const auto second = cached_exact_solve(inst, dir, 1'000'000);
  CHECK(second.bits == first.bits);
  CHECK(second.nodes_explored == first.nodes_explored);
  std::filesystem::remove_all(dir);
}

TEST_CASE("gap_percent") {
  CHECK(gap_percent(-100.0, -100.0) == 0.0);
  CHECK(gap_percent(-99.0, -100.0) == doctest::Approx(1.0));
  CHECK(gap_percent(-18.183, -18.183) == 0.0);
  try {
    gap_percent(1.0, 0.0);
    FAIL("expected ZeroOptimum");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ZeroOptimum);
  }
  try {
    gap_percent(-101.0, -100.0);
    FAIL("expected BelowOptimum");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::BelowOptimum);
  }
}

TEST_CASE("Wilson interval") {
  const auto [lo0, hi0] = wilson_ci(0, 20);
  CHECK(lo0 == 0.0);
  CHECK(hi0 == doctest::Approx(0.161).epsilon(1e-3 / 0.161));
  const auto [lo1, hi1] = wilson_ci(20, 20);
  CHECK(lo1 == doctest::Approx(0.839).epsilon(1e-3 / 0.839));
  CHECK(hi1 == 1.0);
  const auto [lo2, hi2] = wilson_ci(10, 20);
  CHECK(lo2 < 0.5);
  CHECK(hi2 > 0.5);
  for (int n = 1; n <= 60; ++n)
    for (int k = 0; k <= n; ++k) {
      const auto [lo, hi] = wilson_ci(k, n);
      const auto [rlo, rhi] = wilson_reference(k, n);
      CHECK(lo == doctest::Approx(std::max(0.0, rlo)).epsilon(1e-12));
      CHECK(hi == doctest::Approx(std::min(1.0, rhi)).epsilon(1e-12));
      const double p = static_cast<double>(k) / n;
      CHECK(lo <= p + 1e-15);
      CHECK(hi >= p - 1e-15);
    }
  try {
    wilson_ci(3, 2);
    FAIL("expected InvalidCounts");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidCounts);
  }
}

TEST_CASE("summarize") {
  const std::vector<double> zeros{0, 0, 0, 0};
  const auto a = summarize(zeros);
  CHECK(a.p_below == 1.0);
  CHECK(a.median_gap == 0.0);
  const std::vector<double> two{0.5, 2.0};
  const auto b = summarize(two);
  CHECK(b.p_below == 0.5);
  CHECK(b.median_gap == doctest::Approx(1.25));
  // the threshold is strict
  const std::vector<double> edge{1.0};
  CHECK(summarize(edge).p_below == 0.0);
  try {
    summarize(std::vector<double>{});
    FAIL("expected EmptyInput");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptyInput);
  }

  std::mt19937_64 rng(2);
  std::exponential_distribution<double> gapdist(0.5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(1 + rng() % 40);
    for (auto& x : v) x = gapdist(rng);
    const auto m = summarize(v);
    CHECK(m.median_gap == doctest::Approx(quantile_reference(v, 0.5)).epsilon(1e-12));
    CHECK(m.iqr_lo == doctest::Approx(quantile_reference(v, 0.25)).epsilon(1e-12));
    CHECK(m.iqr_hi == doctest::Approx(quantile_reference(v, 0.75)).epsilon(1e-12));
    CHECK(m.wilson_lo <= m.p_below);
    CHECK(m.p_below <= m.wilson_hi);
    CHECK(m.wilson_lo >= 0.0);
    CHECK(m.wilson_hi <= 1.0);
  }
}
