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
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "pcefold/error.hpp"

namespace pcefold {

enum class Pauli : std::uint8_t { XX, YY, ZZ };

inline const char* pauli_name(Pauli p) {
  switch (p) {
    case Pauli::XX: return "XX";
    case Pauli::YY: return "YY";
    case Pauli::ZZ: return "ZZ";
  }
  return "?";
}

inline Pauli pauli_from_name(const std::string& s) {
  if (s == "XX") return Pauli::XX;
  if (s == "YY") return Pauli::YY;
  if (s == "ZZ") return Pauli::ZZ;
  throw Error(Errc::Parse, "unknown Pauli species " + s);
}

/// Two-body correlator owned by one variable.
struct Slot {
  int a = 0;  // a < b
  int b = 0;
  Pauli species = Pauli::ZZ;

  friend bool operator==(const Slot&, const Slot&) = default;
};

struct EncodingMap {
  int n = 0;
  std::vector<Slot> slots;  // slots[k] encodes variable k

  std::size_t m() const { return slots.size(); }
};

inline long long correlator_capacity(int n) {
  return n < 2 ? 0 : 3LL * n * (n - 1) / 2;
}

/// Smallest n with 3 * C(n, 2) >= m.
inline int min_qubits(long long m) {
  if (m < 1) throw Error(Errc::NonPositiveM, "m must be >= 1");
  int n = 2;
  while (correlator_capacity(n) < m) ++n;
  return n;
}

enum class AssignPolicy { lexicographic, seeded_shuffle };

/// Species-major, then (a, b) lexicographic. seeded_shuffle permutes the
/// full slot list before truncating to m.
inline EncodingMap assign_correlators(long long m, int n, AssignPolicy policy = AssignPolicy::lexicographic,
                                      std::uint64_t seed = 0) {
  if (m < 1) throw Error(Errc::NonPositiveM, "m must be >= 1");
  if (m > correlator_capacity(n)) {
    throw Error(Errc::CapacityExceeded, std::to_string(m) + " variables exceed capacity of " +
                                            std::to_string(n) + " qubits");
  }
  std::vector<Slot> all;
  all.reserve(static_cast<std::size_t>(correlator_capacity(n)));
  for (Pauli sp : {Pauli::XX, Pauli::YY, Pauli::ZZ})
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) all.push_back({a, b, sp});
  if (policy == AssignPolicy::seeded_shuffle) {
    std::mt19937_64 rng(seed);
    // Fisher-Yates with explicit draws so the permutation is library-independent.
    for (std::size_t k = all.size(); k > 1; --k) {
      const std::size_t r = static_cast<std::size_t>(rng() % k);
      std::swap(all[k - 1], all[r]);
    }
  }
  all.resize(static_cast<std::size_t>(m));
  return EncodingMap{n, std::move(all)};
}

inline nlohmann::json encoding_to_json(const EncodingMap& enc) {
  nlohmann::json slots = nlohmann::json::array();
  for (const auto& s : enc.slots) slots.push_back({s.a, s.b, pauli_name(s.species)});
  return {{"n", enc.n}, {"slots", std::move(slots)}};
}

inline EncodingMap encoding_from_json(const nlohmann::json& j) {
  EncodingMap enc;
  enc.n = j.at("n").get<int>();
  for (const auto& s : j.at("slots")) {
    enc.slots.push_back({s.at(0).get<int>(), s.at(1).get<int>(), pauli_from_name(s.at(2).get<std::string>())});
  }
  return enc;
}

}  // namespace pcefold
