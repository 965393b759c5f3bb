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

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>

#include "json.hpp"

#include "pcefold/error.hpp"
#include "pcefold/rna_qubo.hpp"

namespace pcefold {

inline const char* conflict_rule_name(ConflictRule r) {
  return r == ConflictRule::nested_chain ? "nested_chain" : "pairing_only";
}

inline nlohmann::json qubo_to_json(const QuboInstance& inst) {
  using nlohmann::json;
  json entries = json::array();
  for (std::size_t a = 0; a < inst.m(); ++a) {
    for (std::size_t b = a; b < inst.m(); ++b) {
      const double v = inst.q(a, b);
      if (v != 0.0) entries.push_back({a, b, v});
    }
  }
  json quartets = json::array();
  for (const auto& q : inst.quartets()) quartets.push_back({q.i, q.j});
  json rel = {
      {"conflicts", inst.relations().conflicts},
      {"stackings", inst.relations().stackings},
      {"ua_terminal", inst.relations().ua_terminal},
  };
  return json{
      {"sequence_id", inst.sequence_id()},
      {"sequence", inst.sequence()},
      {"m", inst.m()},
      {"entries", std::move(entries)},
      {"relations", std::move(rel)},
      {"coeffs", {{"r", inst.coeffs().r}, {"p", inst.coeffs().p}, {"t", inst.coeffs().t}}},
      {"quartets", std::move(quartets)},
  };
}

inline QuboInstance qubo_from_json(const nlohmann::json& j) {
  try {
    const std::size_t m = j.at("m").get<std::size_t>();
    std::vector<double> q(m * m, 0.0);
    for (const auto& e : j.at("entries")) {
      const auto a = e.at(0).get<std::size_t>();
      const auto b = e.at(1).get<std::size_t>();
      const double v = e.at(2).get<double>();
      if (a >= m || b >= m) throw Error(Errc::Parse, "entry index out of range");
      q[a * m + b] = v;
      q[b * m + a] = v;
    }
    RelationSets rel;
    const auto& r = j.at("relations");
    rel.conflicts = r.at("conflicts").get<std::vector<std::pair<int, int>>>();
    rel.stackings = r.at("stackings").get<std::vector<std::pair<int, int>>>();
    rel.ua_terminal = r.value("ua_terminal", std::vector<int>{});
    QuboCoeffs c;
    if (j.contains("coeffs")) {
      c.r = j["coeffs"].value("r", 0.0);
      c.p = j["coeffs"].value("p", 0.0);
      c.t = j["coeffs"].value("t", 0.0);
    }
    std::vector<Quartet> quartets;
    if (j.contains("quartets")) {
      for (const auto& qj : j["quartets"]) {
        quartets.push_back({qj.at(0).get<int>(), qj.at(1).get<int>(), static_cast<int>(quartets.size())});
      }
    }
    return QuboInstance(m, std::move(q), std::move(rel), c, std::move(quartets),
                        j.value("sequence_id", std::string("instance")), j.value("sequence", std::string()));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Parse, std::string("malformed QUBO JSON: ") + e.what());
  }
}

inline void save_qubo(const QuboInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::Io, "cannot write " + path);
  out << qubo_to_json(inst).dump(1) << '\n';
}

inline QuboInstance load_qubo(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Parse, e.what());
  }
  return qubo_from_json(j);
}

/// FNV-1a over the canonical JSON dump; stable across runs and platforms.
inline std::uint64_t content_hash(const QuboInstance& inst) {
  const std::string s = qubo_to_json(inst).dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string content_hash_hex(const QuboInstance& inst) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(content_hash(inst)));
  return buf;
}

}  // namespace pcefold
