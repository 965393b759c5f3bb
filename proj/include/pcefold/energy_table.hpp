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

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "json.hpp"

#include "pcefold/error.hpp"

namespace pcefold {

/// Stacked-pair free energies keyed by a four-letter type: outer pair
/// then inner pair, read 5'->3' on the opening strand. "AUGC" is the stack
/// of an A-U pair closing a G-C pair, i.e. 5'-AG-3' / 3'-UC-5'.
class EnergyTable {
 public:
  EnergyTable() = default;
  explicit EnergyTable(std::map<std::string, double> entries)
      : entries_(std::move(entries)) {}

  double at(std::string_view key) const {
    auto it = entries_.find(std::string(key));
    if (it == entries_.end()) {
      throw Error(Errc::MissingEnergyEntry, "no stacking energy for " + std::string(key));
    }
    return it->second;
  }
  bool contains(std::string_view key) const { return entries_.count(std::string(key)) != 0; }
  const std::map<std::string, double>& entries() const { return entries_; }

  nlohmann::json to_json() const { return nlohmann::json(entries_); }

  static EnergyTable from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(Errc::Parse, "energy table must be a JSON object");
    std::map<std::string, double> entries;
    for (const auto& [key, value] : j.items()) {
      if (key.size() != 4) throw Error(Errc::Parse, "energy key must have 4 letters: " + key);
      entries[key] = value.get<double>();
    }
    return EnergyTable(std::move(entries));
  }

  static EnergyTable load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::Io, "cannot open energy table " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::Parse, e.what());
    }
    return from_json(j);
  }

 private:
  std::map<std::string, double> entries_;
};

/// Nearest-neighbour stacking energies (kcal/mol, 37 C). Watson-Crick
/// stacks follow the 2004 nearest-neighbour set; G-U stacks that are
/// destabilising there are floored at -0.5 so every stacked quartet carries
/// a negative energy.
inline EnergyTable default_stacking_table() {
  // Canonical 5'WX3'/3'ZY5' entries as (outer W-Z, inner X-Y); the
  // reverse-strand reading (Y-X outer, Z-W inner) is filled in below.
  static constexpr struct {
    const char* key;
    double dg;
  } kCanonical[] = {
      {"AUAU", -0.93}, {"AUUA", -1.10}, {"UAAU", -1.33}, {"CGUA", -2.08},
      {"CGAU", -2.11}, {"GCUA", -2.24}, {"GCAU", -2.35}, {"CGGC", -2.36},
      {"GCGC", -3.26}, {"GCCG", -3.42},
      {"AUGU", -0.55}, {"AUUG", -1.36}, {"CGGU", -1.41}, {"CGUG", -2.11},
      {"GCGU", -1.53}, {"GCUG", -2.51}, {"GUAU", -1.27}, {"UAGU", -1.00},
      {"GUGU", -0.50}, {"GUUG", -0.50}, {"UGGU", -0.50},
  };
  std::map<std::string, double> entries;
  for (const auto& e : kCanonical) {
    const std::string k = e.key;
    entries[k] = e.dg;
    const std::string mirrored{k[3], k[2], k[1], k[0]};
    entries.emplace(mirrored, e.dg);
  }
  return EnergyTable(std::move(entries));
}

}  // namespace pcefold
