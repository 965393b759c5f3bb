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
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pcefold/energy_table.hpp"
#include "pcefold/error.hpp"

namespace pcefold {

/// Binary assignment; one byte per variable, values 0 or 1.
using Bits = std::vector<std::uint8_t>;

struct Sequence {
  std::string id;
  std::string bases;  // over {A, U, C, G}

  std::size_t length() const { return bases.size(); }
};

/// Normalises `text` to an uppercase RNA string. Whitespace is skipped,
/// T is read as U. Positions in errors are 1-based over non-space input.
inline Sequence parse_sequence(std::string_view text, std::string id) {
  Sequence seq;
  seq.id = id.empty() ? "seq" : std::move(id);
  std::size_t pos = 0;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    ++pos;
    char u = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (u == 'T') u = 'U';
    if (u != 'A' && u != 'U' && u != 'C' && u != 'G') {
      throw Error(Errc::IllegalCharacter,
                  std::string("illegal base '") + c + "' at position " + std::to_string(pos), pos);
    }
    seq.bases.push_back(u);
  }
  if (seq.bases.empty()) throw Error(Errc::EmptyInput, "sequence is empty");
  return seq;
}

/// Reads plain or FASTA-like text. Lines starting with '>' open a new record
/// whose id is the rest of the line; text without headers is one record.
inline std::vector<Sequence> parse_sequences(std::string_view text, const std::string& default_id) {
  std::vector<Sequence> out;
  std::string id = default_id;
  std::string body;
  bool have_record = false;
  auto flush = [&] {
    if (have_record || !body.empty()) out.push_back(parse_sequence(body, id));
    body.clear();
  };
  std::istringstream lines{std::string(text)};
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.front() == '>') {
      flush();
      id = line.substr(1);
      while (!id.empty() && std::isspace(static_cast<unsigned char>(id.back()))) id.pop_back();
      while (!id.empty() && std::isspace(static_cast<unsigned char>(id.front()))) id.erase(0, 1);
      if (id.empty()) id = default_id;
      have_record = true;
    } else {
      body += line;
    }
  }
  flush();
  if (out.empty()) throw Error(Errc::EmptyInput, "no sequence found");
  return out;
}

inline Sequence load_sequence(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string stem = path.substr(path.find_last_of("/\\") + 1);
  stem = stem.substr(0, stem.find('.'));
  return parse_sequences(ss.str(), stem.empty() ? "seq" : stem).front();
}

inline bool is_base_pair(char a, char b, bool allow_gu) {
  const auto p = std::string{a, b};
  if (p == "AU" || p == "UA" || p == "CG" || p == "GC") return true;
  return allow_gu && (p == "GU" || p == "UG");
}

/// Two stacked base pairs (i, j) and (i+1, j-1), 1-based.
struct Quartet {
  int i = 0;
  int j = 0;
  int index = 0;

  friend bool operator==(const Quartet&, const Quartet&) = default;
};

inline std::vector<Quartet> enumerate_quartets(const Sequence& seq, int min_hairpin = 3,
                                               bool allow_gu = true) {
  if (min_hairpin < 0) throw Error(Errc::InvalidArgument, "min_hairpin must be >= 0");
  const auto& s = seq.bases;
  const int len = static_cast<int>(s.size());
  std::vector<Quartet> out;
  for (int i = 1; i <= len; ++i) {
    for (int j = i + 1; j <= len; ++j) {
      // unpaired bases strictly inside the inner pair (i+1, j-1)
      const int loop = (j - 1) - (i + 1) - 1;
      if (loop < min_hairpin) continue;
      if (!is_base_pair(s[i - 1], s[j - 1], allow_gu)) continue;
      if (!is_base_pair(s[i], s[j - 2], allow_gu)) continue;
      out.push_back({i, j, static_cast<int>(out.size())});
    }
  }
  return out;
}

/// Which quartet pairs are mutually exclusive.
enum class ConflictRule {
  /// Shared base with different partners, or crossing pairs.
  pairing_only,
  /// pairing_only plus side-by-side quartets: only stacked or strictly nested
  /// quartets may co-occur, so feasible structures are single nested chains.
  /// This reproduces the reference benchmark conflict counts.
  nested_chain,
};

struct RelationSets {
  std::vector<std::pair<int, int>> conflicts;  // a < b
  std::vector<std::pair<int, int>> stackings;  // a < b
  std::vector<int> ua_terminal;
};

namespace detail {

inline bool pairs_clash_or_cross(const Quartet& a, const Quartet& b) {
  const std::pair<int, int> ps[4] = {{a.i, a.j}, {a.i + 1, a.j - 1}, {b.i, b.j}, {b.i + 1, b.j - 1}};
  std::map<int, int> partner;
  for (const auto& [x, y] : ps) {
    for (auto [u, v] : {std::pair{x, y}, std::pair{y, x}}) {
      auto [it, inserted] = partner.emplace(u, v);
      if (!inserted && it->second != v) return true;
    }
  }
  for (const auto& [i, j] : ps) {
    for (const auto& [k, l] : ps) {
      if (i < k && k < j && j < l) return true;
    }
  }
  return false;
}

inline bool side_by_side(const Quartet& a, const Quartet& b) {
  return a.j < b.i || b.j < a.i;
}

}  // namespace detail

/// True if `a` and `b` share the pair (a.i+1, a.j-1) = (b.i, b.j) or vice versa.
inline bool quartets_stack(const Quartet& a, const Quartet& b) {
  return (b.i == a.i + 1 && b.j == a.j - 1) || (a.i == b.i + 1 && a.j == b.j - 1);
}

inline bool quartets_conflict(const Quartet& a, const Quartet& b, ConflictRule rule) {
  if (quartets_stack(a, b)) return false;
  if (detail::pairs_clash_or_cross(a, b)) return true;
  return rule == ConflictRule::nested_chain && detail::side_by_side(a, b);
}

inline RelationSets build_relations(const Sequence& seq, const std::vector<Quartet>& quartets,
                                    ConflictRule rule = ConflictRule::nested_chain) {
  RelationSets rel;
  const std::size_t m = quartets.size();
  for (std::size_t a = 0; a < m; ++a) {
    if (quartets[a].index != static_cast<int>(a)) {
      throw Error(Errc::InvalidArgument, "quartet indices must be dense and ordered");
    }
  }
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      const auto& qa = quartets[a];
      const auto& qb = quartets[b];
      if (quartets_stack(qa, qb)) {
        rel.stackings.emplace_back(static_cast<int>(a), static_cast<int>(b));
      } else if (quartets_conflict(qa, qb, rule)) {
        rel.conflicts.emplace_back(static_cast<int>(a), static_cast<int>(b));
      }
    }
    const auto& q = quartets[a];
    if (q.j <= static_cast<int>(seq.length())) {
      const std::string outer{seq.bases[q.i - 1], seq.bases[q.j - 1]};
      if (outer == "AU" || outer == "UA") rel.ua_terminal.push_back(static_cast<int>(a));
    }
  }
  return rel;
}

struct QuboCoeffs {
  double r = 0.0;  // stacking reward (<= 0)
  double p = 0.0;  // UA-terminal penalty (>= 0)
  double t = 0.0;  // conflict penalty (> 0)
};

/// Dense symmetric QUBO with its relation sets. The energy of x is
/// sum_a Q[a][a] x_a + 2 sum_{a<b} Q[a][b] x_a x_b.
class QuboInstance {
 public:
  QuboInstance() = default;

  QuboInstance(std::size_t m, std::vector<double> q, RelationSets relations, QuboCoeffs coeffs = {},
               std::vector<Quartet> quartets = {}, std::string sequence_id = "instance",
               std::string sequence = "")
      : m_(m),
        q_(std::move(q)),
        relations_(std::move(relations)),
        coeffs_(coeffs),
        quartets_(std::move(quartets)),
        sequence_id_(std::move(sequence_id)),
        sequence_(std::move(sequence)) {
    if (q_.size() != m_ * m_) throw Error(Errc::LengthMismatch, "Q must be m x m");
    for (std::size_t a = 0; a < m_; ++a) {
      for (std::size_t b = a + 1; b < m_; ++b) {
        if (q_[a * m_ + b] != q_[b * m_ + a]) throw Error(Errc::InvalidArgument, "Q is not symmetric");
      }
    }
    if (!quartets_.empty() && quartets_.size() != m_) {
      throw Error(Errc::LengthMismatch, "quartet list does not match m");
    }
    conflict_mask_.assign(m_ * m_, 0);
    conflict_adj_.assign(m_, {});
    stacking_adj_.assign(m_, {});
    auto check = [&](int a, int b) {
      if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= m_ || static_cast<std::size_t>(b) >= m_ || a == b) {
        throw Error(Errc::InvalidArgument, "relation references an invalid variable pair");
      }
    };
    for (auto& [a, b] : relations_.conflicts) {
      check(a, b);
      if (a > b) std::swap(a, b);
      if (conflict_mask_[a * m_ + b]) continue;
      conflict_mask_[a * m_ + b] = conflict_mask_[b * m_ + a] = 1;
      conflict_adj_[a].push_back(b);
      conflict_adj_[b].push_back(a);
    }
    for (auto& [a, b] : relations_.stackings) {
      check(a, b);
      if (a > b) std::swap(a, b);
      if (conflict_mask_[a * m_ + b]) throw Error(Errc::InvalidArgument, "pair is both stacking and conflict");
      stacking_adj_[a].push_back(b);
      stacking_adj_[b].push_back(a);
    }
    for (int a : relations_.ua_terminal) {
      if (a < 0 || static_cast<std::size_t>(a) >= m_) throw Error(Errc::InvalidArgument, "bad UA-terminal id");
    }
    for (auto& adj : conflict_adj_) std::sort(adj.begin(), adj.end());
    for (auto& adj : stacking_adj_) std::sort(adj.begin(), adj.end());
  }

  std::size_t m() const { return m_; }
  double q(std::size_t a, std::size_t b) const { return q_[a * m_ + b]; }
  std::span<const double> row(std::size_t a) const { return {q_.data() + a * m_, m_}; }
  const std::vector<double>& matrix() const { return q_; }
  const RelationSets& relations() const { return relations_; }
  const QuboCoeffs& coeffs() const { return coeffs_; }
  const std::vector<Quartet>& quartets() const { return quartets_; }
  const std::string& sequence_id() const { return sequence_id_; }
  const std::string& sequence() const { return sequence_; }

  bool conflicts(std::size_t a, std::size_t b) const { return conflict_mask_[a * m_ + b] != 0; }
  std::span<const int> conflict_neighbors(std::size_t a) const { return conflict_adj_[a]; }
  std::span<const int> stacking_neighbors(std::size_t a) const { return stacking_adj_[a]; }

  /// Edge density of the conflict graph.
  double conflict_density() const {
    if (m_ < 2) return 0.0;
    return static_cast<double>(relations_.conflicts.size()) / (0.5 * static_cast<double>(m_ * (m_ - 1)));
  }

 private:
  std::size_t m_ = 0;
  std::vector<double> q_;
  RelationSets relations_;
  QuboCoeffs coeffs_;
  std::vector<Quartet> quartets_;
  std::string sequence_id_;
  std::string sequence_;
  std::vector<std::uint8_t> conflict_mask_;
  std::vector<std::vector<int>> conflict_adj_;
  std::vector<std::vector<int>> stacking_adj_;
};

struct AssemblyOptions {
  std::optional<double> r;  // default -0.5 * mean |e_q|
  double p = 0.0;
  std::optional<double> t;  // default: penalty-dominance bound
};

/// "AUGC" style key of a quartet's stacked-pair type.
inline std::string stack_key(const Sequence& seq, const Quartet& q) {
  const auto& s = seq.bases;
  return {s[q.i - 1], s[q.j - 1], s[q.i], s[q.j - 2]};
}

/// Conflict penalty that makes any single violation cost more than the best
/// reachable reward: sum |e_q| + |r| |QS| + p |QUA| (m - 1) + 1.
inline double default_penalty(std::span<const double> energies, double r, std::size_t n_stackings, double p = 0.0,
                              std::size_t n_ua = 0) {
  double sum = 0.0;
  for (double e : energies) sum += std::abs(e);
  const double m = static_cast<double>(energies.size());
  return sum + std::abs(r) * static_cast<double>(n_stackings) +
         p * static_cast<double>(n_ua) * std::max(m - 1.0, 0.0) + 1.0;
}

inline QuboInstance assemble_qubo(const Sequence& seq, const std::vector<Quartet>& quartets,
                                  const RelationSets& relations, const EnergyTable& table,
                                  const AssemblyOptions& opts = {}) {
  const std::size_t m = quartets.size();
  std::vector<double> energies(m);
  for (std::size_t a = 0; a < m; ++a) energies[a] = table.at(stack_key(seq, quartets[a]));

  double mean_abs = 0.0;
  for (double e : energies) mean_abs += std::abs(e);
  if (m > 0) mean_abs /= static_cast<double>(m);

  QuboCoeffs c;
  c.r = opts.r.value_or(-0.5 * mean_abs);
  c.p = opts.p;
  if (c.r > 0.0) throw Error(Errc::InvalidCoefficient, "stacking reward r must be <= 0");
  if (c.p < 0.0) throw Error(Errc::InvalidCoefficient, "UA penalty p must be >= 0");
  c.t = opts.t.value_or(
      default_penalty(energies, c.r, relations.stackings.size(), c.p, relations.ua_terminal.size()));
  if (!(c.t > 0.0)) throw Error(Errc::NonPositivePenalty, "conflict penalty t must be > 0");

  std::vector<double> q(m * m, 0.0);
  auto add_pair = [&](std::size_t a, std::size_t b, double total) {
    q[a * m + b] += total / 2.0;
    q[b * m + a] += total / 2.0;
  };
  for (std::size_t a = 0; a < m; ++a) q[a * m + a] = energies[a];
  for (const auto& [a, b] : relations.stackings) add_pair(a, b, c.r);
  if (c.p != 0.0) {
    // p * sum_{a in Q} sum_{b in QUA} x_a (1 - x_b), expanded literally.
    const double n_ua = static_cast<double>(relations.ua_terminal.size());
    for (std::size_t a = 0; a < m; ++a) q[a * m + a] += c.p * n_ua;
    for (int b : relations.ua_terminal) {
      for (std::size_t a = 0; a < m; ++a) {
        if (a == static_cast<std::size_t>(b)) {
          q[a * m + a] -= c.p;
        } else {
          add_pair(a, b, -c.p);
        }
      }
    }
  }
  for (const auto& [a, b] : relations.conflicts) add_pair(a, b, c.t);

  // Exact symmetry: half-weights were added pairwise, but guard rounding
  // from accumulation order by mirroring the upper triangle.
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b) q[b * m + a] = q[a * m + b];

  return QuboInstance(m, std::move(q), relations, c, quartets, seq.id, seq.bases);
}

struct BuildOptions {
  int min_hairpin = 3;
  bool allow_gu = true;
  ConflictRule rule = ConflictRule::nested_chain;
  AssemblyOptions coeffs;
};

inline QuboInstance build_qubo(const Sequence& seq, const EnergyTable& table, const BuildOptions& opts = {}) {
  auto quartets = enumerate_quartets(seq, opts.min_hairpin, opts.allow_gu);
  auto relations = build_relations(seq, quartets, opts.rule);
  return assemble_qubo(seq, quartets, relations, table, opts.coeffs);
}

inline double qubo_energy(const QuboInstance& inst, std::span<const std::uint8_t> x) {
  const std::size_t m = inst.m();
  if (x.size() != m) throw Error(Errc::LengthMismatch, "bitstring length differs from m");
  double e = 0.0;
  for (std::size_t a = 0; a < m; ++a) {
    if (!x[a]) continue;
    const auto row = inst.row(a);
    e += row[a];
    for (std::size_t b = a + 1; b < m; ++b) {
      if (x[b]) e += 2.0 * row[b];
    }
  }
  return e;
}

inline bool is_feasible(const QuboInstance& inst, std::span<const std::uint8_t> x) {
  if (x.size() != inst.m()) throw Error(Errc::LengthMismatch, "bitstring length differs from m");
  for (const auto& [a, b] : inst.relations().conflicts) {
    if (x[a] && x[b]) return false;
  }
  return true;
}

inline std::string to_dot_bracket(const QuboInstance& inst, std::span<const std::uint8_t> x) {
  if (!is_feasible(inst, x)) throw Error(Errc::InfeasibleInput, "cannot render an infeasible assignment");
  const auto& qs = inst.quartets();
  if (qs.size() != inst.m()) throw Error(Errc::InvalidArgument, "instance carries no quartet metadata");
  std::size_t len = inst.sequence().size();
  for (const auto& q : qs) len = std::max(len, static_cast<std::size_t>(q.j));
  std::string out(len, '.');
  for (std::size_t a = 0; a < inst.m(); ++a) {
    if (!x[a]) continue;
    const auto& q = qs[a];
    out[q.i - 1] = '(';
    out[q.i] = '(';
    out[q.j - 1] = ')';
    out[q.j - 2] = ')';
  }
  return out;
}

/// 1-based (i, j) pairs of a dot-bracket string, sorted by i.
inline std::vector<std::pair<int, int>> parse_dot_bracket(std::string_view db) {
  std::vector<std::pair<int, int>> pairs;
  std::vector<int> stack;
  for (std::size_t k = 0; k < db.size(); ++k) {
    const int pos = static_cast<int>(k) + 1;
    if (db[k] == '(') {
      stack.push_back(pos);
    } else if (db[k] == ')') {
      if (stack.empty()) throw Error(Errc::Parse, "unbalanced ')' at " + std::to_string(pos));
      pairs.emplace_back(stack.back(), pos);
      stack.pop_back();
    } else if (db[k] != '.') {
      throw Error(Errc::Parse, "unexpected character in dot-bracket");
    }
  }
  if (!stack.empty()) throw Error(Errc::Parse, "unbalanced '('");
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

}  // namespace pcefold
