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
#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "pcefold/ansatz.hpp"
#include "pcefold/decode.hpp"
#include "pcefold/encoding.hpp"
#include "pcefold/energy_table.hpp"
#include "pcefold/error.hpp"
#include "pcefold/metrics.hpp"
#include "pcefold/oracle.hpp"
#include "pcefold/qubo_io.hpp"
#include "pcefold/rna_qubo.hpp"
#include "pcefold/train.hpp"

namespace pcefold {

inline constexpr int kSchemaVersion = 1;

enum class Condition { trained, untrained, random_ev };
enum class DecoderKind { sign, sign_ls, pagd };

inline const char* condition_name(Condition c) {
  switch (c) {
    case Condition::trained:
      return "trained";
    case Condition::untrained:
      return "untrained";
    case Condition::random_ev:
      return "random_ev";
  }
  return "?";
}

inline Condition condition_from_name(const std::string& s) {
  if (s == "trained") return Condition::trained;
  if (s == "untrained") return Condition::untrained;
  if (s == "random_ev" || s == "random") return Condition::random_ev;
  throw Error(Errc::InvalidArgument, "unknown condition '" + s + "'");
}

inline const char* decoder_name(DecoderKind d) {
  switch (d) {
    case DecoderKind::sign:
      return "sign";
    case DecoderKind::sign_ls:
      return "sign_ls";
    case DecoderKind::pagd:
      return "pagd";
  }
  return "?";
}

inline DecoderKind decoder_from_name(const std::string& s) {
  if (s == "sign") return DecoderKind::sign;
  if (s == "sign_ls" || s == "sign+ls") return DecoderKind::sign_ls;
  if (s == "pagd") return DecoderKind::pagd;
  throw Error(Errc::InvalidArgument, "unknown decoder '" + s + "'");
}

/// Circuit depth by instance size.
inline int default_depth(std::size_t m) {
  if (m <= 120) return 2;
  if (m <= 152) return 4;
  if (m <= 240) return 6;
  return 10;
}

struct ExperimentManifest {
  std::string sequence_path;  // one of sequence_path / qubo_path
  std::string qubo_path;
  std::string energy_table_path;  // empty: bundled table
  BuildOptions build;

  Topology topology = Topology::InformedK;
  std::optional<int> depth;   // default_depth(m) when unset
  std::optional<int> qubits;  // min_qubits(m) when unset
  std::string device_graph_path;  // non-empty: hardware-aware pair selection
  double lambda = 0.3;
  int anneal_steps = 5000;

  std::vector<std::uint64_t> seeds;
  TrainConfig train;
  DecodeParams decode;
  std::vector<int> k_list{1, 10, 100};
  std::vector<Condition> conditions{Condition::trained};
  std::vector<DecoderKind> decoders{DecoderKind::sign, DecoderKind::sign_ls, DecoderKind::pagd};

  std::string out_dir;
  int workers = 1;
  long long node_limit = 50'000'000;

  ExperimentManifest() {
    for (std::uint64_t s = 0; s < 20; ++s) seeds.push_back(s);
  }

  void validate() const {
    if (sequence_path.empty() == qubo_path.empty()) {
      throw Error(Errc::InvalidArgument, "give exactly one of a sequence or a QUBO file");
    }
    if (seeds.empty()) throw Error(Errc::InvalidArgument, "seed list is empty");
    if (k_list.empty()) throw Error(Errc::InvalidArgument, "K list is empty");
    for (int k : k_list)
      if (k < 1) throw Error(Errc::InvalidArgument, "K values must be >= 1");
    if (depth && *depth < 1) throw Error(Errc::InvalidArgument, "depth p must be >= 1");
    if (conditions.empty()) throw Error(Errc::InvalidArgument, "no conditions selected");
    if (decoders.empty()) throw Error(Errc::InvalidArgument, "no decoders selected");
    if (workers < 1) throw Error(Errc::InvalidArgument, "workers must be >= 1");
    if (node_limit < 1) throw Error(Errc::InvalidArgument, "node_limit must be >= 1");
    decode.validate();
  }
};

inline nlohmann::json manifest_to_json(const ExperimentManifest& m) {
  using nlohmann::json;
  json j;
  if (!m.sequence_path.empty()) j["sequence"] = m.sequence_path;
  if (!m.qubo_path.empty()) j["qubo"] = m.qubo_path;
  if (!m.energy_table_path.empty()) j["energy_table"] = m.energy_table_path;
  j["min_hairpin"] = m.build.min_hairpin;
  j["allow_gu"] = m.build.allow_gu;
  j["conflict_rule"] = conflict_rule_name(m.build.rule);
  j["topology"] = topology_name(m.topology);
  if (m.depth) j["depth"] = *m.depth;
  if (m.qubits) j["qubits"] = *m.qubits;
  if (!m.device_graph_path.empty()) j["device_graph"] = m.device_graph_path;
  j["lambda"] = m.lambda;
  j["anneal_steps"] = m.anneal_steps;
  j["seeds"] = m.seeds;
  j["train"] = {{"alpha", m.train.alpha},
                {"iters", m.train.max_iters},
                {"optimizer", m.train.optimizer == OptimizerKind::nelder_mead ? "nelder_mead" : "trust_region_linear"},
                {"loss", m.train.loss == LossKind::ising_tanh ? "ising_tanh" : "qubo_sigmoid"},
                {"sampled", m.train.sampled},
                {"shots", m.train.shots}};
  j["decode"] = {{"alpha", m.decode.alpha},
                 {"beta", m.decode.beta},
                 {"sigma_noise", m.decode.sigma_noise},
                 {"t_ls", m.decode.t_ls}};
  j["k_list"] = m.k_list;
  json conds = json::array();
  for (auto c : m.conditions) conds.push_back(condition_name(c));
  j["conditions"] = conds;
  json decs = json::array();
  for (auto d : m.decoders) decs.push_back(decoder_name(d));
  j["decoders"] = decs;
  if (!m.out_dir.empty()) j["out"] = m.out_dir;
  j["workers"] = m.workers;
  j["node_limit"] = m.node_limit;
  return j;
}

inline ExperimentManifest manifest_from_json(const nlohmann::json& j) {
  ExperimentManifest m;
  try {
    m.sequence_path = j.value("sequence", "");
    m.qubo_path = j.value("qubo", "");
    m.energy_table_path = j.value("energy_table", "");
    m.build.min_hairpin = j.value("min_hairpin", m.build.min_hairpin);
    m.build.allow_gu = j.value("allow_gu", m.build.allow_gu);
    if (j.contains("conflict_rule")) {
      const auto r = j["conflict_rule"].get<std::string>();
      if (r == "pairing_only") {
        m.build.rule = ConflictRule::pairing_only;
      } else if (r == "nested_chain") {
        m.build.rule = ConflictRule::nested_chain;
      } else {
        throw Error(Errc::Parse, "unknown conflict rule '" + r + "'");
      }
    }
    if (j.contains("topology")) m.topology = topology_from_name(j["topology"].get<std::string>());
    if (j.contains("depth")) m.depth = j["depth"].get<int>();
    if (j.contains("qubits")) m.qubits = j["qubits"].get<int>();
    m.device_graph_path = j.value("device_graph", "");
    m.lambda = j.value("lambda", m.lambda);
    m.anneal_steps = j.value("anneal_steps", m.anneal_steps);
    if (j.contains("seeds")) m.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    if (j.contains("train")) {
      const auto& t = j["train"];
      m.train.alpha = t.value("alpha", m.train.alpha);
      m.train.max_iters = t.value("iters", m.train.max_iters);
      if (t.value("optimizer", "trust_region_linear") == "nelder_mead") m.train.optimizer = OptimizerKind::nelder_mead;
      if (t.value("loss", "qubo_sigmoid") == "ising_tanh") m.train.loss = LossKind::ising_tanh;
      m.train.sampled = t.value("sampled", m.train.sampled);
      m.train.shots = t.value("shots", m.train.shots);
    }
    if (j.contains("decode")) {
      const auto& d = j["decode"];
      m.decode.alpha = d.value("alpha", m.decode.alpha);
      m.decode.beta = d.value("beta", m.decode.beta);
      m.decode.sigma_noise = d.value("sigma_noise", m.decode.sigma_noise);
      m.decode.t_ls = d.value("t_ls", m.decode.t_ls);
    }
    if (j.contains("k_list")) m.k_list = j["k_list"].get<std::vector<int>>();
    if (j.contains("conditions")) {
      m.conditions.clear();
      for (const auto& c : j["conditions"]) m.conditions.push_back(condition_from_name(c.get<std::string>()));
    }
    if (j.contains("decoders")) {
      m.decoders.clear();
      for (const auto& d : j["decoders"]) m.decoders.push_back(decoder_from_name(d.get<std::string>()));
    }
    m.out_dir = j.value("out", "");
    m.workers = j.value("workers", m.workers);
    m.node_limit = j.value("node_limit", m.node_limit);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Parse, std::string("manifest: ") + e.what());
  }
  return m;
}

inline ExperimentManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open manifest " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Parse, e.what());
  }
  return manifest_from_json(j);
}

/// Everything fixed before the per-seed runs: instance, encoding, circuit,
/// reference optimum.
struct PreparedExperiment {
  QuboInstance inst;
  EncodingMap enc;
  CircuitSpec spec;
  PairList pairs;
  std::optional<AnnealResult> placement;
  OracleResult oracle;
};

inline QuboInstance load_instance(const ExperimentManifest& man) {
  if (!man.qubo_path.empty()) return load_qubo(man.qubo_path);
  const Sequence seq = load_sequence(man.sequence_path);
  const EnergyTable table =
      man.energy_table_path.empty() ? default_stacking_table() : EnergyTable::load(man.energy_table_path);
  return build_qubo(seq, table, man.build);
}

/// First n device nodes in breadth-first order from node 0.
inline std::vector<int> connected_subset(const DeviceGraph& dev, int n) {
  if (n > dev.nodes) throw Error(Errc::SubsetNotInDevice, "device has fewer nodes than qubits");
  const auto adj = dev.adjacency();
  std::vector<int> order{0};
  std::vector<char> seen(dev.nodes, 0);
  seen[0] = 1;
  for (std::size_t h = 0; h < order.size() && static_cast<int>(order.size()) < n; ++h)
    for (int v : adj[order[h]])
      if (!seen[v]) {
        seen[v] = 1;
        order.push_back(v);
      }
  for (int v = 0; static_cast<int>(order.size()) < n && v < dev.nodes; ++v)
    if (!seen[v]) {
      seen[v] = 1;
      order.push_back(v);
    }
  order.resize(n);
  return order;
}

inline PreparedExperiment prepare_experiment(const ExperimentManifest& man, const OracleResult* known_oracle = nullptr) {
  man.validate();
  QuboInstance inst = load_instance(man);
  if (inst.m() == 0) throw Error(Errc::EmptyInput, "instance has no quartet variables");
  const int n = man.qubits.value_or(min_qubits(static_cast<long long>(inst.m())));
  EncodingMap enc = assign_correlators(static_cast<long long>(inst.m()), n);
  const PairImportance imp = importance_scores(inst, enc);
  const int p = man.depth.value_or(default_depth(inst.m()));

  PreparedExperiment out{std::move(inst), std::move(enc), {}, {}, std::nullopt, {}};
  if (!man.device_graph_path.empty()) {
    std::ifstream in(man.device_graph_path);
    if (!in) throw Error(Errc::Io, "cannot open device graph " + man.device_graph_path);
    nlohmann::json j;
    in >> j;
    const DeviceGraph dev = device_from_json(j);
    AnnealConfig cfg;
    cfg.steps = man.anneal_steps;
    auto placed = anneal_relabel(imp, dev, connected_subset(dev, n), cfg, 0);
    out.pairs = hardware_aware_select(imp, dev, placed.placement, man.lambda);
    out.placement = std::move(placed);
    out.spec = build_circuit(n, p, {out.pairs}, true);
  } else {
    out.pairs = select_topology(man.topology, n, imp, 0);
    out.spec = build_circuit(n, p, {out.pairs}, false);
  }

  if (known_oracle) {
    out.oracle = *known_oracle;
  } else if (!man.out_dir.empty()) {
    out.oracle = cached_exact_solve(out.inst, std::filesystem::path(man.out_dir) / "oracle_cache", man.node_limit);
  } else {
    out.oracle = exact_solve(out.inst, man.node_limit);
  }
  return out;
}

struct RunRecord {
  std::uint64_t seed = 0;
  Condition condition = Condition::trained;
  DecoderKind decoder = DecoderKind::pagd;
  int k = 1;
  std::string bits;
  double energy = 0.0;
  std::optional<double> gap;
  bool feasible = true;
  bool vs_incumbent = false;
  std::string loss_csv;
  double wall_ms = 0.0;
};

struct MetricsRow {
  Condition condition;
  DecoderKind decoder;
  int k;
  Metrics metrics;
};

struct ExperimentResult {
  std::string sequence_id;
  std::size_t m = 0;
  int n = 0;
  int p = 0;
  std::string topology;
  OracleResult oracle;
  double reference_energy = 0.0;
  bool vs_incumbent = false;
  std::vector<RunRecord> records;
  std::vector<MetricsRow> summary;
  std::map<std::pair<Condition, std::uint64_t>, TrainedResult> trained;
};

namespace detail {

/// Stream for condition-specific randomness, disjoint across conditions.
inline std::uint64_t condition_stream(Condition c, std::uint64_t seed) {
  std::uint64_t h = 1469598103934665603ull;
  for (const char* s = condition_name(c); *s; ++s) h = (h ^ static_cast<unsigned char>(*s)) * 1099511628211ull;
  return restart_seed(h, seed);
}

inline std::string bit_string(const Bits& x) {
  std::string s;
  s.reserve(x.size());
  for (auto b : x) s.push_back(b ? '1' : '0');
  return s;
}

/// Runs `count` jobs on up to `workers` threads; `job(i)` must only touch
/// slot i of any shared output.
template <typename Job>
void parallel_for(std::size_t count, int workers, Job&& job) {
  const std::size_t pool = std::min<std::size_t>(std::max(workers, 1), count);
  if (pool <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < pool; ++t) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : threads) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

/// All (seed, condition) cells of one manifest. Cells run on the worker
/// pool; records come out in (seed, condition, decoder, K) order regardless
/// of scheduling.
inline ExperimentResult run_prepared(const ExperimentManifest& man, const PreparedExperiment& prep) {
  struct Cell {
    std::uint64_t seed;
    Condition condition;
    std::vector<RunRecord> records;
    std::optional<TrainedResult> trained;
  };
  std::vector<Cell> cells;
  for (auto seed : man.seeds)
    for (auto c : man.conditions) cells.push_back({seed, c, {}, std::nullopt});

  const QuboInstance& inst = prep.inst;
  detail::parallel_for(cells.size(), man.workers, [&](std::size_t idx) {
    Cell& cell = cells[idx];
    TrainConfig tc = man.train;
    tc.seed = cell.seed;
    EvVector evs;
    if (cell.condition == Condition::random_ev) {
      evs = random_evs(inst.m(), detail::condition_stream(cell.condition, cell.seed));
    } else {
      if (cell.condition == Condition::untrained) tc.max_iters = 0;
      cell.trained = train(prep.spec, prep.enc, inst, tc);
      evs = cell.trained->final_evs;
    }
    DecodeParams dp = man.decode;
    dp.seed = cell.seed;
    auto stamp = [&](DecoderKind d, int k, const DecodeResult& r, double ms) {
      RunRecord rec;
      rec.seed = cell.seed;
      rec.condition = cell.condition;
      rec.decoder = d;
      rec.k = k;
      rec.bits = detail::bit_string(r.bits);
      rec.energy = r.energy;
      rec.feasible = r.feasible;
      rec.wall_ms = ms;
      cell.records.push_back(std::move(rec));
    };
    using clock = std::chrono::steady_clock;
    auto ms_since = [](clock::time_point t0) {
      return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    };
    for (auto d : man.decoders) {
      const auto t0 = clock::now();
      if (d == DecoderKind::sign) {
        DecodeResult r;
        r.bits = sign_round(evs.values);
        r.energy = qubo_energy(inst, r.bits);
        r.feasible = is_feasible(inst, r.bits);
        stamp(d, 1, r, ms_since(t0));
      } else if (d == DecoderKind::sign_ls) {
        stamp(d, 1, sign_ls(evs.values, inst, dp.t_ls), ms_since(t0));
      } else {
        auto snaps = pagd_k_prefix(evs.values, inst, dp, man.k_list);
        const double ms = ms_since(t0);
        for (std::size_t b = 0; b < snaps.size(); ++b) stamp(d, man.k_list[b], snaps[b], ms);
      }
    }
  });

  ExperimentResult res;
  res.sequence_id = inst.sequence_id();
  res.m = inst.m();
  res.n = prep.spec.n;
  res.p = prep.spec.p;
  res.topology = man.device_graph_path.empty() ? topology_name(man.topology) : "hardware_aware";
  res.oracle = prep.oracle;
  res.reference_energy = prep.oracle.energy;
  res.vs_incumbent = !prep.oracle.proved_optimal;
  for (auto& cell : cells) {
    for (auto& r : cell.records) {
      if (r.feasible && r.energy < res.reference_energy) res.reference_energy = r.energy;
      res.records.push_back(std::move(r));
    }
    if (cell.trained) res.trained.emplace(std::make_pair(cell.condition, cell.seed), std::move(*cell.trained));
  }
  if (res.reference_energy != 0.0) {
    for (auto& r : res.records) {
      r.vs_incumbent = res.vs_incumbent;
      r.gap = gap_percent(std::max(r.energy, res.reference_energy), res.reference_energy);
    }
  }
  if (!man.out_dir.empty()) {
    for (auto& r : res.records)
      if (r.condition == Condition::trained && res.trained.count({r.condition, r.seed}))
        r.loss_csv = "loss_trained_seed" + std::to_string(r.seed) + ".csv";
  }

  // per (condition, decoder, K) metrics, in manifest order
  for (auto c : man.conditions) {
    for (auto d : man.decoders) {
      std::vector<int> ks = d == DecoderKind::pagd ? man.k_list : std::vector<int>{1};
      for (int k : ks) {
        std::vector<double> gaps;
        for (const auto& r : res.records)
          if (r.condition == c && r.decoder == d && r.k == k && r.gap) gaps.push_back(*r.gap);
        if (gaps.empty()) continue;
        res.summary.push_back({c, d, k, summarize(gaps)});
      }
    }
  }
  return res;
}

inline ExperimentResult run_experiment(const ExperimentManifest& man) {
  const PreparedExperiment prep = prepare_experiment(man);
  return run_prepared(man, prep);
}

/// Mean gap of the rows matching (condition, decoder, K); NaN when absent.
inline double mean_gap(const ExperimentResult& res, Condition c, DecoderKind d, int k) {
  double sum = 0.0;
  int count = 0;
  for (const auto& r : res.records)
    if (r.condition == c && r.decoder == d && r.k == k && r.gap) {
      sum += *r.gap;
      ++count;
    }
  return count ? sum / count : std::numeric_limits<double>::quiet_NaN();
}

inline const Metrics* find_metrics(const ExperimentResult& res, Condition c, DecoderKind d, int k) {
  for (const auto& row : res.summary)
    if (row.condition == c && row.decoder == d && row.k == k) return &row.metrics;
  return nullptr;
}

/// Seeds whose best-of-K gap rises when K grows, for one (condition,
/// decoder). Zero for any prefix-nested run.
inline int k_monotonicity_violations(const ExperimentResult& res, Condition c, DecoderKind d = DecoderKind::pagd) {
  std::map<std::uint64_t, std::vector<std::pair<int, double>>> by_seed;
  for (const auto& r : res.records)
    if (r.condition == c && r.decoder == d) by_seed[r.seed].emplace_back(r.k, r.energy);
  int violations = 0;
  for (auto& [seed, v] : by_seed) {
    std::sort(v.begin(), v.end());
    for (std::size_t i = 1; i < v.size(); ++i)
      if (v[i].second > v[i - 1].second) {
        ++violations;
        break;
      }
  }
  return violations;
}

inline nlohmann::json results_to_json(const ExperimentResult& res, bool include_wall_time = true) {
  using nlohmann::json;
  json recs = json::array();
  for (const auto& r : res.records) {
    json j = {{"seed", r.seed},
              {"condition", condition_name(r.condition)},
              {"decoder", decoder_name(r.decoder)},
              {"K", r.k},
              {"bits", r.bits},
              {"energy", r.energy},
              {"feasible", r.feasible},
              {"vs_incumbent", r.vs_incumbent}};
    j["gap"] = r.gap ? json(*r.gap) : json(nullptr);
    if (!r.loss_csv.empty()) j["loss_csv"] = r.loss_csv;
    if (include_wall_time) j["wall_ms"] = r.wall_ms;
    recs.push_back(std::move(j));
  }
  return {{"schema_version", kSchemaVersion},
          {"sequence_id", res.sequence_id},
          {"m", res.m},
          {"n", res.n},
          {"p", res.p},
          {"topology", res.topology},
          {"oracle", oracle_to_json(res.oracle)},
          {"reference_energy", res.reference_energy},
          {"vs_incumbent", res.vs_incumbent},
          {"records", recs}};
}

inline std::string summary_csv(const ExperimentResult& res) {
  std::ostringstream out;
  out << std::setprecision(10);
  out << "condition,decoder,K,p_below_1pct,wilson_lo,wilson_hi,median_gap,iqr_lo,iqr_hi,mean_gap,n_seeds\n";
  for (const auto& row : res.summary) {
    const auto& m = row.metrics;
    out << condition_name(row.condition) << ',' << decoder_name(row.decoder) << ',' << row.k << ',' << m.p_below
        << ',' << m.wilson_lo << ',' << m.wilson_hi << ',' << m.median_gap << ',' << m.iqr_lo << ',' << m.iqr_hi
        << ',' << m.mean_gap << ',' << m.n_seeds << '\n';
  }
  return out.str();
}

/// results.json, summary.csv and one loss_trained_seed<S>.csv per trained run.
inline void write_outputs(const ExperimentResult& res, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "results.json") << results_to_json(res).dump(1) << '\n';
  std::ofstream(dir / "summary.csv") << summary_csv(res);
  for (const auto& [key, tr] : res.trained) {
    if (key.first != Condition::trained) continue;
    std::ofstream out(dir / ("loss_trained_seed" + std::to_string(key.second) + ".csv"));
    out << std::setprecision(12) << "iter,loss\n";
    for (const auto& pt : tr.loss_trajectory) out << pt.iter << ',' << pt.loss << '\n';
  }
}

enum class SweepAxis { p, K, topology };

inline SweepAxis sweep_axis_from_name(const std::string& s) {
  if (s == "p" || s == "depth") return SweepAxis::p;
  if (s == "K" || s == "k") return SweepAxis::K;
  if (s == "topology") return SweepAxis::topology;
  throw Error(Errc::InvalidArgument, "unknown sweep axis '" + s + "'");
}

struct SweepRow {
  std::string value;
  Condition condition;
  DecoderKind decoder;
  int k;
  Metrics metrics;
  double normalized_median = 0.0;
  bool is_min = false;
};

struct SweepResult {
  std::string axis;
  std::vector<SweepRow> rows;
  int monotonicity_violations = 0;
};

/// One summary row per axis value and (condition, decoder, K) cell. For the
/// p and topology axes only PAGD at `report_k` is summarised; the K axis
/// reports every K. Median gaps are rescaled to [0, 1] within each
/// (condition, decoder) series.
inline SweepResult run_sweep(const ExperimentManifest& base, SweepAxis axis, const std::vector<std::string>& values,
                             int report_k = 10) {
  if (values.empty()) throw Error(Errc::InvalidArgument, "sweep needs at least one axis value");
  SweepResult out;
  out.axis = axis == SweepAxis::p ? "p" : axis == SweepAxis::K ? "K" : "topology";
  std::optional<OracleResult> oracle;
  auto add_rows = [&](const std::string& value, const ExperimentResult& res, std::optional<int> only_k) {
    for (const auto& row : res.summary) {
      if (only_k && (row.decoder != DecoderKind::pagd || row.k != *only_k)) continue;
      out.rows.push_back({value, row.condition, row.decoder, row.k, row.metrics});
    }
  };

  if (axis == SweepAxis::K) {
    ExperimentManifest man = base;
    man.k_list.clear();
    for (const auto& v : values) man.k_list.push_back(std::stoi(v));
    man.decoders = {DecoderKind::pagd};
    auto res = run_experiment(man);
    for (auto c : man.conditions) out.monotonicity_violations += k_monotonicity_violations(res, c);
    for (const auto& row : res.summary)
      out.rows.push_back({std::to_string(row.k), row.condition, row.decoder, row.k, row.metrics});
  } else {
    for (const auto& v : values) {
      ExperimentManifest man = base;
      if (axis == SweepAxis::p) {
        man.depth = std::stoi(v);
      } else {
        man.topology = topology_from_name(v);
      }
      if (std::find(man.k_list.begin(), man.k_list.end(), report_k) == man.k_list.end()) man.k_list.push_back(report_k);
      const auto prep = prepare_experiment(man, oracle ? &*oracle : nullptr);
      oracle = prep.oracle;
      auto res = run_prepared(man, prep);
      for (auto c : man.conditions) out.monotonicity_violations += k_monotonicity_violations(res, c);
      add_rows(v, res, report_k);
    }
  }

  // rescale each (condition, decoder, K-if-fixed) series to [0, 1]
  std::map<std::tuple<int, int, int>, std::pair<double, double>> range;
  auto series = [&](const SweepRow& r) {
    return std::make_tuple(static_cast<int>(r.condition), static_cast<int>(r.decoder), axis == SweepAxis::K ? 0 : r.k);
  };
  for (const auto& r : out.rows) {
    auto [it, fresh] = range.try_emplace(series(r), r.metrics.median_gap, r.metrics.median_gap);
    if (!fresh) {
      it->second.first = std::min(it->second.first, r.metrics.median_gap);
      it->second.second = std::max(it->second.second, r.metrics.median_gap);
    }
  }
  for (auto& r : out.rows) {
    const auto [lo, hi] = range.at(series(r));
    r.normalized_median = hi > lo ? (r.metrics.median_gap - lo) / (hi - lo) : 0.0;
    r.is_min = r.metrics.median_gap == lo;
  }
  return out;
}

inline std::string sweep_csv(const SweepResult& s) {
  std::ostringstream out;
  out << std::setprecision(10);
  out << s.axis
      << ",condition,decoder,K,p_below_1pct,wilson_lo,wilson_hi,median_gap,iqr_lo,iqr_hi,mean_gap,"
         "normalized_median_gap,is_min\n";
  for (const auto& r : s.rows) {
    const auto& m = r.metrics;
    out << r.value << ',' << condition_name(r.condition) << ',' << decoder_name(r.decoder) << ',' << r.k << ','
        << m.p_below << ',' << m.wilson_lo << ',' << m.wilson_hi << ',' << m.median_gap << ',' << m.iqr_lo << ','
        << m.iqr_hi << ',' << m.mean_gap << ',' << r.normalized_median << ',' << (r.is_min ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace pcefold
