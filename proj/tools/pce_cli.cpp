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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pcefold/pcefold.hpp"

namespace {

using namespace pcefold;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<int> int_list(const std::string& s) {
  std::vector<int> out;
  for (const auto& v : split_list(s)) out.push_back(std::stoi(v));
  return out;
}

/// "N" means seeds 0..N-1; "a,b,c" is an explicit list.
std::vector<std::uint64_t> seed_list(const std::string& s) {
  std::vector<std::uint64_t> out;
  if (s.find(',') == std::string::npos) {
    const auto n = std::stoull(s);
    for (std::uint64_t i = 0; i < n; ++i) out.push_back(i);
  } else {
    for (const auto& v : split_list(s)) out.push_back(std::stoull(v));
  }
  return out;
}

struct InstanceFlags {
  std::string seq;
  std::string qubo;
  std::string energy_table;
  int min_hairpin = 3;
  bool no_gu = false;
  std::string conflict_rule = "nested_chain";

  void attach(CLI::App* app) {
    app->add_option("--seq", seq, "Sequence file (plain or FASTA)");
    app->add_option("--qubo", qubo, "QUBO JSON written by `build`");
    app->add_option("--energy-table", energy_table, "Stacking energy JSON");
    app->add_option("--min-hairpin", min_hairpin, "Minimum unpaired bases in a hairpin loop");
    app->add_flag("--no-gu", no_gu, "Disallow G-U wobble pairs");
    app->add_option("--conflict-rule", conflict_rule, "nested_chain | pairing_only");
  }

  BuildOptions build_options() const {
    BuildOptions b;
    b.min_hairpin = min_hairpin;
    b.allow_gu = !no_gu;
    if (conflict_rule == "pairing_only") {
      b.rule = ConflictRule::pairing_only;
    } else if (conflict_rule != "nested_chain") {
      throw Error(Errc::InvalidArgument, "unknown conflict rule '" + conflict_rule + "'");
    }
    return b;
  }

  QuboInstance load() const {
    ExperimentManifest m;
    m.sequence_path = seq;
    m.qubo_path = qubo;
    m.energy_table_path = energy_table;
    m.build = build_options();
    if (seq.empty() == qubo.empty()) throw Error(Errc::InvalidArgument, "give exactly one of --seq or --qubo");
    return load_instance(m);
  }
};

struct RunFlags {
  std::string manifest;
  std::string topology;
  int depth = 0;
  std::string seeds;
  int iters = -1;
  double alpha = 0.0;
  double beta = -1.0;
  double sigma_noise = -1.0;
  std::string k_list;
  std::string conditions;
  std::string decoders;
  std::string device_graph;
  double lambda = -1.0;
  std::string out;
  int workers = 0;
  long long node_limit = 0;

  void attach(CLI::App* app) {
    app->add_option("--manifest", manifest, "Experiment manifest JSON; flags override its fields");
    app->add_option("--topology", topology, "NN | InformedK | Informed2K | All");
    app->add_option("--depth", depth, "Circuit depth p (default by instance size)");
    app->add_option("--seeds", seeds, "Seed count N (0..N-1) or comma list");
    app->add_option("--iters", iters, "Optimizer evaluation budget");
    app->add_option("--alpha", alpha, "Sigmoid sharpness for loss and decoder");
    app->add_option("--beta", beta, "PAGD prior exponent");
    app->add_option("--sigma-noise", sigma_noise, "PAGD-K perturbation scale");
    app->add_option("--k-list", k_list, "Comma list of restart budgets");
    app->add_option("--conditions", conditions, "Comma list of trained,untrained,random_ev");
    app->add_option("--decoders", decoders, "Comma list of sign,sign_ls,pagd");
    app->add_option("--device-graph", device_graph, "Device graph JSON for hardware-aware pairs");
    app->add_option("--lambda", lambda, "SWAP-distance discount");
    app->add_option("--out", out, "Output directory");
    app->add_option("--workers", workers, "Worker threads");
    app->add_option("--node-limit", node_limit, "Oracle node budget");
  }

  ExperimentManifest manifest_with(const InstanceFlags& inst) const {
    ExperimentManifest m = manifest.empty() ? ExperimentManifest{} : load_manifest(manifest);
    if (!inst.seq.empty()) {
      m.sequence_path = inst.seq;
      m.qubo_path.clear();
    }
    if (!inst.qubo.empty()) {
      m.qubo_path = inst.qubo;
      m.sequence_path.clear();
    }
    if (!inst.energy_table.empty()) m.energy_table_path = inst.energy_table;
    if (manifest.empty() || inst.min_hairpin != 3 || inst.no_gu || inst.conflict_rule != "nested_chain") {
      m.build = inst.build_options();
    }
    if (!topology.empty()) m.topology = topology_from_name(topology);
    if (depth > 0) m.depth = depth;
    if (!seeds.empty()) m.seeds = seed_list(seeds);
    if (iters >= 0) m.train.max_iters = iters;
    if (alpha > 0.0) m.train.alpha = m.decode.alpha = alpha;
    if (beta >= 0.0) m.decode.beta = beta;
    if (sigma_noise >= 0.0) m.decode.sigma_noise = sigma_noise;
    if (!k_list.empty()) m.k_list = int_list(k_list);
    if (!conditions.empty()) {
      m.conditions.clear();
      for (const auto& c : split_list(conditions)) m.conditions.push_back(condition_from_name(c));
    }
    if (!decoders.empty()) {
      m.decoders.clear();
      for (const auto& d : split_list(decoders)) m.decoders.push_back(decoder_from_name(d));
    }
    if (!device_graph.empty()) m.device_graph_path = device_graph;
    if (lambda >= 0.0) m.lambda = lambda;
    if (!out.empty()) m.out_dir = out;
    if (workers > 0) m.workers = workers;
    if (node_limit > 0) m.node_limit = node_limit;
    return m;
  }
};

void print_summary(const ExperimentResult& res) {
  std::printf("%s m=%zu n=%d p=%d topology=%s reference=%.6f%s\n", res.sequence_id.c_str(), res.m, res.n, res.p,
              res.topology.c_str(), res.reference_energy, res.vs_incumbent ? " (vs incumbent)" : "");
  std::cout << summary_csv(res);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pce_cli: Pauli-correlation-encoded RNA folding"};
  app.require_subcommand(1);

  InstanceFlags build_inst;
  std::string build_out;
  auto* build = app.add_subcommand("build", "Build a QUBO from a sequence");
  build_inst.attach(build);
  build->add_option("--out", build_out, "QUBO JSON path");

  InstanceFlags oracle_inst;
  long long oracle_nodes = 50'000'000;
  std::string oracle_out;
  auto* oracle = app.add_subcommand("oracle", "Solve an instance exactly");
  oracle_inst.attach(oracle);
  oracle->add_option("--node-limit", oracle_nodes, "Branch-and-bound node budget");
  oracle->add_option("--out", oracle_out, "Result JSON path");

  InstanceFlags decode_inst;
  std::string ev_file;
  std::uint64_t decode_seed = 0;
  DecodeParams dp;
  std::string decode_name = "pagd";
  auto* decode = app.add_subcommand("decode", "Decode an EV vector (random EVs when none given)");
  decode_inst.attach(decode);
  decode->add_option("--evs", ev_file, "JSON array of m expectation values");
  decode->add_option("--seed", decode_seed, "Seed for random EVs and restarts");
  decode->add_option("--decoder", decode_name, "sign | sign_ls | pagd");
  decode->add_option("--alpha", dp.alpha, "Sigmoid sharpness");
  decode->add_option("--beta", dp.beta, "Prior exponent");
  decode->add_option("--sigma-noise", dp.sigma_noise, "Restart perturbation scale");
  decode->add_option("--k", dp.k, "Restart count");

  InstanceFlags run_inst;
  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "Train, decode and score across seeds and conditions");
  run_inst.attach(run);
  run_flags.attach(run);

  InstanceFlags sweep_inst;
  RunFlags sweep_flags;
  std::string axis = "K";
  std::string axis_values;
  int report_k = 10;
  auto* sweep = app.add_subcommand("sweep", "Summarise an experiment along one axis");
  sweep_inst.attach(sweep);
  sweep_flags.attach(sweep);
  sweep->add_option("--axis", axis, "p | K | topology");
  sweep->add_option("--values", axis_values, "Comma list of axis values")->required();
  sweep->add_option("--report-k", report_k, "PAGD restart budget reported on p and topology sweeps");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*build) {
      const QuboInstance inst = build_inst.load();
      if (!build_out.empty()) save_qubo(inst, build_out);
      std::printf("%s L=%zu m=%zu |QC|=%zu n_min=%d\n", inst.sequence_id().c_str(), inst.sequence().size(),
                  inst.m(), inst.relations().conflicts.size(), min_qubits(static_cast<long long>(inst.m())));
    } else if (*oracle) {
      const QuboInstance inst = oracle_inst.load();
      const OracleResult r = exact_solve(inst, oracle_nodes);
      std::printf("energy=%.6f proved_optimal=%s nodes=%lld\n%s\n", r.energy, r.proved_optimal ? "true" : "false",
                  r.nodes_explored, to_dot_bracket(inst, r.bits).c_str());
      if (!oracle_out.empty()) std::ofstream(oracle_out) << oracle_to_json(r).dump(1) << '\n';
    } else if (*decode) {
      const QuboInstance inst = decode_inst.load();
      std::vector<double> evs;
      if (ev_file.empty()) {
        evs = random_evs(inst.m(), decode_seed).values;
      } else {
        std::ifstream in(ev_file);
        if (!in) throw Error(Errc::Io, "cannot open " + ev_file);
        nlohmann::json j;
        in >> j;
        evs = j.get<std::vector<double>>();
      }
      dp.seed = decode_seed;
      DecodeResult r;
      switch (decoder_from_name(decode_name)) {
        case DecoderKind::sign:
          r.bits = sign_round(evs);
          r.energy = qubo_energy(inst, r.bits);
          r.feasible = is_feasible(inst, r.bits);
          break;
        case DecoderKind::sign_ls:
          r = sign_ls(evs, inst, dp.t_ls);
          break;
        case DecoderKind::pagd:
          r = pagd_k(evs, inst, dp);
          break;
      }
      std::printf("energy=%.6f feasible=%s\n", r.energy, r.feasible ? "true" : "false");
      if (r.feasible) std::printf("%s\n", to_dot_bracket(inst, r.bits).c_str());
    } else if (*run) {
      const ExperimentManifest man = run_flags.manifest_with(run_inst);
      const ExperimentResult res = run_experiment(man);
      if (!man.out_dir.empty()) write_outputs(res, man.out_dir);
      print_summary(res);
    } else if (*sweep) {
      const ExperimentManifest man = sweep_flags.manifest_with(sweep_inst);
      const SweepResult res = run_sweep(man, sweep_axis_from_name(axis), split_list(axis_values), report_k);
      const std::string csv = sweep_csv(res);
      if (!man.out_dir.empty()) {
        std::filesystem::create_directories(man.out_dir);
        std::ofstream(std::filesystem::path(man.out_dir) / "sweep.csv") << csv;
      }
      std::cout << csv;
      std::printf("monotonicity_violations=%d\n", res.monotonicity_violations);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
