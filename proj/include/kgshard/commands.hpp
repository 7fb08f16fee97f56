/*
 * Copyright (c) 2026, The kgshard Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "kgshard/clustering.hpp"
#include "kgshard/config.hpp"
#include "kgshard/errors.hpp"
#include "kgshard/federation_sim.hpp"
#include "kgshard/kg_model.hpp"
#include "kgshard/lubm_generator.hpp"
#include "kgshard/partition.hpp"
#include "kgshard/partitioner.hpp"
#include "kgshard/workload.hpp"

namespace kgshard {

namespace io {

inline std::ifstream open_in(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw InputError(std::string("cannot open ") + what + " file " + path);
  return in;
}

inline KnowledgeGraph load_graph(const std::string& path) {
  auto in = open_in(path, "data");
  try {
    return parse_ntriples(in);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

inline Workload load_workload_file(const std::string& path, const FeatureOptions& opts) {
  auto in = open_in(path, "workload");
  try {
    return load_workload(in, opts);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

inline Partition load_partition(const std::string& path) {
  auto in = open_in(path, "partition");
  try {
    return partition_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

/// Writes `text` to `dir/name`, creating `dir` when needed.
inline void write_file(const std::string& dir, const std::string& name, const std::string& text) {
  std::filesystem::create_directories(dir);
  auto path = std::filesystem::path(dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

/// Frequency-weighted average cost from the `ALL` row of a cost CSV.
inline double baseline_average(const std::string& path) {
  auto in = open_in(path, "baseline");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("ALL,", 0) != 0) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    if (cells.size() != 6) break;
    try {
      double f = std::stod(cells[1]);
      return f > 0 ? std::stod(cells[5]) / f : 0.0;
    } catch (const std::logic_error&) {
      break;
    }
  }
  throw InputError("baseline " + path + " has no valid ALL row");
}

}  // namespace io

inline void check_partition_matches(const Partition& p, const EngineConfig& cfg) {
  if (p.k != cfg.k)
    throw InputError("partition has k = " + std::to_string(p.k) + " but config asks for " +
                     std::to_string(cfg.k));
}

/// `--out` empty writes to `log`.
inline void cmd_generate(const EngineConfig& cfg, const std::string& out_path, std::ostream& log) {
  auto g = generate_lubm({cfg.universities, cfg.seed});
  if (out_path.empty()) {
    write_ntriples(log, g);
    return;
  }
  std::ostringstream text;
  write_ntriples(text, g);
  auto path = std::filesystem::path(out_path);
  io::write_file(path.has_parent_path() ? path.parent_path().string() : ".",
                 path.filename().string(), text.str());
  log << "wrote " << g.triple_count() << " triples to " << out_path << '\n';
}

inline void print_shard_summary(std::ostream& log, const KnowledgeGraph& g, const Partition& p,
                                const std::vector<Shard>& shards) {
  std::vector<std::size_t> sizes;
  for (const auto& s : shards) sizes.push_back(s.size());
  char skew[32];
  std::snprintf(skew, sizeof skew, "%.4f", shard_skew(sizes));
  log << "version " << p.version << "  shards " << p.k << "  triples " << g.triple_count()
      << "  features " << p.assignment.size() << "  max/mean " << skew << '\n';
  for (const auto& s : shards)
    log << "  shard " << s.shard_id() << "  triples " << s.size() << "  features "
        << s.resident_features().size() << "  " << s.endpoint_name() << '\n';
}

/// Writes partition.json and manifest.json under `out_dir`.
inline Partition cmd_partition(const std::string& data, const std::string& workload,
                               const EngineConfig& cfg, const std::string& out_dir,
                               std::ostream& log) {
  auto g = io::load_graph(data);
  auto w = io::load_workload_file(workload, cfg.features);
  auto p = initial_partition(g, w, cfg.k, cfg.partitioner);
  auto shards = deploy(g, p);
  io::write_file(out_dir, "partition.json", to_json(p).dump(2) + "\n");
  io::write_file(out_dir, "manifest.json", manifest_to_json(shards).dump(2) + "\n");
  print_shard_summary(log, g, p, shards);
  return p;
}

/// Cost CSV (and timing CSV) of the workload on the partition.
inline CostReport cmd_run(const std::string& data, const std::string& partition_path,
                          const std::string& workload, const EngineConfig& cfg,
                          const std::string& out_dir, std::ostream& log) {
  auto g = io::load_graph(data);
  auto w = io::load_workload_file(workload, cfg.features);
  auto p = io::load_partition(partition_path);
  check_partition_matches(p, cfg);
  auto extended = extend_partition(p, build_inventory(g, w.features(), &p));
  auto report = run_workload(w, deploy(g, extended), extended, g, cfg.partitioner.cost);
  std::ostringstream costs, timing;
  write_cost_csv(costs, report);
  write_timing_csv(timing, w);
  if (out_dir.empty()) {
    log << costs.str();
  } else {
    io::write_file(out_dir, "costs.csv", costs.str());
    io::write_file(out_dir, "timing.csv", timing.str());
    log << "weighted cost " << format_cost(report.weighted_total()) << " over "
        << report.entries.size() << " queries\n";
  }
  return report;
}

/// Writes plan.json, comparison.csv and partition.json (the input unchanged
/// unless committed). With a baseline cost CSV, an unchanged workload is
/// still adapted once its average cost degrades past the threshold.
inline AdaptResult cmd_adapt(const std::string& data, const std::string& partition_path,
                             const std::string& workload, const EngineConfig& cfg,
                             const std::string& out_dir, const std::string& baseline,
                             std::ostream& log) {
  auto g = io::load_graph(data);
  auto w = io::load_workload_file(workload, cfg.features);
  auto p = io::load_partition(partition_path);
  check_partition_matches(p, cfg);
  bool force = false;
  if (!baseline.empty()) {
    auto extended = extend_partition(p, build_inventory(g, w.features(), &p));
    TimingMetadata tm;
    tm.baseline = io::baseline_average(baseline);
    tm.latest = evaluate_workload(w, deploy(g, extended), extended, g, cfg.partitioner.cost)
                    .weighted_average();
    force = adaptation_due(tm, 0, {cfg.threshold, true, false});
  }
  auto r = adapt(p, g, w, cfg.partitioner, force);
  auto plan = to_json(r.plan);
  plan["outcome"] = std::string(to_string(r.outcome));
  std::ostringstream cmp;
  write_comparison_csv(cmp, r.before, r.after);
  io::write_file(out_dir, "plan.json", plan.dump(2) + "\n");
  io::write_file(out_dir, "comparison.csv", cmp.str());
  io::write_file(out_dir, "partition.json", to_json(r.partition).dump(2) + "\n");
  log << to_string(r.outcome) << "  moves " << r.plan.moves.size() << "  triples "
      << r.plan.triples_moved() << "  cost " << format_cost(r.plan.predicted_cost_before)
      << " -> " << format_cost(r.plan.predicted_cost_after) << '\n';
  for (const auto& id : r.regressed) log << "  blocked: " << id << " would gain distributed joins\n";
  return r;
}

/// Clustering and placement exports for inspection.
inline void cmd_report(const std::string& data, const std::string& partition_path,
                       const std::string& workload, const EngineConfig& cfg,
                       const std::string& out_dir, std::ostream& log) {
  auto g = io::load_graph(data);
  auto w = io::load_workload_file(workload, cfg.features);
  if (w.empty()) throw InputError("workload is empty");
  auto dm = build_distance_matrix(w);
  auto dg = hac(dm, cfg.partitioner.linkage);
  auto groups = cut(dg, cfg.partitioner.cut_d, w);
  std::ostringstream dist;
  write_distance_csv(dist, dm);
  io::write_file(out_dir, "distances.csv", dist.str());
  io::write_file(out_dir, "dendrogram.json", to_json(dg).dump(2) + "\n");
  nlohmann::ordered_json gj = nlohmann::ordered_json::array();
  for (const auto& grp : groups) {
    nlohmann::ordered_json e;
    e["group"] = grp.group_id;
    e["queries"] = grp.member_queries;
    e["features"] = nlohmann::ordered_json::array();
    for (const auto& f : key_features(grp, w)) e["features"].push_back(to_string(f));
    gj.push_back(e);
  }
  io::write_file(out_dir, "groups.json", gj.dump(2) + "\n");
  log << w.size() << " queries, " << groups.size() << " feature groups at d = "
      << cfg.partitioner.cut_d << '\n';
  if (partition_path.empty()) return;

  auto p = io::load_partition(partition_path);
  check_partition_matches(p, cfg);
  auto extended = extend_partition(p, build_inventory(g, w.features(), &p));
  Ownership own(g, extended);
  std::ostringstream fcsv;
  fcsv << "feature,shard,triples,usage\n";
  for (const auto& [f, s] : extended.assignment) {
    std::string name = to_string(f);
    std::string quoted;
    for (char c : name) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
    fcsv << '"' << quoted << "\"," << s << ',' << own.mass(f) << ',' << usage_weight(w, f) << '\n';
  }
  io::write_file(out_dir, "features.csv", fcsv.str());
  std::string fed;
  for (const auto& [id, e] : w.entries())
    fed += "# " + id + "\n" + to_sparql(rewrite_federated(e.query, extended, w.feature_options())) + "\n";
  io::write_file(out_dir, "federated.sparql", fed);
  print_shard_summary(log, g, extended, deploy(g, extended));
}

}  // namespace kgshard
