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

#include <cstdint>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgshard/errors.hpp"
#include "kgshard/partition.hpp"
#include "kgshard/query_analyzer.hpp"

namespace kgshard {

struct WorkloadEntry {
  QuerySpec query;
  QueryFeatures features;
  std::uint64_t frequency = 1;
  std::vector<double> run_times;
};

/// Registered queries with their frequencies and runtime samples. The epoch
/// advances whenever the query set or a frequency changes.
///
/// Registration is single-writer; record_run may be called concurrently and is
/// serialized internally.
class Workload {
 public:
  explicit Workload(FeatureOptions options = {}) : options_(options) {}

  Workload(const Workload& other) {
    std::lock_guard lock(other.mutex_);
    copy_from(other);
  }
  Workload& operator=(const Workload& other) {
    if (this != &other) {
      std::scoped_lock lock(mutex_, other.mutex_);
      copy_from(other);
    }
    return *this;
  }

  /// Adds a query or updates its frequency. Returns true when the workload
  /// changed (and the epoch advanced).
  bool register_query(QuerySpec query, std::uint64_t frequency) {
    if (frequency < 1) throw InputError("frequency must be >= 1 for query '" + query.id + "'");
    auto it = entries_.find(query.id);
    if (it != entries_.end()) {
      const QuerySpec& known = it->second.query;
      if (known.patterns != query.patterns || known.select_vars != query.select_vars)
        throw DuplicateIdWithDifferentText(query.id);
      if (it->second.frequency == frequency) return false;
      it->second.frequency = frequency;
      ++epoch_;
      return true;
    }
    WorkloadEntry entry;
    entry.features = extract_features(query, options_);
    entry.frequency = frequency;
    entry.query = std::move(query);
    std::string id = entry.query.id;
    entries_.emplace(std::move(id), std::move(entry));
    ++epoch_;
    return true;
  }

  bool remove_query(const std::string& id) {
    if (entries_.erase(id) == 0) return false;
    ++epoch_;
    return true;
  }

  void record_run(const std::string& id, double elapsed) {
    if (elapsed < 0) throw Error("negative runtime sample for query '" + id + "'");
    std::lock_guard lock(mutex_);
    auto it = entries_.find(id);
    if (it == entries_.end()) throw UnknownQuery(id);
    it->second.run_times.push_back(elapsed);
  }

  void clear_runs() {
    std::lock_guard lock(mutex_);
    for (auto& [_, e] : entries_) e.run_times.clear();
  }

  /// Mean of the `frequency` most recent samples of one query.
  double mean_runtime(const std::string& id) const {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(id);
    if (it == entries_.end()) throw UnknownQuery(id);
    const auto& e = it->second;
    if (e.run_times.empty()) throw MissingSamples(id);
    std::size_t window = std::min<std::size_t>(e.run_times.size(), e.frequency);
    double sum = 0;
    for (std::size_t i = e.run_times.size() - window; i < e.run_times.size(); ++i)
      sum += e.run_times[i];
    return sum / static_cast<double>(window);
  }

  bool contains(const std::string& id) const { return entries_.contains(id); }
  const WorkloadEntry& at(const std::string& id) const {
    auto it = entries_.find(id);
    if (it == entries_.end()) throw UnknownQuery(id);
    return it->second;
  }
  const std::map<std::string, WorkloadEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::uint64_t epoch() const noexcept { return epoch_; }
  const FeatureOptions& feature_options() const noexcept { return options_; }

  /// Every feature referenced by some registered query.
  std::set<Feature> features() const {
    std::set<Feature> out;
    for (const auto& [_, e] : entries_) out.insert(e.features.features.begin(), e.features.features.end());
    return out;
  }

  std::uint64_t total_frequency() const {
    std::uint64_t n = 0;
    for (const auto& [_, e] : entries_) n += e.frequency;
    return n;
  }

  /// FNV-1a over ids, query bodies and frequencies; equal for workloads with
  /// the same composition regardless of registration history.
  std::uint64_t fingerprint() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&](std::string_view s) {
      for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
      }
      h ^= 0xff;
      h *= 0x100000001b3ULL;
    };
    mix(options_.object_mode == ObjectFeatureMode::ClassObjectsOnly ? "class" : "all");
    for (const auto& [id, e] : entries_) {
      QuerySpec bare = e.query;
      bare.prefixes.clear();
      mix(id);
      mix(to_sparql(bare));
      mix(std::to_string(e.frequency));
    }
    return h;
  }

 private:
  void copy_from(const Workload& other) {
    entries_ = other.entries_;
    epoch_ = other.epoch_;
    options_ = other.options_;
  }

  std::map<std::string, WorkloadEntry> entries_;
  std::uint64_t epoch_ = 0;
  FeatureOptions options_;
  mutable std::mutex mutex_;
};

/// Average of per-query mean runtimes (each over that query's `frequency`
/// most recent samples).
inline double average_workload_time(const Workload& w) {
  if (w.empty()) return 0;
  double sum = 0;
  for (const auto& [id, e] : w.entries()) {
    if (e.run_times.empty()) throw MissingSamples(id);
    sum += w.mean_runtime(id);
  }
  return sum / static_cast<double>(w.size());
}

/// Frequency-weighted usage of a feature: sum of frequencies of the queries
/// that reference it.
inline std::uint64_t usage_weight(const Workload& w, const Feature& f) {
  std::uint64_t n = 0;
  for (const auto& [_, e] : w.entries())
    if (e.features.features.contains(f)) n += e.frequency;
  return n;
}

struct TimingMetadata {
  std::map<std::string, double> mean_runtime;
  double baseline = 0;  // T_base
  double latest = 0;    // T_new
  std::uint64_t baseline_epoch = 0;
};

struct AdaptationTrigger {
  double threshold = 0.2;
  bool on_degradation = true;
  bool on_workload_change = true;
};

/// Per-query means for every query that has samples.
inline TimingMetadata timing_snapshot(const Workload& w) {
  TimingMetadata tm;
  for (const auto& [id, e] : w.entries())
    if (!e.run_times.empty()) tm.mean_runtime[id] = w.mean_runtime(id);
  tm.baseline_epoch = w.epoch();
  return tm;
}

inline bool adaptation_due(const TimingMetadata& tm, std::uint64_t current_epoch,
                           const AdaptationTrigger& trigger = {}) {
  if (trigger.on_workload_change && current_epoch > tm.baseline_epoch) return true;
  return trigger.on_degradation && tm.latest >= tm.baseline * (1.0 + trigger.threshold);
}

/// Per-shard feature residency, per-feature owned triple counts and usage.
struct FeatureMetadata {
  std::vector<std::set<Feature>> shard_features;
  std::map<Feature, std::size_t> triple_count;
  std::map<Feature, std::uint64_t> usage;

  static FeatureMetadata build(const Ownership& own, const Partition& partition,
                               const Workload& w) {
    FeatureMetadata fm;
    fm.shard_features.resize(partition.k);
    for (const auto& [f, shard] : partition.assignment) {
      fm.shard_features.at(shard).insert(f);
      fm.triple_count[f] = own.mass(f);
    }
    for (const auto& [_, e] : w.entries())
      for (const auto& f : e.features.features) fm.usage[f] += e.frequency;
    return fm;
  }

  std::size_t featured_triples(ShardId shard) const {
    std::size_t n = 0;
    for (const auto& f : shard_features.at(shard)) n += triple_count.at(f);
    return n;
  }
};

// -- files --------------------------------------------------------------------

struct WorkloadRecord {
  std::string id;
  std::string query;
  std::uint64_t frequency = 1;
  std::size_t line = 0;
};

/// Reads the one-JSON-object-per-line workload format.
inline std::vector<WorkloadRecord> read_workload_records(std::istream& in) {
  std::vector<WorkloadRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      WorkloadRecord r;
      r.id = j.at("id").get<std::string>();
      r.query = j.at("query").get<std::string>();
      auto f = j.value("frequency", std::int64_t{1});
      if (f < 1) throw MalformedLine(line_no, "frequency must be >= 1");
      r.frequency = static_cast<std::uint64_t>(f);
      if (r.id.empty()) throw MalformedLine(line_no, "empty query id");
      r.line = line_no;
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw MalformedLine(line_no, std::string("bad workload record: ") + e.what());
    }
  }
  return out;
}

inline Workload load_workload(std::istream& in, FeatureOptions options = {}) {
  Workload w(options);
  for (auto& r : read_workload_records(in)) {
    try {
      w.register_query(parse_query(r.query, r.id), r.frequency);
    } catch (const MalformedLine&) {
      throw;
    } catch (const InputError& e) {
      throw MalformedLine(r.line, e.what());
    }
  }
  return w;
}

inline void write_workload(std::ostream& out, const Workload& w) {
  for (const auto& [id, e] : w.entries()) {
    nlohmann::ordered_json j;
    j["id"] = id;
    j["query"] = to_sparql(e.query);
    j["frequency"] = e.frequency;
    out << j.dump() << '\n';
  }
}

/// CSV `query_id,mean_ms,samples` for queries with samples.
inline void write_timing_csv(std::ostream& out, const Workload& w) {
  out << "query_id,mean_ms,samples\n";
  for (const auto& [id, e] : w.entries()) {
    if (e.run_times.empty()) continue;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", w.mean_runtime(id));
    out << id << ',' << buf << ',' << e.run_times.size() << '\n';
  }
}

}  // namespace kgshard
