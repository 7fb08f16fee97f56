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
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "kgshard/errors.hpp"
#include "kgshard/feature.hpp"
#include "kgshard/kg_model.hpp"

namespace kgshard {

using ShardId = std::uint32_t;

/// Assignment of every feature (and of predicates no feature covers) to one
/// shard. A triple belongs to the PO feature matching its (predicate, object)
/// if that feature is assigned, else to the P feature of its predicate, else
/// to the orphan entry of its predicate.
struct Partition {
  std::uint32_t k = 1;
  std::map<Feature, ShardId> assignment;
  std::map<Term, ShardId> orphan_assignment;
  std::uint64_t version = 0;
  /// Fingerprint of the workload this partition was last built or adapted for.
  std::uint64_t workload_fingerprint = 0;
  /// Query frequencies of that workload, by query id.
  std::map<std::string, std::uint64_t> frequencies;

  std::optional<ShardId> shard_of(const Feature& f) const {
    auto it = assignment.find(f);
    if (it == assignment.end()) return std::nullopt;
    return it->second;
  }

  std::set<Feature> inventory() const {
    std::set<Feature> out;
    for (const auto& [f, _] : assignment) out.insert(f);
    return out;
  }

  bool operator==(const Partition&) const = default;
};

/// Triple ownership under a fixed feature inventory: which feature owns each
/// triple, and how many triples each feature owns.
class Ownership {
 public:
  static constexpr std::size_t kOrphan = static_cast<std::size_t>(-1);

  Ownership(const KnowledgeGraph& graph, const std::set<Feature>& inventory)
      : graph_(&graph), features_(inventory.begin(), inventory.end()) {
    std::unordered_map<TermId, std::size_t> by_p;
    std::unordered_map<std::uint64_t, std::size_t> by_po;
    for (std::size_t i = 0; i < features_.size(); ++i) {
      const Feature& f = features_[i];
      index_.emplace(f, i);
      auto p = graph.find_term(f.predicate);
      if (!p) continue;
      if (f.kind == FeatureKind::P) {
        by_p.emplace(*p, i);
      } else if (auto o = graph.find_term(*f.object)) {
        by_po.emplace(key(*p, *o), i);
      }
    }
    owned_.resize(features_.size());
    owner_.resize(graph.triple_count(), kOrphan);
    const auto& ts = graph.triples();
    for (TripleId id = 0; id < ts.size(); ++id) {
      const Triple& t = ts[id];
      std::size_t owner = kOrphan;
      if (auto it = by_po.find(key(t.predicate, t.object)); it != by_po.end())
        owner = it->second;
      else if (auto jt = by_p.find(t.predicate); jt != by_p.end())
        owner = jt->second;
      owner_[id] = owner;
      if (owner == kOrphan)
        orphans_[t.predicate].push_back(id);
      else
        owned_[owner].push_back(id);
    }
  }

  Ownership(const KnowledgeGraph& graph, const Partition& partition)
      : Ownership(graph, partition.inventory()) {}

  const KnowledgeGraph& graph() const noexcept { return *graph_; }
  const std::vector<Feature>& features() const noexcept { return features_; }

  std::optional<std::size_t> index_of(const Feature& f) const {
    auto it = index_.find(f);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Owning feature index of a triple, or kOrphan.
  std::size_t owner(TripleId id) const { return owner_.at(id); }

  const std::vector<TripleId>& owned(std::size_t feature_index) const {
    return owned_.at(feature_index);
  }

  std::size_t mass(std::size_t feature_index) const { return owned_.at(feature_index).size(); }
  std::size_t mass(const Feature& f) const {
    auto i = index_of(f);
    return i ? mass(*i) : 0;
  }

  /// Triples with no owning feature, grouped by predicate id.
  const std::map<TermId, std::vector<TripleId>>& orphans() const noexcept { return orphans_; }

  std::size_t total() const noexcept { return owner_.size(); }

 private:
  static std::uint64_t key(TermId p, TermId o) {
    return (static_cast<std::uint64_t>(p) << 32) | o;
  }

  const KnowledgeGraph* graph_;
  std::vector<Feature> features_;
  std::map<Feature, std::size_t> index_;
  std::vector<std::size_t> owner_;
  std::vector<std::vector<TripleId>> owned_;
  std::map<TermId, std::vector<TripleId>> orphans_;
};

/// Shard owning a triple under `partition`. `own` must be built over the
/// partition's inventory.
inline ShardId shard_of_triple(const Ownership& own, const Partition& partition,
                               TripleId id) {
  std::size_t f = own.owner(id);
  if (f != Ownership::kOrphan) return partition.assignment.at(own.features()[f]);
  const Term& pred = own.graph().term(own.graph().triple(id).predicate);
  auto it = partition.orphan_assignment.find(pred);
  if (it == partition.orphan_assignment.end())
    throw InvalidPartition("no shard owns triples of predicate " + to_ntriples(pred));
  return it->second;
}

/// Dataset feature inventory: P for every predicate, PO for every rdf:type
/// class, plus the given workload features and everything already assigned in
/// `previous` (inventories only grow, so migrations always have one source).
inline std::set<Feature> build_inventory(const KnowledgeGraph& graph,
                                         const std::set<Feature>& workload_features,
                                         const Partition* previous = nullptr) {
  std::set<Feature> out = workload_features;
  auto type_id = graph.find_term(Term::iri(std::string(vocab::kRdfType)));
  for (TermId p : graph.predicates()) {
    out.insert(Feature::p(graph.term(p)));
    if (type_id && p == *type_id) {
      for (TripleId id : graph.by_predicate(p))
        out.insert(Feature::po(graph.term(p), graph.term(graph.triple(id).object)));
    }
  }
  if (previous)
    for (const auto& [f, _] : previous->assignment) out.insert(f);
  return out;
}

/// Shard that currently holds the triples a feature would own, looked up in
/// a partition that may predate the feature.
inline std::optional<ShardId> origin_shard(const Partition& before, const Feature& f) {
  if (auto s = before.shard_of(f)) return s;
  if (f.kind == FeatureKind::PO)
    if (auto s = before.shard_of(Feature::p(f.predicate))) return s;
  auto it = before.orphan_assignment.find(f.predicate);
  if (it != before.orphan_assignment.end()) return it->second;
  return std::nullopt;
}

/// Same physical layout as `before`, expressed over a larger inventory: each
/// new feature sits where its triples already are.
inline Partition extend_partition(const Partition& before, const std::set<Feature>& inventory) {
  Partition out = before;
  for (const auto& f : inventory)
    if (!out.assignment.contains(f)) out.assignment[f] = origin_shard(before, f).value_or(0);
  return out;
}

struct Move {
  Feature feature;
  ShardId from = 0;
  ShardId to = 0;
  std::size_t triple_count = 0;
  bool operator==(const Move&) const = default;
};

struct MigrationPlan {
  std::vector<Move> moves;
  double predicted_cost_before = 0;
  double predicted_cost_after = 0;

  bool empty() const noexcept { return moves.empty(); }
  std::size_t triples_moved() const {
    std::size_t n = 0;
    for (const auto& m : moves) n += m.triple_count;
    return n;
  }
  bool operator==(const MigrationPlan&) const = default;
};

/// Feature moves turning `before` into `after`. `own` is built over the
/// inventory of `after`.
inline MigrationPlan plan_migration(const Ownership& own, const Partition& before,
                                    const Partition& after) {
  MigrationPlan plan;
  for (const auto& [f, to] : after.assignment) {
    auto from = origin_shard(before, f);
    if (!from || *from == to) continue;
    plan.moves.push_back({f, *from, to, own.mass(f)});
  }
  return plan;
}

// -- JSON -------------------------------------------------------------------

inline std::string fingerprint_hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline nlohmann::ordered_json to_json(const Partition& p) {
  nlohmann::ordered_json j;
  j["version"] = p.version;
  j["k"] = p.k;
  j["assignment"] = nlohmann::ordered_json::array();
  for (const auto& [f, s] : p.assignment)
    j["assignment"].push_back({{"feature", to_string(f)}, {"shard", s}});
  j["orphan"] = nlohmann::ordered_json::array();
  for (const auto& [t, s] : p.orphan_assignment)
    j["orphan"].push_back({{"predicate", to_ntriples(t)}, {"shard", s}});
  j["workload_fingerprint"] = fingerprint_hex(p.workload_fingerprint);
  j["frequencies"] = nlohmann::ordered_json::object();
  for (const auto& [id, f] : p.frequencies) j["frequencies"][id] = f;
  return j;
}

inline Partition partition_from_json(const nlohmann::json& j) {
  try {
    Partition p;
    p.version = j.at("version").get<std::uint64_t>();
    p.k = j.at("k").get<std::uint32_t>();
    if (p.k == 0) throw InputError("partition k must be >= 1");
    auto check = [&](ShardId s) {
      if (s >= p.k) throw InputError("shard id " + std::to_string(s) + " out of range");
      return s;
    };
    for (const auto& a : j.at("assignment")) {
      Feature f = parse_feature(a.at("feature").get<std::string>());
      if (!p.assignment.emplace(f, check(a.at("shard").get<ShardId>())).second)
        throw InputError("feature assigned twice: " + to_string(f));
    }
    if (j.contains("orphan"))
      for (const auto& o : j.at("orphan"))
        p.orphan_assignment[parse_term(o.at("predicate").get<std::string>())] =
            check(o.at("shard").get<ShardId>());
    if (j.contains("workload_fingerprint"))
      p.workload_fingerprint =
          std::stoull(j.at("workload_fingerprint").get<std::string>(), nullptr, 16);
    if (j.contains("frequencies"))
      for (const auto& [id, f] : j.at("frequencies").items())
        p.frequencies[id] = f.get<std::uint64_t>();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed partition JSON: ") + e.what());
  } catch (const std::logic_error& e) {
    throw InputError(std::string("malformed partition fingerprint: ") + e.what());
  }
}

inline nlohmann::ordered_json to_json(const MigrationPlan& plan) {
  nlohmann::ordered_json j;
  j["moves"] = nlohmann::ordered_json::array();
  for (const auto& m : plan.moves)
    j["moves"].push_back({{"feature", to_string(m.feature)},
                          {"from", m.from},
                          {"to", m.to},
                          {"triples", m.triple_count}});
  j["predicted_cost_before"] = plan.predicted_cost_before;
  j["predicted_cost_after"] = plan.predicted_cost_after;
  return j;
}

inline MigrationPlan plan_from_json(const nlohmann::json& j) {
  try {
    MigrationPlan plan;
    for (const auto& m : j.at("moves"))
      plan.moves.push_back({parse_feature(m.at("feature").get<std::string>()),
                            m.at("from").get<ShardId>(), m.at("to").get<ShardId>(),
                            m.at("triples").get<std::size_t>()});
    plan.predicted_cost_before = j.value("predicted_cost_before", 0.0);
    plan.predicted_cost_after = j.value("predicted_cost_after", 0.0);
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed migration plan JSON: ") + e.what());
  }
}

}  // namespace kgshard
