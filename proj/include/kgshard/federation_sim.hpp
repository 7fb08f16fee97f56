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

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <iterator>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kgshard/errors.hpp"
#include "kgshard/kg_model.hpp"
#include "kgshard/partition.hpp"
#include "kgshard/query_analyzer.hpp"
#include "kgshard/workload.hpp"

namespace kgshard {

/// cost_units = alpha * distributed joins + beta * local joins + gamma * rows.
struct CostModel {
  double alpha = 10.0;
  double beta = 1.0;
  double gamma = 0.01;
};

inline std::string default_endpoint(ShardId id) {
  return "http://shard" + std::to_string(id) + ".kgshard.local/sparql";
}

/// The triples one processing node holds, with node-local S/P/O indexes.
class Shard {
 public:
  Shard() = default;
  Shard(ShardId id, std::string endpoint) : shard_id_(id), endpoint_(std::move(endpoint)) {}

  ShardId shard_id() const noexcept { return shard_id_; }
  const std::string& endpoint_name() const noexcept { return endpoint_; }
  const std::vector<TripleId>& triples() const noexcept { return triples_; }
  std::size_t size() const noexcept { return triples_.size(); }
  const std::set<Feature>& resident_features() const noexcept { return features_; }
  const std::set<Term>& orphan_predicates() const noexcept { return orphans_; }

  bool holds(TripleId id) const {
    return std::binary_search(triples_.begin(), triples_.end(), id);
  }

  /// Local triples matching the engaged positions.
  std::vector<TripleId> match(std::optional<TermId> s, std::optional<TermId> p,
                              std::optional<TermId> o, const KnowledgeGraph& graph) const {
    const std::vector<TripleId>* best = &triples_;
    auto consider = [&](const Index& idx, std::optional<TermId> key) {
      if (!key) return;
      auto it = idx.find(*key);
      if (it == idx.end()) {
        best = &empty_;
      } else if (it->second.size() < best->size()) {
        best = &it->second;
      }
    };
    consider(by_s_, s);
    consider(by_p_, p);
    consider(by_o_, o);
    std::vector<TripleId> out;
    for (TripleId id : *best) {
      const Triple& t = graph.triple(id);
      if ((s && t.subject != *s) || (p && t.predicate != *p) || (o && t.object != *o)) continue;
      out.push_back(id);
    }
    return out;
  }

 private:
  using Index = std::unordered_map<TermId, std::vector<TripleId>>;

  void reindex(const KnowledgeGraph& graph) {
    by_s_.clear();
    by_p_.clear();
    by_o_.clear();
    for (TripleId id : triples_) {
      const Triple& t = graph.triple(id);
      by_s_[t.subject].push_back(id);
      by_p_[t.predicate].push_back(id);
      by_o_[t.object].push_back(id);
    }
  }

  friend std::vector<Shard> deploy(const KnowledgeGraph&, const Partition&,
                                   const std::vector<std::string>&);
  friend void apply_migration(std::vector<Shard>&, const MigrationPlan&,
                              const KnowledgeGraph&, const Partition&);

  ShardId shard_id_ = 0;
  std::string endpoint_;
  std::vector<TripleId> triples_;
  std::set<Feature> features_;
  std::set<Term> orphans_;
  Index by_s_, by_p_, by_o_;
  static inline const std::vector<TripleId> empty_{};
};

/// Places every triple on the shard that owns it. `endpoints` may be empty,
/// in which case default endpoint labels are used.
inline std::vector<Shard> deploy(const KnowledgeGraph& graph, const Partition& partition,
                                 const std::vector<std::string>& endpoints = {}) {
  std::vector<Shard> shards;
  shards.reserve(partition.k);
  for (ShardId i = 0; i < partition.k; ++i)
    shards.emplace_back(i, i < endpoints.size() ? endpoints[i] : default_endpoint(i));
  Ownership own(graph, partition);
  for (TripleId id = 0; id < graph.triple_count(); ++id)
    shards.at(shard_of_triple(own, partition, id)).triples_.push_back(id);
  for (const auto& [f, s] : partition.assignment) shards.at(s).features_.insert(f);
  for (const auto& [p, s] : partition.orphan_assignment) shards.at(s).orphans_.insert(p);
  for (auto& sh : shards) sh.reindex(graph);
  return shards;
}

/// Moves the triples of each planned feature between shards. `target` is the
/// partition the plan leads to; it defines which triples a feature owns.
inline void apply_migration(std::vector<Shard>& shards, const MigrationPlan& plan,
                            const KnowledgeGraph& graph, const Partition& target) {
  if (plan.moves.empty()) return;
  Ownership own(graph, target);
  std::set<ShardId> touched;
  for (const Move& m : plan.moves) {
    if (m.from >= shards.size() || m.to >= shards.size())
      throw StaleMigration("move of " + to_string(m.feature) + " names a missing shard");
    auto idx = own.index_of(m.feature);
    if (!idx) throw StaleMigration("feature not in target partition: " + to_string(m.feature));
    const auto& moving = own.owned(*idx);  // sorted
    Shard& from = shards[m.from];
    Shard& to = shards[m.to];
    for (TripleId id : moving)
      if (!from.holds(id))
        throw StaleMigration("shard " + std::to_string(m.from) + " no longer owns " +
                             to_string(m.feature));
    std::vector<TripleId> rest;
    std::set_difference(from.triples_.begin(), from.triples_.end(), moving.begin(),
                        moving.end(), std::back_inserter(rest));
    from.triples_ = std::move(rest);
    std::vector<TripleId> merged;
    std::merge(to.triples_.begin(), to.triples_.end(), moving.begin(), moving.end(),
               std::back_inserter(merged));
    to.triples_ = std::move(merged);
    from.features_.erase(m.feature);
    to.features_.insert(m.feature);
    touched.insert(m.from);
    touched.insert(m.to);
  }
  for (auto& sh : shards) {
    sh.features_.clear();
    sh.orphans_.clear();
  }
  for (const auto& [f, s] : target.assignment) shards.at(s).features_.insert(f);
  for (const auto& [p, s] : target.orphan_assignment) shards.at(s).orphans_.insert(p);
  for (ShardId s : touched) shards[s].reindex(graph);
}

inline nlohmann::ordered_json manifest_to_json(const std::vector<Shard>& shards) {
  auto j = nlohmann::ordered_json::array();
  for (const auto& s : shards)
    j.push_back({{"shard_id", s.shard_id()},
                 {"endpoint_name", s.endpoint_name()},
                 {"triples", s.size()},
                 {"features", s.resident_features().size()}});
  return j;
}

inline std::vector<std::string> endpoints_from_manifest(const nlohmann::json& j) {
  std::vector<std::string> out;
  try {
    for (const auto& e : j) {
      auto id = e.at("shard_id").get<std::size_t>();
      if (out.size() <= id) out.resize(id + 1);
      out[id] = e.at("endpoint_name").get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed cluster manifest: ") + e.what());
  }
  return out;
}

// -- routing ------------------------------------------------------------------

/// Shard holding the most of the query's features; lowest id on ties, shard 0
/// for a query without features.
inline ShardId select_primary_node(const QuerySpec& q, const Partition& partition,
                                   const FeatureOptions& opts = {}) {
  std::vector<std::size_t> count(partition.k, 0);
  for (const auto& f : extract_features(q, opts).features)
    if (auto s = partition.shard_of(f)) ++count.at(*s);
  ShardId best = 0;
  for (ShardId s = 1; s < partition.k; ++s)
    if (count[s] > count[best]) best = s;
  return best;
}

struct PatternRoute {
  std::optional<Feature> feature;
  /// Shard the pattern is attributed to for join accounting.
  ShardId home = 0;
  /// Every shard that may hold matching triples.
  std::vector<ShardId> sources;
};

namespace detail {

inline std::vector<ShardId> pattern_sources(const TriplePattern& pat, const Partition& p) {
  std::set<ShardId> out;
  const Term* pred = as_term(pat.predicate);
  if (!pred) {
    for (ShardId s = 0; s < p.k; ++s) out.insert(s);
    return {out.begin(), out.end()};
  }
  auto orphan = p.orphan_assignment.find(*pred);
  if (const Term* obj = as_term(pat.object)) {
    if (auto s = p.shard_of(Feature::po(*pred, *obj))) out.insert(*s);
    else if (auto s2 = p.shard_of(Feature::p(*pred))) out.insert(*s2);
    else if (orphan != p.orphan_assignment.end()) out.insert(orphan->second);
    return {out.begin(), out.end()};
  }
  if (auto s = p.shard_of(Feature::p(*pred))) out.insert(*s);
  for (auto it = p.assignment.lower_bound(Feature{FeatureKind::PO, *pred, std::nullopt});
       it != p.assignment.end() && it->first.kind == FeatureKind::PO &&
       it->first.predicate == *pred;
       ++it)
    out.insert(it->second);
  if (orphan != p.orphan_assignment.end()) out.insert(orphan->second);
  return {out.begin(), out.end()};
}

}  // namespace detail

inline std::vector<PatternRoute> route_patterns(const QuerySpec& q, const Partition& partition,
                                                ShardId primary,
                                                const FeatureOptions& opts = {}) {
  std::vector<PatternRoute> out;
  for (const auto& pat : q.patterns) {
    PatternRoute r;
    r.feature = feature_of(pat, opts);
    r.sources = detail::pattern_sources(pat, partition);
    if (r.sources.size() == 1) {
      r.home = r.sources.front();
    } else if (auto s = r.feature ? partition.shard_of(*r.feature) : std::nullopt) {
      r.home = *s;
    } else {
      r.home = primary;
    }
    out.push_back(std::move(r));
  }
  return out;
}

// -- federated rewriting ------------------------------------------------------

/// Patterns executed together against the same shard(s). A block with one
/// shard equal to the primary node is local; several shards mean the pattern
/// is answered by a union over those endpoints.
struct FederatedBlock {
  std::vector<ShardId> shards;
  std::vector<std::size_t> patterns;
  bool operator==(const FederatedBlock&) const = default;
};

struct FederatedQuery {
  QuerySpec query;
  ShardId primary_node = 0;
  std::vector<PatternRoute> routes;
  std::vector<FederatedBlock> blocks;

  bool is_local(const FederatedBlock& b) const {
    return b.shards.size() == 1 && b.shards.front() == primary_node;
  }

  std::vector<TriplePattern> local_patterns() const {
    std::vector<TriplePattern> out;
    for (const auto& b : blocks)
      if (is_local(b))
        for (auto i : b.patterns) out.push_back(query.patterns[i]);
    return out;
  }

  /// SERVICE blocks in query order, one entry per (block, shard).
  std::vector<std::pair<ShardId, std::vector<TriplePattern>>> remote_blocks() const {
    std::vector<std::pair<ShardId, std::vector<TriplePattern>>> out;
    for (const auto& b : blocks) {
      if (is_local(b)) continue;
      for (ShardId s : b.shards) {
        if (s == primary_node) continue;
        std::vector<TriplePattern> ps;
        for (auto i : b.patterns) ps.push_back(query.patterns[i]);
        out.emplace_back(s, std::move(ps));
      }
    }
    return out;
  }
};

inline FederatedQuery rewrite_federated(const QuerySpec& q, const Partition& partition,
                                        const FeatureOptions& opts = {}) {
  FederatedQuery fq;
  fq.query = q;
  fq.primary_node = select_primary_node(q, partition, opts);
  fq.routes = route_patterns(q, partition, fq.primary_node, opts);
  for (std::size_t i = 0; i < q.patterns.size(); ++i) {
    const auto& r = fq.routes[i];
    std::vector<ShardId> target =
        r.sources.size() > 1 ? r.sources : std::vector<ShardId>{r.home};
    if (target.size() == 1 && !fq.blocks.empty() && fq.blocks.back().shards == target) {
      fq.blocks.back().patterns.push_back(i);
    } else {
      fq.blocks.push_back({std::move(target), {i}});
    }
  }
  return fq;
}

/// SPARQL text with SERVICE blocks for remote patterns.
inline std::string to_sparql(const FederatedQuery& fq,
                             const std::vector<std::string>& endpoints = {}) {
  auto endpoint = [&](ShardId s) {
    return s < endpoints.size() ? endpoints[s] : default_endpoint(s);
  };
  auto render = [&](const FederatedBlock& b) {
    std::string body;
    for (auto i : b.patterns) {
      if (!body.empty()) body += ' ';
      body += render_pattern(fq.query.patterns[i], fq.query.prefixes);
    }
    return body;
  };
  std::string out = render_prologue(fq.query);
  for (const auto& b : fq.blocks) {
    if (fq.is_local(b)) {
      for (auto i : b.patterns)
        out += "  " + render_pattern(fq.query.patterns[i], fq.query.prefixes) + "\n";
    } else if (b.shards.size() == 1) {
      out += "  SERVICE <" + endpoint(b.shards.front()) + "> { " + render(b) + " }\n";
    } else {
      std::string alt;
      for (ShardId s : b.shards) {
        if (!alt.empty()) alt += " UNION ";
        if (s == fq.primary_node)
          alt += "{ " + render(b) + " }";
        else
          alt += "{ SERVICE <" + endpoint(s) + "> { " + render(b) + " } }";
      }
      out += "  " + alt + "\n";
    }
  }
  out += "}\n";
  return out;
}

// -- execution ----------------------------------------------------------------

struct QueryResult {
  std::vector<std::string> vars;
  std::vector<std::vector<TermId>> rows;
};

struct CostEntry {
  std::string query_id;
  std::uint64_t frequency = 1;
  std::size_t local_joins = 0;
  std::size_t dist_joins = 0;
  std::size_t rows = 0;
  double cost_units = 0;
  bool operator==(const CostEntry&) const = default;
};

/// Join counts of a query under its routes: each pattern-level join is
/// distributed when its two patterns have different home shards.
inline std::pair<std::size_t, std::size_t> count_joins(const QuerySpec& q,
                                                       const std::vector<PatternRoute>& routes) {
  std::size_t local = 0, dist = 0;
  for (const auto& j : pattern_joins(q)) {
    if (routes[j.left].home == routes[j.right].home) ++local;
    else ++dist;
  }
  return {local, dist};
}

/// Evaluates the federated query: each pattern is matched only against the
/// shards its block names, and bindings are joined on shared variables.
inline std::pair<QueryResult, CostEntry> execute(const FederatedQuery& fq,
                                                 const std::vector<Shard>& shards,
                                                 const KnowledgeGraph& graph,
                                                 const CostModel& model = {},
                                                 std::uint64_t frequency = 1) {
  constexpr TermId kUnbound = std::numeric_limits<TermId>::max();
  const QuerySpec& q = fq.query;

  std::map<std::string, std::size_t> slot;
  for (const auto& p : q.patterns)
    for (const PatternTerm* pt : {&p.subject, &p.predicate, &p.object})
      if (auto v = as_variable(*pt)) slot.try_emplace(v->name, slot.size());

  std::vector<std::vector<ShardId>> targets(q.patterns.size());
  for (const auto& b : fq.blocks)
    for (auto i : b.patterns) targets[i] = b.shards;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i].empty()) throw UnownedPattern("pattern " + std::to_string(i) + " has no block");
    for (ShardId s : targets[i])
      if (s >= shards.size())
        throw UnownedPattern("pattern " + std::to_string(i) + " routed to missing shard " +
                             std::to_string(s));
  }

  // Bound-term ids; a term absent from the graph makes the pattern empty.
  struct Pos {
    std::optional<std::size_t> var;
    std::optional<TermId> id;
    bool missing = false;
  };
  auto resolve = [&](const PatternTerm& pt) {
    Pos pos;
    if (auto v = as_variable(pt)) {
      pos.var = slot.at(v->name);
    } else {
      pos.id = graph.find_term(*as_term(pt));
      pos.missing = !pos.id;
    }
    return pos;
  };

  std::vector<std::vector<TermId>> rows{std::vector<TermId>(slot.size(), kUnbound)};
  std::vector<bool> done(q.patterns.size(), false);
  std::vector<bool> bound_var(slot.size(), false);
  for (std::size_t step = 0; step < q.patterns.size() && !rows.empty(); ++step) {
    // Next pattern: the first remaining one connected to bound variables,
    // else the first remaining one.
    std::size_t next = q.patterns.size();
    for (std::size_t i = 0; i < q.patterns.size(); ++i) {
      if (done[i]) continue;
      if (next == q.patterns.size()) next = i;
      bool connected = false;
      for (const PatternTerm* pt : {&q.patterns[i].subject, &q.patterns[i].predicate,
                                    &q.patterns[i].object})
        if (auto v = as_variable(*pt); v && bound_var[slot.at(v->name)]) connected = true;
      if (connected) {
        next = i;
        break;
      }
    }
    done[next] = true;
    const auto& pat = q.patterns[next];
    Pos ps[3] = {resolve(pat.subject), resolve(pat.predicate), resolve(pat.object)};
    if (ps[0].missing || ps[1].missing || ps[2].missing) {
      rows.clear();
      break;
    }
    std::vector<std::vector<TermId>> out;
    for (const auto& row : rows) {
      std::optional<TermId> key[3];
      for (int k = 0; k < 3; ++k) {
        if (ps[k].id) key[k] = ps[k].id;
        else if (row[*ps[k].var] != kUnbound) key[k] = row[*ps[k].var];
      }
      for (ShardId s : targets[next]) {
        for (TripleId id : shards[s].match(key[0], key[1], key[2], graph)) {
          const Triple& t = graph.triple(id);
          const TermId vals[3] = {t.subject, t.predicate, t.object};
          std::vector<TermId> r = row;
          bool ok = true;
          for (int k = 0; k < 3 && ok; ++k) {
            if (!ps[k].var) continue;
            TermId& cell = r[*ps[k].var];
            if (cell == kUnbound) cell = vals[k];
            else ok = cell == vals[k];
          }
          if (ok) out.push_back(std::move(r));
        }
      }
    }
    rows = std::move(out);
    for (const PatternTerm* pt : {&pat.subject, &pat.predicate, &pat.object})
      if (auto v = as_variable(*pt)) bound_var[slot.at(v->name)] = true;
  }

  QueryResult result;
  result.vars = q.select_vars;
  result.rows.reserve(rows.size());
  for (const auto& row : rows) {
    std::vector<TermId> projected;
    for (const auto& v : q.select_vars) projected.push_back(row[slot.at(v)]);
    result.rows.push_back(std::move(projected));
  }

  CostEntry cost;
  cost.query_id = q.id;
  cost.frequency = frequency;
  std::tie(cost.local_joins, cost.dist_joins) = count_joins(q, fq.routes);
  cost.rows = result.rows.size();
  cost.cost_units = model.alpha * static_cast<double>(cost.dist_joins) +
                    model.beta * static_cast<double>(cost.local_joins) +
                    model.gamma * static_cast<double>(cost.rows);
  return {std::move(result), std::move(cost)};
}

struct CostReport {
  std::vector<CostEntry> entries;

  const CostEntry* find(const std::string& id) const {
    for (const auto& e : entries)
      if (e.query_id == id) return &e;
    return nullptr;
  }

  std::uint64_t total_frequency() const {
    std::uint64_t n = 0;
    for (const auto& e : entries) n += e.frequency;
    return n;
  }

  /// Sum over queries of frequency * cost_units.
  double weighted_total() const {
    double t = 0;
    for (const auto& e : entries) t += static_cast<double>(e.frequency) * e.cost_units;
    return t;
  }

  /// Cost per query execution across the workload.
  double weighted_average() const {
    auto f = total_frequency();
    return f == 0 ? 0.0 : weighted_total() / static_cast<double>(f);
  }

  std::uint64_t weighted_dist_joins() const {
    std::uint64_t n = 0;
    for (const auto& e : entries) n += e.frequency * e.dist_joins;
    return n;
  }

  bool operator==(const CostReport&) const = default;
};

/// Executes every workload query once against the deployed shards.
inline CostReport evaluate_workload(const Workload& w, const std::vector<Shard>& shards,
                                    const Partition& partition, const KnowledgeGraph& graph,
                                    const CostModel& model = {}) {
  CostReport report;
  for (const auto& [id, e] : w.entries()) {
    auto fq = rewrite_federated(e.query, partition, w.feature_options());
    report.entries.push_back(execute(fq, shards, graph, model, e.frequency).second);
  }
  return report;
}

/// evaluate_workload, then records each query's simulated runtime (cost units
/// as milliseconds) once per execution, i.e. `frequency` times.
inline CostReport run_workload(Workload& w, const std::vector<Shard>& shards,
                               const Partition& partition, const KnowledgeGraph& graph,
                               const CostModel& model = {}) {
  CostReport report = evaluate_workload(w, shards, partition, graph, model);
  for (const auto& e : report.entries)
    for (std::uint64_t i = 0; i < e.frequency; ++i) w.record_run(e.query_id, e.cost_units);
  return report;
}

inline std::string format_cost(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

/// CSV `query_id,frequency,local_joins,dist_joins,rows,cost_units`, one row
/// per query and a final `ALL` row with frequency-weighted sums.
inline void write_cost_csv(std::ostream& out, const CostReport& report) {
  out << "query_id,frequency,local_joins,dist_joins,rows,cost_units\n";
  std::uint64_t f = 0, local = 0, dist = 0, rows = 0;
  for (const auto& e : report.entries) {
    out << e.query_id << ',' << e.frequency << ',' << e.local_joins << ',' << e.dist_joins
        << ',' << e.rows << ',' << format_cost(e.cost_units) << '\n';
    f += e.frequency;
    local += e.frequency * e.local_joins;
    dist += e.frequency * e.dist_joins;
    rows += e.frequency * e.rows;
  }
  out << "ALL," << f << ',' << local << ',' << dist << ',' << rows << ','
      << format_cost(report.weighted_total()) << '\n';
}

}  // namespace kgshard
