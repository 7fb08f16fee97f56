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
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "kgshard/clustering.hpp"
#include "kgshard/errors.hpp"
#include "kgshard/federation_sim.hpp"
#include "kgshard/kg_model.hpp"
#include "kgshard/partition.hpp"
#include "kgshard/query_analyzer.hpp"
#include "kgshard/workload.hpp"

namespace kgshard {

struct Weights {
  double w1 = 1, w2 = 1, w3 = 1, w4 = 1, w5 = 1, w6 = 1;
  double w_join = 1;
  bool operator==(const Weights&) const = default;
};

/// How the join term of a score aggregates over the queries referencing the
/// scored feature. Both are penalties: placements that leave joins
/// distributed score lower. MinPenalty charges only the referencing query with
/// the fewest distributed joins (times its frequency); SumPenalty charges
/// every referencing query by frequency, so it reacts to frequency bias.
enum class JoinTerm { MinPenalty, SumPenalty };

inline std::string_view to_string(JoinTerm t) {
  return t == JoinTerm::MinPenalty ? "min" : "sum";
}

inline JoinTerm parse_join_term(std::string_view s) {
  if (s == "min") return JoinTerm::MinPenalty;
  if (s == "sum") return JoinTerm::SumPenalty;
  throw InputError("unknown join term '" + std::string(s) + "' (expected min or sum)");
}

struct PartitionerConfig {
  Weights weights;
  JoinTerm join_term = JoinTerm::SumPenalty;
  double balance_tolerance = 0.25;
  Linkage linkage = Linkage::Single;
  double cut_d = 0.75;
  CostModel cost;
  int max_sweeps = 5;

  void validate() const {
    const double ws[] = {weights.w1, weights.w2, weights.w3, weights.w4,
                         weights.w5, weights.w6, weights.w_join};
    bool positive = false;
    for (double w : ws) {
      if (!(w >= 0) || std::isinf(w)) throw InputError("weights must be finite and >= 0");
      positive = positive || w > 0;
    }
    if (!positive) throw InputError("at least one weight must be > 0");
    if (!(balance_tolerance >= 0)) throw InputError("balance tolerance must be >= 0");
    if (!(cut_d >= 0 && cut_d <= 1)) throw InputError("cut distance must be in [0, 1]");
    if (max_sweeps < 1) throw InputError("max_sweeps must be >= 1");
    if (!(cost.alpha >= cost.beta && cost.beta >= 0 && cost.gamma >= 0))
      throw InputError("cost constants must satisfy alpha >= beta >= 0, gamma >= 0");
  }
};

struct FeatureStats {
  Feature feature;
  double p_c = 0, q_c = 0, s_c = 0;
  double p_t = 0, q_t = 0, s_t = 0;
};

/// Weighted statistics part of a score.
inline double key_feature_score(const FeatureStats& s, const Weights& w) {
  return (s.p_c * w.w1 + s.q_c * w.w2 + s.s_c * w.w3) +
         (s.p_t * w.w4 + s.q_t * w.w5 + s.s_t * w.w6);
}

/// Cross-shard pattern joins of `q` once federated under `p`.
inline std::size_t distributed_joins(const QuerySpec& q, const Partition& p,
                                     const FeatureOptions& opts = {}) {
  auto fq = rewrite_federated(q, p, opts);
  return count_joins(q, fq.routes).second;
}

/// Group features ordered by frequency-weighted usage, descending; ties in
/// feature order.
inline std::vector<Feature> key_features(const std::set<Feature>& group, const Workload& w) {
  std::vector<std::pair<std::uint64_t, Feature>> ranked;
  for (const auto& f : group) ranked.emplace_back(usage_weight(w, f), f);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<Feature> out;
  for (auto& [_, f] : ranked) out.push_back(std::move(f));
  return out;
}

inline std::vector<Feature> key_features(const FeatureGroup& g, const Workload& w) {
  return key_features(g.features, w);
}

/// Tentative feature placement with per-shard owned-triple loads.
class Placement {
 public:
  Placement(const Ownership& own, std::uint32_t k) : own_(&own), load_(k, 0) {}

  /// Starts from `p`, keeping only features in `keep` (all when null), and
  /// counting orphan triples on their assigned shards.
  static Placement from(const Ownership& own, const Partition& p,
                        const std::set<Feature>* keep = nullptr) {
    Placement out(own, p.k);
    for (const auto& [f, s] : p.assignment)
      if (!keep || keep->contains(f)) out.place(f, s);
    const auto& g = own.graph();
    for (const auto& [pred, ids] : own.orphans()) {
      auto it = p.orphan_assignment.find(g.term(pred));
      if (it != p.orphan_assignment.end()) out.load_.at(it->second) += ids.size();
    }
    return out;
  }

  std::uint32_t k() const noexcept { return static_cast<std::uint32_t>(load_.size()); }
  const Ownership& ownership() const noexcept { return *own_; }

  void place(const Feature& f, ShardId s) {
    remove(f);
    assignment_[f] = s;
    load_.at(s) += own_->mass(f);
  }

  void remove(const Feature& f) {
    auto it = assignment_.find(f);
    if (it == assignment_.end()) return;
    load_[it->second] -= own_->mass(f);
    assignment_.erase(it);
  }

  std::optional<ShardId> shard_of(const Feature& f) const {
    auto it = assignment_.find(f);
    if (it == assignment_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t load(ShardId s) const { return load_.at(s); }
  const std::vector<std::size_t>& loads() const noexcept { return load_; }
  const std::map<Feature, ShardId>& assignment() const noexcept { return assignment_; }

  ShardId smallest_shard() const {
    return static_cast<ShardId>(std::min_element(load_.begin(), load_.end()) - load_.begin());
  }

 private:
  const Ownership* own_;
  std::vector<std::size_t> load_;
  std::map<Feature, ShardId> assignment_;
};

/// Largest owned-triple count a shard may reach.
inline double shard_capacity(std::size_t total, std::uint32_t k, double tolerance) {
  if (std::isinf(tolerance)) return std::numeric_limits<double>::infinity();
  return (1.0 + tolerance) * static_cast<double>(total) / static_cast<double>(k);
}

namespace detail {

inline bool fits(const Placement& pl, ShardId s, std::size_t mass, double cap) {
  return static_cast<double>(pl.load(s) + mass) <= cap + 1e-9;
}

}  // namespace detail

/// Workload-derived data used to score features against candidate shards.
class Scorer {
 public:
  Scorer(const Workload& w, const Ownership& own, const PartitionerConfig& cfg)
      : own_(&own), cfg_(&cfg) {
    for (const auto& [id, e] : w.entries()) {
      QueryInfo qi;
      qi.frequency = e.frequency;
      for (const auto& p : e.query.patterns) qi.pattern_feature.push_back(feature_of(p, w.feature_options()));
      qi.joins = pattern_joins(e.query);
      qi.features = e.features.features;
      for (const auto& j : e.features.joins)
        if (j.left && j.right && *j.left != *j.right) {
          qi.adj[*j.left].insert(*j.right);
          qi.adj[*j.right].insert(*j.left);
        }
      std::size_t index = queries_.size();
      for (const auto& f : qi.features) queries_of_[f].push_back(index);
      queries_.push_back(std::move(qi));
    }
  }

  /// Statistics of `f` as if placed on `c`, with every other feature where
  /// `pl` has it.
  FeatureStats stats(const Feature& f, ShardId c, const Placement& pl) const {
    FeatureStats s;
    s.feature = f;
    std::set<Feature> peers;
    auto it = queries_of_.find(f);
    if (it != queries_of_.end()) {
      for (std::size_t qi : it->second) {
        for (const auto& peer : reachable(queries_[qi], f)) {
          peers.insert(peer);
          s.q_t += 1;
          if (pl.shard_of(peer) == c) s.q_c += 1;
        }
      }
    }
    s.p_t = static_cast<double>(peers.size());
    for (const auto& peer : peers)
      if (pl.shard_of(peer) == c) s.p_c += 1;
    const std::size_t mass = own_->mass(f);
    std::size_t load = pl.load(c);
    if (pl.shard_of(f) == c) load -= mass;
    s.s_c = load + mass == 0 ? 0.0 : static_cast<double>(mass) / static_cast<double>(load + mass);
    s.s_t = own_->total() == 0 ? 0.0
                               : static_cast<double>(mass) / static_cast<double>(own_->total());
    return s;
  }

  /// Distributed joins of query `qi` with `f` on `c`; joins touching an
  /// unplaced feature are skipped.
  std::size_t distributed_joins_with(std::size_t qi, const Feature& f, ShardId c,
                                     const Placement& pl) const {
    const QueryInfo& q = queries_[qi];
    auto shard = [&](const Feature& g) -> std::optional<ShardId> {
      return g == f ? std::optional<ShardId>(c) : pl.shard_of(g);
    };
    std::vector<std::size_t> count(pl.k(), 0);
    for (const auto& g : q.features)
      if (auto s = shard(g)) ++count[*s];
    const ShardId primary =
        static_cast<ShardId>(std::max_element(count.begin(), count.end()) - count.begin());
    std::vector<std::optional<ShardId>> home;
    for (const auto& pf : q.pattern_feature) home.push_back(pf ? shard(*pf) : primary);
    std::size_t dist = 0;
    for (const auto& j : q.joins)
      if (home[j.left] && home[j.right] && *home[j.left] != *home[j.right]) ++dist;
    return dist;
  }

  double join_term(const Feature& f, ShardId c, const Placement& pl) const {
    auto it = queries_of_.find(f);
    if (it == queries_of_.end()) return 0;
    const double w = cfg_->weights.w_join;
    if (cfg_->join_term == JoinTerm::SumPenalty) {
      double sum = 0;
      for (std::size_t qi : it->second)
        sum += static_cast<double>(queries_[qi].frequency) *
               static_cast<double>(distributed_joins_with(qi, f, c, pl));
      return -w * sum;
    }
    std::optional<std::size_t> best_d;
    std::uint64_t best_f = 0;
    for (std::size_t qi : it->second) {
      std::size_t d = distributed_joins_with(qi, f, c, pl);
      if (!best_d || d < *best_d) {
        best_d = d;
        best_f = queries_[qi].frequency;
      }
    }
    return -w * static_cast<double>(*best_d) * static_cast<double>(best_f);
  }

  double score(const Feature& f, ShardId c, const Placement& pl) const {
    return key_feature_score(stats(f, c, pl), cfg_->weights) + join_term(f, c, pl);
  }

  /// Frequency-weighted count of workload joins between two features.
  std::uint64_t join_weight(const Feature& a, const Feature& b) const {
    std::uint64_t n = 0;
    for (const auto& q : queries_) {
      for (const auto& j : q.joins) {
        const auto& l = q.pattern_feature[j.left];
        const auto& r = q.pattern_feature[j.right];
        if (l && r && ((*l == a && *r == b) || (*l == b && *r == a))) n += q.frequency;
      }
    }
    return n;
  }

 private:
  struct QueryInfo {
    std::uint64_t frequency = 1;
    std::vector<std::optional<Feature>> pattern_feature;
    std::vector<PatternJoin> joins;
    std::set<Feature> features;
    std::map<Feature, std::set<Feature>> adj;
  };

  static std::vector<Feature> reachable(const QueryInfo& q, const Feature& f) {
    std::set<Feature> seen{f};
    std::deque<Feature> todo{f};
    std::vector<Feature> out;
    while (!todo.empty()) {
      Feature cur = todo.front();
      todo.pop_front();
      auto it = q.adj.find(cur);
      if (it == q.adj.end()) continue;
      for (const auto& n : it->second)
        if (seen.insert(n).second) {
          out.push_back(n);
          todo.push_back(n);
        }
    }
    return out;
  }

  const Ownership* own_;
  const PartitionerConfig* cfg_;
  std::vector<QueryInfo> queries_;
  std::map<Feature, std::vector<std::size_t>> queries_of_;
};

/// Statistics of a feature on the shard it is assigned to.
inline FeatureStats feature_stats(const Feature& f, ShardId shard, const Partition& p,
                                  const Ownership& own, const Workload& w) {
  if (p.shard_of(f) != shard)
    throw FeatureNotResident(to_string(f) + " is not on shard " + std::to_string(shard));
  PartitionerConfig cfg;
  Scorer scorer(w, own, cfg);
  return scorer.stats(f, shard, Placement::from(own, p));
}

/// Full score of `f` on `candidate`, all other features as in `p`.
inline double score_feature(const Feature& f, ShardId candidate, const FeatureStats& stats,
                            const PartitionerConfig& cfg, const Workload& w,
                            const Partition& p, const Ownership& own) {
  Scorer scorer(w, own, cfg);
  return key_feature_score(stats, cfg.weights) +
         scorer.join_term(f, candidate, Placement::from(own, p));
}

namespace detail {

/// Best-scoring shard that can take `f` (lowest id on ties).
inline ShardId best_fitting_shard(const Feature& f, Placement& pl, double cap,
                                  const std::function<double(const Feature&, ShardId)>& score) {
  const std::size_t mass = pl.ownership().mass(f);
  std::optional<ShardId> best;
  double best_score = 0;
  for (ShardId c = 0; c < pl.k(); ++c) {
    if (!fits(pl, c, mass, cap)) continue;
    double s = score(f, c);
    if (!best || s > best_score) {
      best = c;
      best_score = s;
    }
  }
  if (!best)
    throw InfeasibleBalance("no shard has room for " + to_string(f) + " (" +
                            std::to_string(mass) + " triples)");
  return *best;
}

/// Gauss-Seidel sweeps: each feature in `order` moves to its best shard
/// given the current placement of all others, until nothing moves.
inline void sweep(Placement& pl, const std::vector<Feature>& order, double cap,
                  const Scorer& scorer, int max_sweeps) {
  auto score = [&](const Feature& f, ShardId c) { return scorer.score(f, c, pl); };
  for (int round = 0; round < max_sweeps; ++round) {
    bool moved = false;
    for (const auto& f : order) {
      auto before = pl.shard_of(f);
      pl.remove(f);
      ShardId to = best_fitting_shard(f, pl, cap, score);
      pl.place(f, to);
      moved = moved || before != to;
    }
    if (!moved) break;
  }
}

}  // namespace detail

/// Assigns each feature of `order` to its highest-scoring shard with room,
/// per a fixed score table (`scores[f][shard]`). Features of `base` not in
/// `order` keep their shards.
inline Partition balance_partition(const std::map<Feature, std::vector<double>>& scores,
                                   const std::vector<Feature>& order, const Partition& base,
                                   const Ownership& own, double tolerance) {
  std::set<Feature> keep;
  for (const auto& [f, _] : base.assignment) keep.insert(f);
  for (const auto& f : order) keep.erase(f);
  Placement pl = Placement::from(own, base, &keep);
  const double cap = shard_capacity(own.total(), base.k, tolerance);
  auto score = [&](const Feature& f, ShardId c) { return scores.at(f).at(c); };
  for (const auto& f : order) pl.place(f, detail::best_fitting_shard(f, pl, cap, score));
  Partition out = base;
  out.assignment = pl.assignment();
  return out;
}

/// Places `unclustered` features: next to the clustered feature sharing the
/// most subjects (plus workload joins) when that shard has room, else
/// largest-first onto the currently smallest shard.
inline void proximity_place(Placement& pl, const std::set<Feature>& clustered,
                            const std::set<Feature>& unclustered, const Scorer& scorer,
                            double cap) {
  const Ownership& own = pl.ownership();
  const KnowledgeGraph& g = own.graph();
  auto subjects = [&](const Feature& f) {
    std::vector<TermId> out;
    if (auto i = own.index_of(f))
      for (TripleId id : own.owned(*i)) out.push_back(g.triple(id).subject);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };
  std::unordered_map<TermId, std::vector<const Feature*>> by_subject;
  for (const auto& c : clustered)
    for (TermId s : subjects(c)) by_subject[s].push_back(&c);

  std::vector<Feature> order(unclustered.begin(), unclustered.end());
  std::stable_sort(order.begin(), order.end(), [&](const Feature& a, const Feature& b) {
    return own.mass(a) > own.mass(b);
  });

  std::vector<Feature> leftover;
  for (const auto& u : order) {
    std::map<Feature, std::uint64_t> prox;
    for (TermId s : subjects(u)) {
      auto it = by_subject.find(s);
      if (it == by_subject.end()) continue;
      for (const Feature* c : it->second) ++prox[*c];
    }
    for (const auto& c : clustered)
      if (auto jw = scorer.join_weight(u, c)) prox[c] += jw;
    const Feature* best = nullptr;
    std::uint64_t best_n = 0;
    for (const auto& [c, n] : prox)
      if (n > best_n && pl.shard_of(c)) {
        best = &c;
        best_n = n;
      }
    if (best) {
      ShardId s = *pl.shard_of(*best);
      if (detail::fits(pl, s, own.mass(u), cap)) {
        pl.place(u, s);
        continue;
      }
    }
    leftover.push_back(u);
  }
  for (const auto& u : leftover) {
    ShardId s = pl.smallest_shard();
    if (!detail::fits(pl, s, own.mass(u), cap))
      throw InfeasibleBalance("no shard has room for " + to_string(u) + " (" +
                              std::to_string(own.mass(u)) + " triples)");
    pl.place(u, s);
  }
}

namespace detail {

inline std::vector<FeatureGroup> feature_groups(const Workload& w, const PartitionerConfig& cfg) {
  if (w.empty()) return {};
  return cut(hac(build_distance_matrix(w), cfg.linkage), cfg.cut_d, w);
}

inline std::set<Feature> clustered_features(const std::vector<FeatureGroup>& groups) {
  std::set<Feature> out;
  for (const auto& g : groups) out.insert(g.features.begin(), g.features.end());
  return out;
}

inline void stamp(Partition& p, const Workload& w) {
  p.workload_fingerprint = w.fingerprint();
  p.frequencies.clear();
  for (const auto& [id, e] : w.entries()) p.frequencies[id] = e.frequency;
}

}  // namespace detail

/// Workload-aware starting partition: feature groups from the dendrogram cut
/// go largest-first to the smallest shard, then scoring sweeps under the
/// balance cap, then proximity placement of every feature no query uses.
inline Partition initial_partition(const KnowledgeGraph& graph, const Workload& w,
                                   std::uint32_t k, const PartitionerConfig& cfg = {}) {
  cfg.validate();
  if (k == 0) throw InputError("k must be >= 1");
  const auto preds = graph.predicates().size();
  if (preds < k) throw TooFewFeatures(preds, k);

  const std::set<Feature> inventory = build_inventory(graph, w.features());
  Ownership own(graph, inventory);
  Scorer scorer(w, own, cfg);
  Placement pl(own, k);
  const double cap = shard_capacity(own.total(), k, cfg.balance_tolerance);

  auto groups = detail::feature_groups(w, cfg);
  std::vector<std::pair<std::size_t, std::size_t>> by_mass;  // (mass, group index)
  for (std::size_t i = 0; i < groups.size(); ++i) {
    std::size_t m = 0;
    for (const auto& f : groups[i].features) m += own.mass(f);
    by_mass.emplace_back(m, i);
  }
  std::stable_sort(by_mass.begin(), by_mass.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::map<Feature, std::set<ShardId>> targets;
  for (const auto& [_, gi] : by_mass) {
    ShardId target = pl.smallest_shard();
    for (const auto& f : groups[gi].features) {
      targets[f].insert(target);
      if (!pl.shard_of(f)) pl.place(f, target);
    }
  }
  for (const auto& [f, ts] : targets) {
    if (ts.size() < 2) continue;
    std::optional<ShardId> best;
    double best_score = 0;
    for (ShardId c : ts) {
      double s = scorer.score(f, c, pl);
      if (!best || s > best_score) {
        best = c;
        best_score = s;
      }
    }
    pl.place(f, *best);
  }

  const std::set<Feature> clustered = detail::clustered_features(groups);
  std::vector<Feature> order;
  for (const auto& g : groups)
    for (const auto& f : key_features(g, w))
      if (std::find(order.begin(), order.end(), f) == order.end()) order.push_back(f);
  detail::sweep(pl, order, cap, scorer, cfg.max_sweeps);

  std::set<Feature> unclustered;
  for (const auto& f : inventory)
    if (!clustered.contains(f)) unclustered.insert(f);
  proximity_place(pl, clustered, unclustered, scorer, cap);

  Partition out;
  out.k = k;
  out.assignment = pl.assignment();
  out.version = 1;
  detail::stamp(out, w);
  return out;
}

enum class AdaptOutcome { NoOp, Committed, Reverted };

inline std::string_view to_string(AdaptOutcome o) {
  switch (o) {
    case AdaptOutcome::NoOp: return "no-op";
    case AdaptOutcome::Committed: return "committed";
    case AdaptOutcome::Reverted: return "reverted";
  }
  return "?";
}

struct AdaptResult {
  AdaptOutcome outcome = AdaptOutcome::NoOp;
  /// The partition in force afterwards: the tentative one when committed,
  /// otherwise the input unchanged.
  Partition partition;
  /// Moves from the input partition to the tentative one. Applied only when
  /// committed.
  MigrationPlan plan;
  CostReport before;
  CostReport after;
  /// Queries whose frequency rose but whose distributed joins would too.
  std::vector<std::string> regressed;
};

/// One adaptation round against the current workload. The tentative
/// partition is committed only if the frequency-weighted simulated cost
/// drops strictly and no query whose frequency rose since the last commit
/// gains distributed joins; otherwise the input partition stands.
/// `force` runs the round even when the workload matches the one the
/// partition was built for.
inline AdaptResult adapt(const Partition& current, const KnowledgeGraph& graph,
                         const Workload& w, const PartitionerConfig& cfg = {},
                         bool force = false) {
  cfg.validate();
  AdaptResult r;
  r.partition = current;
  const std::set<Feature> inventory = build_inventory(graph, w.features(), &current);
  const Partition extended = extend_partition(current, inventory);
  r.before = evaluate_workload(w, deploy(graph, extended), extended, graph, cfg.cost);
  if (!force && current.workload_fingerprint == w.fingerprint()) {
    r.after = r.before;
    r.plan.predicted_cost_before = r.plan.predicted_cost_after = r.before.weighted_total();
    return r;
  }

  Ownership own(graph, inventory);
  Scorer scorer(w, own, cfg);
  const double cap = shard_capacity(own.total(), current.k, cfg.balance_tolerance);
  auto groups = detail::feature_groups(w, cfg);
  const std::set<Feature> clustered = detail::clustered_features(groups);

  std::set<Feature> unclustered, keep;
  for (const auto& f : inventory) {
    // Unused features that own nothing stay put; moving them is pure churn.
    if (clustered.contains(f) || own.mass(f) == 0) keep.insert(f);
    else unclustered.insert(f);
  }
  Placement pl = Placement::from(own, extended, &keep);
  std::vector<Feature> order;
  for (const auto& g : groups)
    for (const auto& f : key_features(g, w))
      if (std::find(order.begin(), order.end(), f) == order.end()) order.push_back(f);
  detail::sweep(pl, order, cap, scorer, cfg.max_sweeps);
  proximity_place(pl, clustered, unclustered, scorer, cap);

  Partition tentative = extended;
  tentative.assignment = pl.assignment();
  r.plan = plan_migration(own, extended, tentative);
  r.after = evaluate_workload(w, deploy(graph, tentative), tentative, graph, cfg.cost);
  r.plan.predicted_cost_before = r.before.weighted_total();
  r.plan.predicted_cost_after = r.after.weighted_total();

  for (const auto& e : r.after.entries) {
    auto old = current.frequencies.find(e.query_id);
    if (old == current.frequencies.end() || e.frequency <= old->second) continue;
    if (e.dist_joins > r.before.find(e.query_id)->dist_joins) r.regressed.push_back(e.query_id);
  }
  if (r.plan.predicted_cost_after < r.plan.predicted_cost_before && r.regressed.empty()) {
    r.outcome = AdaptOutcome::Committed;
    r.partition = std::move(tentative);
    r.partition.version = current.version + 1;
    detail::stamp(r.partition, w);
  } else {
    r.outcome = AdaptOutcome::Reverted;
  }
  return r;
}

/// Per-query cost before and after adaptation, with a weighted `ALL` row.
inline void write_comparison_csv(std::ostream& out, const CostReport& before,
                                 const CostReport& after) {
  out << "query_id,frequency,dist_joins_before,dist_joins_after,cost_before,cost_after\n";
  for (const auto& b : before.entries) {
    const CostEntry* a = after.find(b.query_id);
    out << b.query_id << ',' << b.frequency << ',' << b.dist_joins << ','
        << (a ? a->dist_joins : 0) << ',' << format_cost(b.cost_units) << ','
        << format_cost(a ? a->cost_units : 0) << '\n';
  }
  out << "ALL," << before.total_frequency() << ',' << before.weighted_dist_joins() << ','
      << after.weighted_dist_joins() << ',' << format_cost(before.weighted_total()) << ','
      << format_cost(after.weighted_total()) << '\n';
}

/// Largest shard size over the mean, from owned-triple counts.
inline double shard_skew(const std::vector<std::size_t>& sizes) {
  if (sizes.empty()) return 0;
  std::size_t total = 0, mx = 0;
  for (auto s : sizes) {
    total += s;
    mx = std::max(mx, s);
  }
  if (total == 0) return 1;
  return static_cast<double>(mx) * static_cast<double>(sizes.size()) / static_cast<double>(total);
}

inline std::vector<std::size_t> shard_sizes(const KnowledgeGraph& graph, const Partition& p) {
  Ownership own(graph, p);
  std::vector<std::size_t> out(p.k, 0);
  for (TripleId id = 0; id < graph.triple_count(); ++id) ++out.at(shard_of_triple(own, p, id));
  return out;
}

}  // namespace kgshard
