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

// Independent oracles and hand-rolled generators shared by the test suites.

#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "kgshard.hpp"

namespace kgtest {

using namespace kgshard;

inline const std::string kUb = "http://swat.cse.lehigh.edu/onto/univ-bench.owl#";
inline const std::string kType = std::string(vocab::kRdfType);

inline std::string data_path(const std::string& rel) { return std::string(KGSHARD_DATA_DIR) + "/" + rel; }

inline Workload load_fixture(const std::string& rel, Workload w = Workload()) {
  std::ifstream in(data_path(rel));
  for (auto& r : read_workload_records(in)) w.register_query(parse_query(r.query, r.id), r.frequency);
  return w;
}

inline Term I(const std::string& s) { return Term::iri(s); }
inline Term ub(const std::string& s) { return Term::iri(kUb + s); }

inline std::uint64_t below(std::mt19937_64& rng, std::uint64_t n) { return n == 0 ? 0 : rng() % n; }

// -- whole-graph evaluation -----------------------------------------------------

using Row = std::vector<Term>;

/// Backtracking over every triple of the graph for each pattern in order;
/// no indexes. Rows are projected and sorted (multiset).
inline std::vector<Row> evaluate_bgp(const KnowledgeGraph& g, const QuerySpec& q) {
  std::vector<Row> out;
  std::map<std::string, Term> env;
  const auto& ts = g.triples();
  auto unify = [&](const PatternTerm& pt, const Term& value, std::vector<std::string>& bound) {
    if (auto v = as_variable(pt)) {
      auto it = env.find(v->name);
      if (it != env.end()) return it->second == value;
      env.emplace(v->name, value);
      bound.push_back(v->name);
      return true;
    }
    return *as_term(pt) == value;
  };
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == q.patterns.size()) {
      Row r;
      for (const auto& v : q.select_vars) r.push_back(env.at(v));
      out.push_back(std::move(r));
      return;
    }
    const auto& p = q.patterns[i];
    for (const auto& t : ts) {
      std::vector<std::string> bound;
      bool ok = unify(p.subject, g.term(t.subject), bound) &&
                unify(p.predicate, g.term(t.predicate), bound) &&
                unify(p.object, g.term(t.object), bound);
      if (ok) rec(i + 1);
      for (const auto& b : bound) env.erase(b);
    }
  };
  rec(0);
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<Row> to_rows(const KnowledgeGraph& g, const QueryResult& r) {
  std::vector<Row> out;
  for (const auto& row : r.rows) {
    Row x;
    for (TermId id : row) x.push_back(g.term(id));
    out.push_back(std::move(x));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// -- ownership ------------------------------------------------------------------

/// Owning shard of each triple by linear search of the assignment.
inline std::vector<ShardId> owner_scan(const KnowledgeGraph& g, const Partition& p) {
  std::vector<ShardId> out;
  for (const auto& t : g.triples()) {
    const Term& pred = g.term(t.predicate);
    const Term& obj = g.term(t.object);
    std::optional<ShardId> po, pp;
    for (const auto& [f, s] : p.assignment) {
      if (f.predicate != pred) continue;
      if (f.kind == FeatureKind::PO && *f.object == obj) po = s;
      if (f.kind == FeatureKind::P) pp = s;
    }
    if (po) out.push_back(*po);
    else if (pp) out.push_back(*pp);
    else out.push_back(p.orphan_assignment.at(pred));
  }
  return out;
}

/// True when the shards partition the graph exactly as `p` prescribes.
inline bool shards_consistent(const KnowledgeGraph& g, const Partition& p,
                              const std::vector<Shard>& shards, std::string* why = nullptr) {
  auto owner = owner_scan(g, p);
  std::vector<int> seen(g.triple_count(), 0);
  std::size_t total = 0;
  for (const auto& s : shards) {
    total += s.size();
    for (TripleId id : s.triples()) {
      if (id >= g.triple_count() || ++seen[id] > 1 || owner[id] != s.shard_id()) {
        if (why) *why = "triple " + std::to_string(id) + " misplaced on shard " + std::to_string(s.shard_id());
        return false;
      }
    }
  }
  if (total != g.triple_count()) {
    if (why) *why = "total " + std::to_string(total) + " != " + std::to_string(g.triple_count());
    return false;
  }
  return true;
}

// -- HAC ------------------------------------------------------------------------

/// Rescans all live cluster pairs each step, computing linkage from leaf
/// distances directly.
inline Dendrogram brute_hac(const DistanceMatrix& dm, Linkage linkage) {
  const std::size_t n = dm.size();
  Dendrogram dg;
  dg.leaves = dm.labels();
  struct C {
    std::size_t id;
    std::vector<std::size_t> leaves;
  };
  std::vector<C> live;
  for (std::size_t i = 0; i < n; ++i) live.push_back({i, {i}});
  auto dist = [&](const C& a, const C& b) {
    double mn = std::numeric_limits<double>::infinity(), mx = -1, sum = 0;
    for (auto x : a.leaves)
      for (auto y : b.leaves) {
        double d = dm.at(x, y);
        mn = std::min(mn, d);
        mx = std::max(mx, d);
        sum += d;
      }
    if (linkage == Linkage::Single) return mn;
    if (linkage == Linkage::Complete) return mx;
    return sum / static_cast<double>(a.leaves.size() * b.leaves.size());
  };
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t bi = 0, bj = 1;
    double best = std::numeric_limits<double>::infinity();
    std::pair<std::size_t, std::size_t> best_key{n, n};
    for (std::size_t i = 0; i < live.size(); ++i)
      for (std::size_t j = i + 1; j < live.size(); ++j) {
        double d = dist(live[i], live[j]);
        std::size_t a = live[i].leaves.front(), b = live[j].leaves.front();
        std::pair<std::size_t, std::size_t> key{std::min(a, b), std::max(a, b)};
        // Heights within 1e-12 count as ties so both sides apply the key rule.
        if (d < best - 1e-12 || (std::abs(d - best) <= 1e-12 && key < best_key)) {
          best = d;
          best_key = key;
          bi = i;
          bj = j;
        }
      }
    C merged{n + step, live[bi].leaves};
    merged.leaves.insert(merged.leaves.end(), live[bj].leaves.begin(), live[bj].leaves.end());
    std::sort(merged.leaves.begin(), merged.leaves.end());
    dg.merges.push_back({std::min(live[bi].id, live[bj].id), std::max(live[bi].id, live[bj].id), best});
    live.erase(live.begin() + static_cast<std::ptrdiff_t>(bj));
    live[bi] = std::move(merged);
  }
  return dg;
}

// -- generators -------------------------------------------------------------------

struct GraphShape {
  std::size_t triples = 100;
  std::size_t nodes = 30;
  std::size_t predicates = 6;
  std::size_t classes = 4;
  double type_share = 0.25;
};

inline KnowledgeGraph random_graph(std::mt19937_64& rng, const GraphShape& s) {
  KnowledgeGraph g;
  auto node = [&](std::uint64_t i) { return I("http://ex.org/n" + std::to_string(i)); };
  std::size_t guard = 0;
  while (g.triple_count() < s.triples && guard++ < s.triples * 20) {
    Term subj = node(below(rng, s.nodes));
    if (s.classes > 0 && static_cast<double>(below(rng, 1000)) < s.type_share * 1000) {
      g.add(subj, I(kType), I("http://ex.org/C" + std::to_string(below(rng, s.classes))));
      continue;
    }
    Term pred = I("http://ex.org/p" + std::to_string(below(rng, s.predicates)));
    Term obj = below(rng, 5) == 0 ? Term::literal("v" + std::to_string(below(rng, 10)))
                                  : node(below(rng, s.nodes));
    g.add(subj, pred, obj);
  }
  return g;
}

/// A connected query walked out of actual triples, so it usually matches.
inline QuerySpec random_query(std::mt19937_64& rng, const KnowledgeGraph& g,
                              std::size_t max_patterns, const std::string& id = "q") {
  QuerySpec q;
  q.id = id;
  std::map<Term, std::string> var_of;
  auto as_var = [&](const Term& t) -> PatternTerm {
    auto [it, inserted] = var_of.try_emplace(t, "v" + std::to_string(var_of.size()));
    return Variable{it->second};
  };
  const std::size_t n = 1 + below(rng, max_patterns);
  TripleId cur = static_cast<TripleId>(below(rng, g.triple_count()));
  for (std::size_t i = 0; i < n; ++i) {
    const Triple& t = g.triple(cur);
    TriplePattern p;
    const Term& s = g.term(t.subject);
    const Term& pr = g.term(t.predicate);
    const Term& o = g.term(t.object);
    p.subject = (i == 0 || below(rng, 5) != 0) ? as_var(s) : PatternTerm(s);
    p.predicate = below(rng, 8) == 0 ? as_var(Term::iri("urn:pred:" + std::to_string(i))) : PatternTerm(pr);
    if (below(rng, 3) == 0 || o.is_literal()) p.object = o;
    else p.object = as_var(o);
    if (below(rng, 25) == 0) p.object = Term::iri("http://ex.org/absent");
    q.patterns.push_back(std::move(p));
    // Next triple shares a node with this one.
    std::vector<TripleId> next;
    for (TermId node : {t.subject, t.object}) {
      for (TripleId x : g.by_subject(node)) next.push_back(x);
      for (TripleId x : g.by_object(node)) next.push_back(x);
    }
    if (next.empty()) break;
    cur = next[below(rng, next.size())];
  }
  std::set<std::string> vars;
  for (const auto& p : q.patterns)
    for (const PatternTerm* pt : {&p.subject, &p.predicate, &p.object})
      if (auto v = as_variable(*pt)) vars.insert(v->name);
  for (const auto& v : vars)
    if (below(rng, 3) != 0) q.select_vars.push_back(v);
  if (q.select_vars.empty()) q.select_vars.push_back(*vars.begin());
  return q;
}

/// Random k-way partition over a random inventory: P for most predicates,
/// some PO features, orphans for predicates left uncovered.
inline Partition random_partition(std::mt19937_64& rng, const KnowledgeGraph& g, std::uint32_t k) {
  Partition p;
  p.k = k;
  for (TermId pid : g.predicates()) {
    const Term& pred = g.term(pid);
    if (below(rng, 5) != 0) p.assignment[Feature::p(pred)] = static_cast<ShardId>(below(rng, k));
    else p.orphan_assignment[pred] = static_cast<ShardId>(below(rng, k));
    for (TripleId id : g.by_predicate(pid))
      if (below(rng, 6) == 0)
        p.assignment[Feature::po(pred, g.term(g.triple(id).object))] = static_cast<ShardId>(below(rng, k));
  }
  return p;
}

/// Solution count of `q`, or nullopt once it passes `limit` or the search
/// visits more than `budget` partial bindings. Patterns are taken most-bound
/// first; only used to keep random workloads from exploding.
inline std::optional<std::size_t> bounded_solutions(const KnowledgeGraph& g, const QuerySpec& q,
                                                    std::size_t limit, std::size_t budget = 200000) {
  std::vector<std::size_t> order;
  std::set<std::string> seen;
  std::vector<bool> used(q.patterns.size(), false);
  for (std::size_t step = 0; step < q.patterns.size(); ++step) {
    std::size_t best = 0;
    int best_bound = -1;
    for (std::size_t i = 0; i < q.patterns.size(); ++i) {
      if (used[i]) continue;
      int bound = 0;
      for (const PatternTerm* pt : {&q.patterns[i].subject, &q.patterns[i].predicate, &q.patterns[i].object}) {
        auto v = as_variable(*pt);
        if (!v || seen.contains(v->name)) ++bound;
      }
      if (bound > best_bound) {
        best = i;
        best_bound = bound;
      }
    }
    used[best] = true;
    order.push_back(best);
    for (const PatternTerm* pt : {&q.patterns[best].subject, &q.patterns[best].predicate, &q.patterns[best].object})
      if (auto v = as_variable(*pt)) seen.insert(v->name);
  }
  std::map<std::string, Term> env;
  std::size_t found = 0, steps = 0;
  bool over = false;
  std::function<void(std::size_t)> rec = [&](std::size_t depth) {
    if (over) return;
    if (++steps > budget || found > limit) {
      over = true;
      return;
    }
    if (depth == order.size()) {
      ++found;
      return;
    }
    TriplePattern p = q.patterns[order[depth]];
    for (PatternTerm* pt : {&p.subject, &p.predicate, &p.object})
      if (auto v = as_variable(*pt); v && env.contains(v->name)) *pt = env.at(v->name);
    std::vector<TripleId> hits = is_variable(p.subject) && is_variable(p.predicate) && is_variable(p.object)
                                     ? scan(g, p)
                                     : lookup(g, p);
    for (TripleId id : hits) {
      const Triple& t = g.triple(id);
      std::vector<std::string> fresh;
      bool ok = true;
      auto bind = [&](const PatternTerm& pt, TermId value) {
        auto v = as_variable(pt);
        if (!v) return;
        auto it = env.find(v->name);
        if (it == env.end()) {
          env.emplace(v->name, g.term(value));
          fresh.push_back(v->name);
        } else if (it->second != g.term(value)) {
          ok = false;
        }
      };
      bind(p.subject, t.subject);
      bind(p.predicate, t.predicate);
      bind(p.object, t.object);
      if (ok) rec(depth + 1);
      for (const auto& v : fresh) env.erase(v);
      if (over) return;
    }
  };
  rec(0);
  if (over || found > limit) return std::nullopt;
  return found;
}

/// A workload of random queries over `g`. With `max_rows`, queries whose
/// answers would exceed it are redrawn.
inline Workload random_workload(std::mt19937_64& rng, const KnowledgeGraph& g, std::size_t queries,
                                std::size_t max_patterns, const std::string& prefix = "q",
                                std::size_t max_rows = 0) {
  Workload w;
  for (std::size_t i = 0; i < queries; ++i) {
    auto q = random_query(rng, g, max_patterns, prefix + std::to_string(i));
    int tries = 0;
    while (max_rows > 0 && !bounded_solutions(g, q, max_rows) && ++tries < 100)
      q = random_query(rng, g, max_patterns, prefix + std::to_string(i));
    if (tries < 100) w.register_query(std::move(q), 1 + below(rng, 5));
  }
  return w;
}

/// Random symmetric matrix; `quantized` draws from eighths so ties are common.
inline DistanceMatrix random_matrix(std::mt19937_64& rng, std::size_t n, bool quantized) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back("q" + std::to_string(i));
  DistanceMatrix dm(labels);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      dm.set(i, j, quantized ? static_cast<double>(below(rng, 9)) / 8.0
                             : static_cast<double>(rng() >> 11) / 9007199254740992.0);
  return dm;
}

}  // namespace kgtest
