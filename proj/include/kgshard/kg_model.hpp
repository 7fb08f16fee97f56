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
#include <istream>
#include <iterator>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "kgshard/errors.hpp"
#include "kgshard/feature.hpp"
#include "kgshard/pattern.hpp"
#include "kgshard/term.hpp"

namespace kgshard {

using TermId = std::uint32_t;
using TripleId = std::uint32_t;

/// Interns every distinct term once; ids are dense and assigned in first-seen
/// order.
class TermDictionary {
 public:
  TermId intern(const Term& t) {
    auto [it, inserted] = ids_.try_emplace(t, static_cast<TermId>(terms_.size()));
    if (inserted) terms_.push_back(t);
    return it->second;
  }

  std::optional<TermId> find(const Term& t) const {
    auto it = ids_.find(t);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  const Term& term(TermId id) const { return terms_.at(id); }
  std::size_t size() const noexcept { return terms_.size(); }

 private:
  std::vector<Term> terms_;
  std::unordered_map<Term, TermId, TermHash> ids_;
};

struct Triple {
  TermId subject;
  TermId predicate;
  TermId object;
  auto operator<=>(const Triple&) const = default;
};

struct TripleHash {
  std::size_t operator()(const Triple& t) const noexcept {
    std::uint64_t h = t.subject;
    h = h * 0x100000001b3ULL ^ t.predicate;
    h = h * 0x100000001b3ULL ^ t.object;
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

/// In-memory triple store with set semantics and S/P/O indexes. Triple ids are
/// positions in insertion order; index posting lists are therefore sorted.
class KnowledgeGraph {
 public:
  /// Adds a triple; returns false when it was already present.
  bool add(const Term& s, const Term& p, const Term& o) {
    if (s.is_literal()) throw InputError("subject must be an IRI or blank node");
    if (!p.is_iri()) throw InputError("predicate must be an IRI");
    if (s.is_iri() && !is_valid_iri(s.lexical)) throw InputError("invalid subject IRI");
    if (!is_valid_iri(p.lexical)) throw InputError("invalid predicate IRI");
    if (o.is_iri() && !is_valid_iri(o.lexical)) throw InputError("invalid object IRI");
    Triple t{dict_.intern(s), dict_.intern(p), dict_.intern(o)};
    if (!seen_.insert(t).second) return false;
    auto id = static_cast<TripleId>(triples_.size());
    triples_.push_back(t);
    index_s_[t.subject].push_back(id);
    index_p_[t.predicate].push_back(id);
    index_o_[t.object].push_back(id);
    return true;
  }

  std::size_t triple_count() const noexcept { return triples_.size(); }
  const std::vector<Triple>& triples() const noexcept { return triples_; }
  const Triple& triple(TripleId id) const { return triples_.at(id); }
  const TermDictionary& terms() const noexcept { return dict_; }
  const Term& term(TermId id) const { return dict_.term(id); }
  std::optional<TermId> find_term(const Term& t) const { return dict_.find(t); }

  std::span<const TripleId> by_subject(TermId id) const { return posting(index_s_, id); }
  std::span<const TripleId> by_predicate(TermId id) const { return posting(index_p_, id); }
  std::span<const TripleId> by_object(TermId id) const { return posting(index_o_, id); }

  /// Distinct predicate ids, ordered by term.
  std::vector<TermId> predicates() const {
    std::vector<TermId> out;
    out.reserve(index_p_.size());
    for (const auto& [id, _] : index_p_) out.push_back(id);
    std::sort(out.begin(), out.end(),
              [&](TermId a, TermId b) { return term(a) < term(b); });
    return out;
  }

  bool contains(const Triple& t) const { return seen_.contains(t); }

 private:
  using Index = std::unordered_map<TermId, std::vector<TripleId>>;

  static std::span<const TripleId> posting(const Index& index, TermId id) {
    auto it = index.find(id);
    if (it == index.end()) return {};
    return it->second;
  }

  TermDictionary dict_;
  std::vector<Triple> triples_;
  std::unordered_set<Triple, TripleHash> seen_;
  Index index_s_;
  Index index_p_;
  Index index_o_;
};

/// Parses N-Triples. Blank lines and `#` comments are skipped, duplicate
/// statements collapse. Fails fast with MalformedLine on the first bad line.
inline KnowledgeGraph parse_ntriples(std::istream& in) {
  KnowledgeGraph graph;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    TermReader reader(line);
    reader.skip_ws();
    if (reader.at_end() || reader.peek() == '#') continue;
    try {
      if (!reader.at_term_start()) throw TermSyntax{"expected subject"};
      Term s = reader.read_term();
      if (s.is_literal()) throw TermSyntax{"literal in subject position"};
      reader.skip_ws();
      if (reader.at_end() || reader.peek() == '.') throw TermSyntax{"missing predicate"};
      if (reader.peek() != '<') throw TermSyntax{"predicate must be an IRI"};
      Term p = reader.read_term();
      reader.skip_ws();
      if (reader.at_end() || reader.peek() == '.') throw TermSyntax{"missing object"};
      Term o = reader.read_term();
      reader.skip_ws();
      if (reader.peek() != '.') throw TermSyntax{"missing terminating '.'"};
      reader.advance();
      reader.skip_ws();
      if (!reader.at_end() && reader.peek() != '#')
        throw TermSyntax{"trailing characters after '.'"};
      graph.add(s, p, o);
    } catch (const TermSyntax& e) {
      throw MalformedLine(line_no, e.reason);
    } catch (const InputError& e) {
      throw MalformedLine(line_no, e.what());
    }
  }
  return graph;
}

inline void write_ntriples(std::ostream& out, const KnowledgeGraph& graph) {
  for (const auto& t : graph.triples()) {
    out << to_ntriples(graph.term(t.subject)) << ' '
        << to_ntriples(graph.term(t.predicate)) << ' '
        << to_ntriples(graph.term(t.object)) << " .\n";
  }
}

/// The graph's content as a set of term triples, for order-free comparison.
inline std::set<std::tuple<Term, Term, Term>> triple_set(const KnowledgeGraph& g) {
  std::set<std::tuple<Term, Term, Term>> out;
  for (const auto& t : g.triples())
    out.emplace(g.term(t.subject), g.term(t.predicate), g.term(t.object));
  return out;
}

namespace detail {

struct ResolvedPattern {
  std::optional<TermId> s, p, o;  // engaged for bound positions
  bool unsatisfiable = false;     // a bound term is absent from the graph
  // Repeated variables force equality between positions.
  bool s_eq_p = false, s_eq_o = false, p_eq_o = false;
};

inline ResolvedPattern resolve(const KnowledgeGraph& g, const TriplePattern& pat) {
  ResolvedPattern r;
  auto bind = [&](const PatternTerm& pt, std::optional<TermId>& slot) {
    if (auto t = as_term(pt)) {
      slot = g.find_term(*t);
      if (!slot) r.unsatisfiable = true;
    }
  };
  bind(pat.subject, r.s);
  bind(pat.predicate, r.p);
  bind(pat.object, r.o);
  auto same = [](const PatternTerm& a, const PatternTerm& b) {
    auto va = as_variable(a);
    auto vb = as_variable(b);
    return va && vb && va->name == vb->name;
  };
  r.s_eq_p = same(pat.subject, pat.predicate);
  r.s_eq_o = same(pat.subject, pat.object);
  r.p_eq_o = same(pat.predicate, pat.object);
  return r;
}

inline bool matches(const ResolvedPattern& r, const Triple& t) {
  if (r.s && *r.s != t.subject) return false;
  if (r.p && *r.p != t.predicate) return false;
  if (r.o && *r.o != t.object) return false;
  if (r.s_eq_p && t.subject != t.predicate) return false;
  if (r.s_eq_o && t.subject != t.object) return false;
  if (r.p_eq_o && t.predicate != t.object) return false;
  return true;
}

}  // namespace detail

/// Triple ids matching `pattern`, found through the smallest posting list among
/// the bound positions. Throws AllVariables when nothing is bound.
inline std::vector<TripleId> lookup(const KnowledgeGraph& graph,
                                    const TriplePattern& pattern) {
  if (is_variable(pattern.subject) && is_variable(pattern.predicate) &&
      is_variable(pattern.object))
    throw AllVariables();
  auto r = detail::resolve(graph, pattern);
  if (r.unsatisfiable) return {};
  std::span<const TripleId> best;
  bool have = false;
  auto consider = [&](std::span<const TripleId> list) {
    if (!have || list.size() < best.size()) best = list;
    have = true;
  };
  if (r.s) consider(graph.by_subject(*r.s));
  if (r.p) consider(graph.by_predicate(*r.p));
  if (r.o) consider(graph.by_object(*r.o));
  std::vector<TripleId> out;
  for (TripleId id : best)
    if (detail::matches(r, graph.triple(id))) out.push_back(id);
  return out;
}

/// Full scan; the only way to match an all-variable pattern.
inline std::vector<TripleId> scan(const KnowledgeGraph& graph,
                                  const TriplePattern& pattern) {
  auto r = detail::resolve(graph, pattern);
  if (r.unsatisfiable) return {};
  std::vector<TripleId> out;
  const auto& ts = graph.triples();
  for (TripleId id = 0; id < ts.size(); ++id)
    if (detail::matches(r, ts[id])) out.push_back(id);
  return out;
}

/// Every triple described by a feature, ignoring ownership precedence.
inline std::vector<TripleId> materialize_feature(const KnowledgeGraph& graph,
                                                 const Feature& feature) {
  auto p = graph.find_term(feature.predicate);
  if (!p) return {};
  auto by_p = graph.by_predicate(*p);
  if (feature.kind == FeatureKind::P) return {by_p.begin(), by_p.end()};
  auto o = graph.find_term(*feature.object);
  if (!o) return {};
  auto by_o = graph.by_object(*o);
  std::vector<TripleId> out;
  std::set_intersection(by_p.begin(), by_p.end(), by_o.begin(), by_o.end(),
                        std::back_inserter(out));
  return out;
}

}  // namespace kgshard
