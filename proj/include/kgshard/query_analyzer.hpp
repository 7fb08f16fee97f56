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
#include <array>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "kgshard/errors.hpp"
#include "kgshard/feature.hpp"
#include "kgshard/pattern.hpp"
#include "kgshard/term.hpp"

namespace kgshard {

/// A parsed basic-graph-pattern SELECT query.
struct QuerySpec {
  std::string id;
  std::map<std::string, std::string> prefixes;
  std::vector<std::string> select_vars;
  std::vector<TriplePattern> patterns;
};

namespace detail {

enum class TokKind { Word, Var, Iri, PName, Literal, LBrace, RBrace, Dot, Star, Punct, End };

struct Token {
  TokKind kind = TokKind::End;
  std::string text;  // Literal: the full source text of the literal
  std::size_t pos = 0;
};

inline bool pn_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
         c == '.' || static_cast<unsigned char>(c) >= 0x80;
}

inline std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_ws_and_comments();
      if (pos_ >= text_.size()) {
        out.push_back({TokKind::End, "", pos_});
        return out;
      }
      out.push_back(next());
    }
  }

 private:
  void skip_ws_and_comments() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  Token next() {
    std::size_t start = pos_;
    char c = text_[pos_];
    switch (c) {
      case '{': ++pos_; return {TokKind::LBrace, "{", start};
      case '}': ++pos_; return {TokKind::RBrace, "}", start};
      case '.': ++pos_; return {TokKind::Dot, ".", start};
      case '*': ++pos_; return {TokKind::Star, "*", start};
      case '<': {
        auto end = text_.find('>', pos_);
        if (end == std::string_view::npos) throw SyntaxError(start, "'>' closing IRI");
        pos_ = end + 1;
        return {TokKind::Iri, std::string(text_.substr(start + 1, end - start - 1)), start};
      }
      case '?':
      case '$': {
        ++pos_;
        std::size_t b = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
          ++pos_;
        if (pos_ == b) throw SyntaxError(start, "variable name");
        return {TokKind::Var, std::string(text_.substr(b, pos_ - b)), start};
      }
      case '"': return literal(start);
      default: break;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == ':' || c == '_') {
      while (pos_ < text_.size() && (pn_char(text_[pos_]) || text_[pos_] == ':')) ++pos_;
      // A trailing '.' terminates the triple, not the name.
      while (pos_ > start + 1 && text_[pos_ - 1] == '.') --pos_;
      std::string word(text_.substr(start, pos_ - start));
      bool pname = word.find(':') != std::string::npos;
      return {pname ? TokKind::PName : TokKind::Word, word, start};
    }
    ++pos_;
    return {TokKind::Punct, std::string(1, c), start};
  }

  Token literal(std::size_t start) {
    ++pos_;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\') ++pos_;
      ++pos_;
    }
    if (pos_ >= text_.size()) throw SyntaxError(start, "closing '\"'");
    ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '@') {
      ++pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '-'))
        ++pos_;
    } else if (text_.substr(pos_, 2) == "^^") {
      pos_ += 2;
      if (pos_ < text_.size() && text_[pos_] == '<') {
        auto end = text_.find('>', pos_);
        if (end == std::string_view::npos) throw SyntaxError(pos_, "'>' closing datatype");
        pos_ = end + 1;
      } else {
        while (pos_ < text_.size() && (pn_char(text_[pos_]) || text_[pos_] == ':')) ++pos_;
        while (text_[pos_ - 1] == '.') --pos_;
      }
    }
    return {TokKind::Literal, std::string(text_.substr(start, pos_ - start)), start};
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

inline constexpr std::array<std::string_view, 20> kUnsupported = {
    "FILTER", "OPTIONAL", "UNION", "MINUS",    "BIND",   "VALUES",   "GRAPH",
    "SERVICE", "GROUP",   "ORDER", "LIMIT",    "OFFSET", "HAVING",   "DISTINCT",
    "REDUCED", "ASK",     "CONSTRUCT", "DESCRIBE", "FROM NAMED", "NAMED"};

inline bool is_unsupported(const std::string& upper_word) {
  return std::find(kUnsupported.begin(), kUnsupported.end(), upper_word) !=
         kUnsupported.end();
}

class QueryParser {
 public:
  explicit QueryParser(std::string_view text) : tokens_(Lexer(text).run()) {}

  QuerySpec parse() {
    QuerySpec q;
    while (is_word("PREFIX")) {
      ++i_;
      const Token& name = expect(TokKind::PName, "prefix name");
      if (name.text.back() != ':') throw SyntaxError(name.pos, "prefix name ending in ':'");
      const Token& iri = expect(TokKind::Iri, "IRI after PREFIX name");
      q.prefixes[name.text.substr(0, name.text.size() - 1)] = iri.text;
    }
    if (peek().kind == TokKind::Word && is_unsupported(upper(peek().text)))
      throw UnsupportedConstruct(upper(peek().text));
    if (!is_word("SELECT")) throw SyntaxError(peek().pos, "SELECT");
    ++i_;
    if (peek().kind == TokKind::Word && is_unsupported(upper(peek().text)))
      throw UnsupportedConstruct(upper(peek().text));
    if (peek().kind == TokKind::Star) throw UnsupportedConstruct("SELECT *");
    std::vector<std::pair<std::string, std::size_t>> selected;
    while (peek().kind == TokKind::Var) {
      selected.emplace_back(peek().text, peek().pos);
      ++i_;
    }
    if (selected.empty()) throw SyntaxError(peek().pos, "at least one select variable");
    if (is_word("FROM")) {
      ++i_;
      if (is_word("NAMED")) throw UnsupportedConstruct("FROM NAMED");
      auto k = peek().kind;
      if (k != TokKind::Iri && k != TokKind::PName && k != TokKind::Word)
        throw SyntaxError(peek().pos, "dataset IRI after FROM");
      ++i_;
    }
    if (!is_word("WHERE")) throw SyntaxError(peek().pos, "WHERE");
    ++i_;
    expect(TokKind::LBrace, "'{'");
    for (;;) {
      const Token& t = peek();
      if (t.kind == TokKind::RBrace) {
        ++i_;
        break;
      }
      if (t.kind == TokKind::Word && is_unsupported(upper(t.text)))
        throw UnsupportedConstruct(upper(t.text));
      if (t.kind == TokKind::LBrace) throw UnsupportedConstruct("nested group");
      if (t.kind == TokKind::End) throw SyntaxError(t.pos, "'}'");
      TriplePattern pat;
      pat.subject = read_term(q, /*predicate=*/false);
      pat.predicate = read_term(q, /*predicate=*/true);
      pat.object = read_term(q, /*predicate=*/false);
      if (auto s = as_term(pat.subject); s && s->is_literal())
        throw SyntaxError(t.pos, "subject that is not a literal");
      q.patterns.push_back(std::move(pat));
      const Token& sep = peek();
      if (sep.kind == TokKind::Dot) {
        ++i_;
      } else if (sep.kind == TokKind::Punct && (sep.text == ";" || sep.text == ",")) {
        throw UnsupportedConstruct(sep.text);
      } else if (sep.kind == TokKind::Word && is_unsupported(upper(sep.text))) {
        throw UnsupportedConstruct(upper(sep.text));
      } else if (sep.kind != TokKind::RBrace) {
        throw SyntaxError(sep.pos, "'.' after triple pattern");
      }
    }
    if (q.patterns.empty()) throw SyntaxError(peek().pos, "at least one triple pattern");
    if (peek().kind == TokKind::Word && is_unsupported(upper(peek().text)))
      throw UnsupportedConstruct(upper(peek().text));
    if (peek().kind != TokKind::End) throw SyntaxError(peek().pos, "end of query");

    std::set<std::string> used;
    for (const auto& p : q.patterns)
      for (const PatternTerm* pt : {&p.subject, &p.predicate, &p.object})
        if (auto v = as_variable(*pt)) used.insert(v->name);
    for (auto& [name, pos] : selected) {
      if (!used.contains(name))
        throw SyntaxError(pos, "select variable ?" + name + " to occur in WHERE");
      q.select_vars.push_back(name);
    }
    return q;
  }

 private:
  const Token& peek() const { return tokens_[i_]; }

  bool is_word(std::string_view kw) const {
    return peek().kind == TokKind::Word && upper(peek().text) == kw;
  }

  const Token& expect(TokKind kind, const std::string& what) {
    if (peek().kind != kind) throw SyntaxError(peek().pos, what);
    return tokens_[i_++];
  }

  std::string expand(const QuerySpec& q, const Token& t) const {
    auto colon = t.text.find(':');
    std::string prefix = t.text.substr(0, colon);
    auto it = q.prefixes.find(prefix);
    if (it == q.prefixes.end()) throw UnknownPrefix(prefix);
    std::string iri = it->second + t.text.substr(colon + 1);
    if (!is_valid_iri(iri)) throw SyntaxError(t.pos, "valid IRI");
    return iri;
  }

  PatternTerm read_term(const QuerySpec& q, bool predicate) {
    const Token& t = peek();
    switch (t.kind) {
      case TokKind::Var:
        ++i_;
        return Variable{t.text};
      case TokKind::Iri:
        ++i_;
        if (!is_valid_iri(t.text)) throw SyntaxError(t.pos, "valid IRI");
        return Term::iri(t.text);
      case TokKind::PName:
        ++i_;
        return Term::iri(expand(q, t));
      case TokKind::Word:
        if (predicate && t.text == "a") {
          ++i_;
          return Term::iri(std::string(vocab::kRdfType));
        }
        if (is_unsupported(upper(t.text))) throw UnsupportedConstruct(upper(t.text));
        throw SyntaxError(t.pos, "variable, IRI, prefixed name or literal");
      case TokKind::Literal: {
        if (predicate) throw SyntaxError(t.pos, "predicate IRI or variable");
        ++i_;
        return read_literal(q, t);
      }
      default:
        throw SyntaxError(t.pos, "variable, IRI, prefixed name or literal");
    }
  }

  Term read_literal(const QuerySpec& q, const Token& t) const {
    // Reuse the N-Triples literal reader after resolving a prefixed datatype.
    std::string src = t.text;
    auto caret = src.rfind("^^");
    auto close = src.rfind('"');
    if (caret != std::string::npos && caret > close && src[caret + 2] != '<') {
      Token dt{TokKind::PName, src.substr(caret + 2), t.pos};
      src = src.substr(0, caret) + "^^<" + expand(q, dt) + ">";
    }
    try {
      TermReader reader(src);
      return reader.read_term();
    } catch (const TermSyntax& e) {
      throw SyntaxError(t.pos, "well-formed literal (" + e.reason + ")");
    }
  }

  std::vector<Token> tokens_;
  std::size_t i_ = 0;
};

}  // namespace detail

/// Parses the supported SELECT/WHERE basic-graph-pattern subset.
inline QuerySpec parse_query(std::string_view text, std::string id = {}) {
  QuerySpec q = detail::QueryParser(text).parse();
  q.id = std::move(id);
  return q;
}

namespace detail {

inline std::string render_term(const PatternTerm& pt,
                               const std::map<std::string, std::string>& prefixes) {
  if (auto v = as_variable(pt)) return "?" + v->name;
  const Term& t = *as_term(pt);
  if (t.is_iri()) {
    const std::string* best_name = nullptr;
    std::size_t best_len = 0;
    for (const auto& [name, base] : prefixes) {
      if (base.size() <= best_len || t.lexical.compare(0, base.size(), base) != 0)
        continue;
      std::string_view local = std::string_view(t.lexical).substr(base.size());
      bool ok = !local.empty() && local.back() != '.' && local.front() != '.' &&
                local.front() != '-' &&
                std::all_of(local.begin(), local.end(), pn_char);
      if (ok) {
        best_name = &name;
        best_len = base.size();
      }
    }
    if (best_name) return *best_name + ":" + t.lexical.substr(best_len);
  }
  return to_ntriples(t);
}

}  // namespace detail

inline std::string render_pattern(const TriplePattern& p,
                                  const std::map<std::string, std::string>& prefixes) {
  return detail::render_term(p.subject, prefixes) + " " +
         detail::render_term(p.predicate, prefixes) + " " +
         detail::render_term(p.object, prefixes) + " .";
}

inline std::string render_prologue(const QuerySpec& q) {
  std::string out;
  for (const auto& [name, base] : q.prefixes)
    out += "PREFIX " + name + ": <" + base + ">\n";
  out += "SELECT";
  for (const auto& v : q.select_vars) out += " ?" + v;
  out += " WHERE {\n";
  return out;
}

/// Canonical text form of a query; parse_query(to_sparql(q)) == q.
inline std::string to_sparql(const QuerySpec& q) {
  std::string out = render_prologue(q);
  for (const auto& p : q.patterns) out += "  " + render_pattern(p, q.prefixes) + "\n";
  out += "}\n";
  return out;
}

/// Which bound objects turn a pattern into a PO feature. The class-objects
/// mode emits PO only for rdf:type patterns, and P for every other predicate
/// regardless of its object, which is how LUBM Q8's
/// `?Y ub:subOrganizationOf <http://www.University0.edu>` counts as
/// P(subOrganizationOf).
enum class ObjectFeatureMode : std::uint8_t { ClassObjectsOnly, AllBoundObjects };

struct FeatureOptions {
  ObjectFeatureMode object_mode = ObjectFeatureMode::ClassObjectsOnly;
  bool operator==(const FeatureOptions&) const = default;
};

/// The feature a single pattern contributes, if any.
inline std::optional<Feature> feature_of(const TriplePattern& p,
                                         const FeatureOptions& opts = {}) {
  const Term* pred = as_term(p.predicate);
  if (!pred) return std::nullopt;
  const Term* obj = as_term(p.object);
  bool po = obj && (opts.object_mode == ObjectFeatureMode::AllBoundObjects ||
                    pred->lexical == vocab::kRdfType);
  if (po) return Feature::po(*pred, *obj);
  return Feature::p(*pred);
}

/// A join between two pattern positions of one query, before collapsing to
/// features. `left == right` only for a pattern whose subject and object are
/// the same variable.
struct PatternJoin {
  std::size_t left;
  std::size_t right;
  JoinKind kind;
  std::string via;
};

inline std::vector<PatternJoin> pattern_joins(const QuerySpec& q) {
  std::vector<PatternJoin> out;
  auto var_name = [](const PatternTerm& t) -> const std::string* {
    auto v = as_variable(t);
    return v ? &v->name : nullptr;
  };
  const auto& ps = q.patterns;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const std::string* si = var_name(ps[i].subject);
    const std::string* oi = var_name(ps[i].object);
    if (si && oi && *si == *oi) out.push_back({i, i, JoinKind::OSJ, *si});
    for (std::size_t j = i + 1; j < ps.size(); ++j) {
      const std::string* sj = var_name(ps[j].subject);
      const std::string* oj = var_name(ps[j].object);
      if (si && sj && *si == *sj) out.push_back({i, j, JoinKind::SSJ, *si});
      if (oi && oj && *oi == *oj) out.push_back({i, j, JoinKind::OOJ, *oi});
      if (oi && sj && *oi == *sj) out.push_back({i, j, JoinKind::OSJ, *oi});
      if (oj && si && *oj == *si) out.push_back({j, i, JoinKind::OSJ, *oj});
    }
  }
  return out;
}

struct QueryFeatures {
  std::string query_id;
  std::set<Feature> features;
  std::set<JoinFeature> joins;
  bool operator==(const QueryFeatures&) const = default;
};

inline QueryFeatures extract_features(const QuerySpec& q,
                                      const FeatureOptions& opts = {}) {
  QueryFeatures out;
  out.query_id = q.id;
  std::vector<std::optional<Feature>> per_pattern;
  per_pattern.reserve(q.patterns.size());
  for (const auto& p : q.patterns) {
    per_pattern.push_back(feature_of(p, opts));
    if (per_pattern.back()) out.features.insert(*per_pattern.back());
  }
  for (const auto& j : pattern_joins(q))
    out.joins.insert(JoinFeature::make(j.kind, per_pattern[j.left],
                                       per_pattern[j.right], j.via));
  return out;
}

}  // namespace kgshard
