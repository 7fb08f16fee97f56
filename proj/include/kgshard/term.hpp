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

#include <cctype>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include "kgshard/errors.hpp"

namespace kgshard {

enum class TermKind : std::uint8_t { Iri, Literal, BlankNode };

/// An RDF term. IRIs are stored without angle brackets, blank nodes by label
/// (without the `_:`), literals by lexical form plus an optional datatype IRI
/// or language tag.
struct Term {
  TermKind kind = TermKind::Iri;
  std::string lexical;
  std::string datatype;
  std::string language;

  static Term iri(std::string value) {
    return Term{TermKind::Iri, std::move(value), {}, {}};
  }
  static Term literal(std::string value, std::string datatype = {},
                      std::string language = {}) {
    return Term{TermKind::Literal, std::move(value), std::move(datatype),
                std::move(language)};
  }
  static Term blank(std::string label) {
    return Term{TermKind::BlankNode, std::move(label), {}, {}};
  }

  bool is_iri() const noexcept { return kind == TermKind::Iri; }
  bool is_literal() const noexcept { return kind == TermKind::Literal; }
  bool is_blank() const noexcept { return kind == TermKind::BlankNode; }

  auto operator<=>(const Term&) const = default;
};

struct TermHash {
  std::size_t operator()(const Term& t) const noexcept {
    std::size_t h = std::hash<std::string>{}(t.lexical);
    h ^= std::hash<std::string>{}(t.datatype) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= std::hash<std::string>{}(t.language) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h ^ static_cast<std::size_t>(t.kind);
  }
};

namespace vocab {
inline constexpr std::string_view kRdfType =
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
}

inline bool is_valid_iri(std::string_view iri) {
  if (iri.empty()) return false;
  for (char c : iri) {
    auto u = static_cast<unsigned char>(c);
    if (u <= 0x20 || c == '<' || c == '>' || c == '"' || c == '{' ||
        c == '}' || c == '|' || c == '^' || c == '`' || c == '\\')
      return false;
  }
  return true;
}

inline std::string escape_literal(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

/// Canonical N-Triples rendering of a term.
inline std::string to_ntriples(const Term& t) {
  switch (t.kind) {
    case TermKind::Iri:
      return "<" + t.lexical + ">";
    case TermKind::BlankNode:
      return "_:" + t.lexical;
    case TermKind::Literal: {
      std::string out = "\"" + escape_literal(t.lexical) + "\"";
      if (!t.language.empty())
        out += "@" + t.language;
      else if (!t.datatype.empty())
        out += "^^<" + t.datatype + ">";
      return out;
    }
  }
  return {};
}

/// Raised by TermReader; callers translate it into their own error type.
struct TermSyntax {
  std::string reason;
};

/// Cursor over one line of N-Triples-style text.
class TermReader {
 public:
  explicit TermReader(std::string_view text) : text_(text) {}

  std::size_t position() const noexcept { return pos_; }
  bool at_end() const noexcept { return pos_ >= text_.size(); }
  char peek() const noexcept { return at_end() ? '\0' : text_[pos_]; }
  void advance() { ++pos_; }

  void skip_ws() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r'))
      ++pos_;
  }

  bool at_term_start() const {
    char c = peek();
    return c == '<' || c == '"' ||
           (c == '_' && pos_ + 1 < text_.size() && text_[pos_ + 1] == ':');
  }

  Term read_term() {
    char c = peek();
    if (c == '<') return Term::iri(read_iri());
    if (c == '_') return read_blank();
    if (c == '"') return read_literal();
    throw TermSyntax{"expected term"};
  }

  std::string read_iri() {
    if (peek() != '<') throw TermSyntax{"expected '<'"};
    ++pos_;
    auto end = text_.find('>', pos_);
    if (end == std::string_view::npos) throw TermSyntax{"unterminated IRI"};
    std::string iri = unescape_iri(text_.substr(pos_, end - pos_));
    pos_ = end + 1;
    if (!is_valid_iri(iri)) throw TermSyntax{"invalid IRI <" + iri + ">"};
    return iri;
  }

 private:
  Term read_blank() {
    pos_ += 2;
    std::size_t start = pos_;
    while (!at_end()) {
      char c = peek();
      bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
                c == '-' || c == '.' || static_cast<unsigned char>(c) >= 0x80;
      if (!ok) break;
      ++pos_;
    }
    // A label may not end with '.', which belongs to the statement.
    while (pos_ > start && text_[pos_ - 1] == '.') --pos_;
    if (pos_ == start) throw TermSyntax{"empty blank node label"};
    return Term::blank(std::string(text_.substr(start, pos_ - start)));
  }

  Term read_literal() {
    ++pos_;
    std::string value;
    for (;;) {
      if (at_end()) throw TermSyntax{"unterminated literal"};
      char c = text_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        value += c;
        continue;
      }
      if (at_end()) throw TermSyntax{"dangling escape"};
      char e = text_[pos_++];
      switch (e) {
        case 't': value += '\t'; break;
        case 'b': value += '\b'; break;
        case 'n': value += '\n'; break;
        case 'r': value += '\r'; break;
        case 'f': value += '\f'; break;
        case '"': value += '"'; break;
        case '\'': value += '\''; break;
        case '\\': value += '\\'; break;
        case 'u': append_utf8(value, read_hex(4)); break;
        case 'U': append_utf8(value, read_hex(8)); break;
        default: throw TermSyntax{std::string("unknown escape \\") + e};
      }
    }
    if (peek() == '@') {
      ++pos_;
      std::size_t start = pos_;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) ||
                           peek() == '-'))
        ++pos_;
      if (pos_ == start) throw TermSyntax{"empty language tag"};
      return Term::literal(std::move(value), {},
                           std::string(text_.substr(start, pos_ - start)));
    }
    if (peek() == '^') {
      if (pos_ + 1 >= text_.size() || text_[pos_ + 1] != '^')
        throw TermSyntax{"expected '^^'"};
      pos_ += 2;
      return Term::literal(std::move(value), read_iri());
    }
    return Term::literal(std::move(value));
  }

  std::uint32_t read_hex(std::size_t digits) {
    if (pos_ + digits > text_.size()) throw TermSyntax{"short unicode escape"};
    std::uint32_t cp = 0;
    for (std::size_t i = 0; i < digits; ++i) {
      char c = text_[pos_++];
      cp <<= 4;
      if (c >= '0' && c <= '9') cp |= static_cast<std::uint32_t>(c - '0');
      else if (c >= 'a' && c <= 'f') cp |= static_cast<std::uint32_t>(c - 'a' + 10);
      else if (c >= 'A' && c <= 'F') cp |= static_cast<std::uint32_t>(c - 'A' + 10);
      else throw TermSyntax{"bad hex digit in unicode escape"};
    }
    return cp;
  }

  std::string unescape_iri(std::string_view raw) {
    if (raw.find('\\') == std::string_view::npos) return std::string(raw);
    TermReader inner(raw);
    std::string out;
    while (!inner.at_end()) {
      char c = inner.text_[inner.pos_++];
      if (c != '\\') {
        out += c;
        continue;
      }
      char e = inner.at_end() ? '\0' : inner.text_[inner.pos_++];
      if (e == 'u') append_utf8(out, inner.read_hex(4));
      else if (e == 'U') append_utf8(out, inner.read_hex(8));
      else throw TermSyntax{"bad escape in IRI"};
    }
    return out;
  }

  static void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
      out += static_cast<char>(cp);
    } else if (cp < 0x800) {
      out += static_cast<char>(0xC0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
      out += static_cast<char>(0xE0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp <= 0x10FFFF) {
      out += static_cast<char>(0xF0 | (cp >> 18));
      out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
      throw TermSyntax{"code point out of range"};
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

/// Parses exactly one term in N-Triples syntax.
inline Term parse_term(std::string_view text) {
  TermReader reader(text);
  reader.skip_ws();
  Term t;
  try {
    t = reader.read_term();
  } catch (const TermSyntax& e) {
    throw InputError("bad term '" + std::string(text) + "': " + e.reason);
  }
  reader.skip_ws();
  if (!reader.at_end())
    throw InputError("trailing characters after term '" + std::string(text) + "'");
  return t;
}

}  // namespace kgshard
