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

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "kgshard/term.hpp"

namespace kgshard {

enum class FeatureKind : std::uint8_t { P, PO };

/// A workload descriptor over triples: every triple with a given predicate
/// (P), or every triple with a given predicate and object (PO).
struct Feature {
  FeatureKind kind = FeatureKind::P;
  Term predicate;
  std::optional<Term> object;

  static Feature p(Term predicate) {
    return Feature{FeatureKind::P, std::move(predicate), std::nullopt};
  }
  static Feature po(Term predicate, Term object) {
    return Feature{FeatureKind::PO, std::move(predicate), std::move(object)};
  }

  auto operator<=>(const Feature&) const = default;
};

/// Text encoding used in exports, e.g. `P <http://p>` or
/// `PO <http://p> <http://o>`.
inline std::string to_string(const Feature& f) {
  if (f.kind == FeatureKind::P) return "P " + to_ntriples(f.predicate);
  return "PO " + to_ntriples(f.predicate) + " " + to_ntriples(*f.object);
}

inline Feature parse_feature(std::string_view text) {
  auto fail = [&](const std::string& why) -> InputError {
    return InputError("bad feature '" + std::string(text) + "': " + why);
  };
  std::size_t sp = text.find(' ');
  if (sp == std::string_view::npos) throw fail("missing kind");
  std::string_view kind = text.substr(0, sp);
  TermReader reader(text.substr(sp + 1));
  try {
    reader.skip_ws();
    Term predicate = reader.read_term();
    if (!predicate.is_iri()) throw fail("predicate must be an IRI");
    reader.skip_ws();
    if (kind == "P") {
      if (!reader.at_end()) throw fail("trailing text");
      return Feature::p(std::move(predicate));
    }
    if (kind != "PO") throw fail("unknown kind");
    Term object = reader.read_term();
    reader.skip_ws();
    if (!reader.at_end()) throw fail("trailing text");
    return Feature::po(std::move(predicate), std::move(object));
  } catch (const TermSyntax& e) {
    throw fail(e.reason);
  }
}

enum class JoinKind : std::uint8_t { SSJ, OOJ, OSJ };

inline std::string_view to_string(JoinKind k) {
  switch (k) {
    case JoinKind::SSJ: return "SSJ";
    case JoinKind::OOJ: return "OOJ";
    case JoinKind::OSJ: return "OSJ";
  }
  return "?";
}

/// A variable-mediated join between two patterns of one query. A side is
/// empty when its pattern has a variable predicate and so carries no feature.
/// SSJ and OOJ are stored with left <= right; OSJ runs from the pattern whose
/// object is `via` to the pattern whose subject is `via`.
struct JoinFeature {
  JoinKind kind = JoinKind::SSJ;
  std::optional<Feature> left;
  std::optional<Feature> right;
  std::string via;

  static JoinFeature make(JoinKind kind, std::optional<Feature> left,
                          std::optional<Feature> right, std::string via) {
    if (kind != JoinKind::OSJ && right < left) std::swap(left, right);
    return JoinFeature{kind, std::move(left), std::move(right), std::move(via)};
  }

  auto operator<=>(const JoinFeature&) const = default;
};

}  // namespace kgshard
