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
#include <optional>
#include <string>
#include <variant>

#include "kgshard/term.hpp"

namespace kgshard {

/// A query variable, named without the leading `?`.
struct Variable {
  std::string name;
  auto operator<=>(const Variable&) const = default;
};

/// One position of a triple pattern: a variable or a bound term.
using PatternTerm = std::variant<Variable, Term>;

inline bool is_variable(const PatternTerm& t) {
  return std::holds_alternative<Variable>(t);
}
inline const Variable* as_variable(const PatternTerm& t) {
  return std::get_if<Variable>(&t);
}
inline const Term* as_term(const PatternTerm& t) {
  return std::get_if<Term>(&t);
}

struct TriplePattern {
  PatternTerm subject;
  PatternTerm predicate;
  PatternTerm object;

  auto operator<=>(const TriplePattern&) const = default;
};

inline PatternTerm var(std::string name) { return Variable{std::move(name)}; }
inline PatternTerm bound(Term t) { return PatternTerm(std::move(t)); }

inline std::string to_string(const PatternTerm& t) {
  if (auto v = as_variable(t)) return "?" + v->name;
  return to_ntriples(*as_term(t));
}

inline std::string to_string(const TriplePattern& p) {
  return to_string(p.subject) + " " + to_string(p.predicate) + " " +
         to_string(p.object) + " .";
}

}  // namespace kgshard
