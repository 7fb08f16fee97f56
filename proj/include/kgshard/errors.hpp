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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kgshard {

/// Base of every error the engine raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Errors caused by user-supplied input (data files, queries, workload and
/// config files). The CLI maps these to exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

class MalformedLine : public InputError {
 public:
  MalformedLine(std::size_t line, std::string reason)
      : InputError("line " + std::to_string(line) + ": " + reason),
        line_(line),
        reason_(std::move(reason)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

class SyntaxError : public InputError {
 public:
  SyntaxError(std::size_t position, std::string expected)
      : InputError("syntax error at offset " + std::to_string(position) +
                   ": expected " + expected),
        position_(position),
        expected_(std::move(expected)) {}

  std::size_t position() const noexcept { return position_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t position_;
  std::string expected_;
};

class UnknownPrefix : public InputError {
 public:
  explicit UnknownPrefix(std::string name)
      : InputError("unknown prefix '" + name + ":'"), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class UnsupportedConstruct : public InputError {
 public:
  explicit UnsupportedConstruct(std::string keyword)
      : InputError("unsupported construct: " + keyword),
        keyword_(std::move(keyword)) {}
  const std::string& keyword() const noexcept { return keyword_; }

 private:
  std::string keyword_;
};

class DuplicateIdWithDifferentText : public InputError {
 public:
  explicit DuplicateIdWithDifferentText(const std::string& id)
      : InputError("query id '" + id + "' re-registered with a different body") {}
};

class AllVariables : public Error {
 public:
  AllVariables() : Error("triple pattern has no bound position") {}
};

class UnknownQuery : public Error {
 public:
  explicit UnknownQuery(const std::string& id)
      : Error("unknown query '" + id + "'") {}
};

class MissingSamples : public Error {
 public:
  explicit MissingSamples(std::string id)
      : Error("query '" + id + "' has no runtime samples"), id_(std::move(id)) {}
  const std::string& query_id() const noexcept { return id_; }

 private:
  std::string id_;
};

class EmptyMatrix : public Error {
 public:
  EmptyMatrix() : Error("distance matrix is empty") {}
};

class TooFewFeatures : public Error {
 public:
  TooFewFeatures(std::size_t predicates, std::size_t k)
      : Error("dataset has " + std::to_string(predicates) +
              " distinct predicates, fewer than k = " + std::to_string(k)) {}
};

class InfeasibleBalance : public Error {
 public:
  using Error::Error;
};

class FeatureNotResident : public Error {
 public:
  using Error::Error;
};

class UnownedPattern : public Error {
 public:
  using Error::Error;
};

class StaleMigration : public Error {
 public:
  using Error::Error;
};

class InvalidPartition : public Error {
 public:
  using Error::Error;
};

}  // namespace kgshard
