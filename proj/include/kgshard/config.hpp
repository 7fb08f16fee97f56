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

#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>

#include <json.hpp>

#include "kgshard/clustering.hpp"
#include "kgshard/errors.hpp"
#include "kgshard/partitioner.hpp"
#include "kgshard/query_analyzer.hpp"

namespace kgshard {

/// Every tunable of a run, loadable from one JSON document.
struct EngineConfig {
  std::uint32_t k = 3;
  PartitionerConfig partitioner;
  /// Relative cost degradation that forces adaptation of an unchanged workload.
  double threshold = 0.2;
  std::uint64_t seed = 42;
  std::uint32_t universities = 1;
  FeatureOptions features;

  void validate() const {
    if (k < 1) throw InputError("k must be >= 1");
    if (!(threshold >= 0) || std::isinf(threshold)) throw InputError("threshold must be >= 0");
    if (universities < 1) throw InputError("universities must be >= 1");
    partitioner.validate();
  }
};

inline nlohmann::ordered_json to_json(const EngineConfig& c) {
  const auto& p = c.partitioner;
  nlohmann::ordered_json j;
  j["k"] = c.k;
  j["linkage"] = std::string(to_string(p.linkage));
  j["cut_d"] = p.cut_d;
  j["weights"] = {{"w1", p.weights.w1}, {"w2", p.weights.w2}, {"w3", p.weights.w3},
                  {"w4", p.weights.w4}, {"w5", p.weights.w5}, {"w6", p.weights.w6},
                  {"w_join", p.weights.w_join}};
  j["join_term"] = std::string(to_string(p.join_term));
  j["balance_tolerance"] = p.balance_tolerance;
  j["max_sweeps"] = p.max_sweeps;
  j["threshold"] = c.threshold;
  j["cost"] = {{"alpha", p.cost.alpha}, {"beta", p.cost.beta}, {"gamma", p.cost.gamma}};
  j["seed"] = c.seed;
  j["universities"] = c.universities;
  j["object_features"] =
      c.features.object_mode == ObjectFeatureMode::ClassObjectsOnly ? "class" : "all";
  return j;
}

/// Missing keys keep their defaults; unknown keys are rejected.
inline EngineConfig config_from_json(const nlohmann::json& j) {
  static const std::set<std::string> known = {
      "k",         "linkage", "cut_d", "weights",      "join_term",   "balance_tolerance",
      "max_sweeps", "threshold", "cost", "seed", "universities", "object_features"};
  EngineConfig c;
  if (!j.is_object()) throw InputError("config must be a JSON object");
  try {
    for (const auto& [key, _] : j.items())
      if (!known.contains(key)) throw InputError("unknown config key '" + key + "'");
    auto& p = c.partitioner;
    c.k = j.value("k", c.k);
    if (j.contains("linkage")) p.linkage = parse_linkage(j["linkage"].get<std::string>());
    p.cut_d = j.value("cut_d", p.cut_d);
    if (j.contains("weights")) {
      const auto& w = j["weights"];
      for (const auto& [key, _] : w.items())
        if (key != "w1" && key != "w2" && key != "w3" && key != "w4" && key != "w5" &&
            key != "w6" && key != "w_join")
          throw InputError("unknown weight '" + key + "'");
      p.weights.w1 = w.value("w1", p.weights.w1);
      p.weights.w2 = w.value("w2", p.weights.w2);
      p.weights.w3 = w.value("w3", p.weights.w3);
      p.weights.w4 = w.value("w4", p.weights.w4);
      p.weights.w5 = w.value("w5", p.weights.w5);
      p.weights.w6 = w.value("w6", p.weights.w6);
      p.weights.w_join = w.value("w_join", p.weights.w_join);
    }
    if (j.contains("join_term")) p.join_term = parse_join_term(j["join_term"].get<std::string>());
    p.balance_tolerance = j.value("balance_tolerance", p.balance_tolerance);
    p.max_sweeps = j.value("max_sweeps", p.max_sweeps);
    c.threshold = j.value("threshold", c.threshold);
    if (j.contains("cost")) {
      const auto& k = j["cost"];
      p.cost.alpha = k.value("alpha", p.cost.alpha);
      p.cost.beta = k.value("beta", p.cost.beta);
      p.cost.gamma = k.value("gamma", p.cost.gamma);
    }
    c.seed = j.value("seed", c.seed);
    c.universities = j.value("universities", c.universities);
    if (j.contains("object_features")) {
      auto m = j["object_features"].get<std::string>();
      if (m == "class") c.features.object_mode = ObjectFeatureMode::ClassObjectsOnly;
      else if (m == "all") c.features.object_mode = ObjectFeatureMode::AllBoundObjects;
      else throw InputError("object_features must be 'class' or 'all'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad config: ") + e.what());
  }
  c.validate();
  return c;
}

inline EngineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path);
  try {
    return config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("config " + path + ": " + e.what());
  }
}

}  // namespace kgshard
