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
#include <map>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgshard/errors.hpp"
#include "kgshard/feature.hpp"
#include "kgshard/workload.hpp"

namespace kgshard {

/// 1 - |a ∩ b| / |a ∪ b|; two empty sets are at distance 0.
inline double jaccard_distance(const std::set<Feature>& a, const std::set<Feature>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t common = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  std::size_t uni = a.size() + b.size() - common;
  return 1.0 - static_cast<double>(common) / static_cast<double>(uni);
}

/// Symmetric distance matrix over labelled items, stored row-major.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::vector<std::string> labels)
      : labels_(std::move(labels)), d_(labels_.size() * labels_.size(), 0.0) {}

  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  double at(std::size_t i, std::size_t j) const { return d_[i * size() + j]; }
  void set(std::size_t i, std::size_t j, double v) {
    d_[i * size() + j] = v;
    d_[j * size() + i] = v;
  }

 private:
  std::vector<std::string> labels_;
  std::vector<double> d_;
};

/// Jaccard distances between the P/PO feature sets of all workload queries,
/// labelled by query id in id order.
inline DistanceMatrix build_distance_matrix(const Workload& w) {
  std::vector<std::string> labels;
  std::vector<const std::set<Feature>*> sets;
  for (const auto& [id, e] : w.entries()) {
    labels.push_back(id);
    sets.push_back(&e.features.features);
  }
  DistanceMatrix dm(std::move(labels));
  for (std::size_t i = 0; i < dm.size(); ++i)
    for (std::size_t j = i + 1; j < dm.size(); ++j)
      dm.set(i, j, jaccard_distance(*sets[i], *sets[j]));
  return dm;
}

enum class Linkage { Single, Complete, Average };

inline std::string_view to_string(Linkage l) {
  switch (l) {
    case Linkage::Single: return "single";
    case Linkage::Complete: return "complete";
    case Linkage::Average: return "average";
  }
  return "?";
}

inline Linkage parse_linkage(std::string_view s) {
  if (s == "single") return Linkage::Single;
  if (s == "complete") return Linkage::Complete;
  if (s == "average") return Linkage::Average;
  throw InputError("unknown linkage '" + std::string(s) + "'");
}

/// Leaves are clusters 0..n-1; the i-th merge creates cluster n+i.
struct Merge {
  std::size_t a;
  std::size_t b;
  double height;
  bool operator==(const Merge&) const = default;
};

struct Dendrogram {
  std::vector<std::string> leaves;
  std::vector<Merge> merges;

  /// Leaf indices under a cluster id, ascending.
  std::vector<std::size_t> members(std::size_t cluster) const {
    std::vector<std::size_t> out;
    std::vector<std::size_t> stack{cluster};
    while (!stack.empty()) {
      std::size_t c = stack.back();
      stack.pop_back();
      if (c < leaves.size()) {
        out.push_back(c);
      } else {
        const Merge& m = merges.at(c - leaves.size());
        stack.push_back(m.a);
        stack.push_back(m.b);
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }
};

/// Heights closer than this are ties.
inline constexpr double kTieEpsilon = 1e-12;

/// Agglomerative clustering: repeatedly merge the closest pair of clusters.
/// Inter-cluster distances are updated with the Lance-Williams rule of the
/// linkage. Ties go to the pair with the smallest (min leaf, max leaf) key,
/// where each cluster is keyed by its smallest leaf index.

inline Dendrogram hac(const DistanceMatrix& dm, Linkage linkage = Linkage::Single) {
  const std::size_t n = dm.size();
  if (n == 0) throw EmptyMatrix();
  Dendrogram dg;
  dg.leaves = dm.labels();

  struct Slot {
    std::size_t id;
    std::size_t min_leaf;
    std::size_t count;
  };
  std::vector<Slot> slots(n);
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    slots[i] = {i, i, 1};
    for (std::size_t j = 0; j < n; ++j) d[i][j] = dm.at(i, j);
  }
  std::vector<bool> alive(n, true);

  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t best_i = 0, best_j = 0;
    bool found = false;
    double best = 0;
    std::pair<std::size_t, std::size_t> best_key;
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!alive[j]) continue;
        double v = d[i][j];
        std::pair<std::size_t, std::size_t> key =
            std::minmax(slots[i].min_leaf, slots[j].min_leaf);
        if (!found || v < best - kTieEpsilon ||
            (std::abs(v - best) <= kTieEpsilon && key < best_key)) {
          found = true;
          best = v;
          best_key = key;
          best_i = i;
          best_j = j;
        }
      }
    }
    if (slots[best_j].min_leaf < slots[best_i].min_leaf) std::swap(best_i, best_j);
    Slot& lo = slots[best_i];
    Slot& hi = slots[best_j];
    dg.merges.push_back({std::min(lo.id, hi.id), std::max(lo.id, hi.id), best});

    // The merged cluster takes the slot of the one with the smaller min leaf.
    for (std::size_t x = 0; x < n; ++x) {
      if (!alive[x] || x == best_i || x == best_j) continue;
      double da = d[best_i][x];
      double db = d[best_j][x];
      double merged = 0;
      switch (linkage) {
        case Linkage::Single: merged = std::min(da, db); break;
        case Linkage::Complete: merged = std::max(da, db); break;
        case Linkage::Average:
          merged = (static_cast<double>(lo.count) * da + static_cast<double>(hi.count) * db) /
                   static_cast<double>(lo.count + hi.count);
          break;
      }
      d[best_i][x] = d[x][best_i] = merged;
    }
    lo = {n + step, lo.min_leaf, lo.count + hi.count};
    alive[best_j] = false;
  }
  return dg;
}

struct FeatureGroup {
  std::size_t group_id = 0;
  std::set<std::string> member_queries;
  std::set<Feature> features;
  bool operator==(const FeatureGroup&) const = default;
};

/// Flat clusters from the merges at height <= d. Groups are ordered by their
/// smallest leaf index; each carries the union of its queries' features.
inline std::vector<FeatureGroup> cut(const Dendrogram& dg, double d, const Workload& w) {
  const std::size_t n = dg.leaves.size();
  std::vector<std::size_t> parent(n + dg.merges.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite = [&](std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };
  for (std::size_t i = 0; i < dg.merges.size(); ++i) {
    const Merge& m = dg.merges[i];
    if (m.height > d) continue;
    unite(m.a, n + i);
    unite(m.b, n + i);
  }
  std::map<std::size_t, std::size_t> root_to_group;
  std::vector<FeatureGroup> groups;
  for (std::size_t leaf = 0; leaf < n; ++leaf) {
    std::size_t r = find(leaf);
    auto [it, inserted] = root_to_group.try_emplace(r, groups.size());
    if (inserted) groups.push_back(FeatureGroup{groups.size(), {}, {}});
    FeatureGroup& g = groups[it->second];
    g.member_queries.insert(dg.leaves[leaf]);
    if (w.contains(dg.leaves[leaf])) {
      const auto& fs = w.at(dg.leaves[leaf]).features.features;
      g.features.insert(fs.begin(), fs.end());
    }
  }
  return groups;
}

// -- exports ------------------------------------------------------------------

inline nlohmann::ordered_json to_json(const Dendrogram& dg) {
  nlohmann::ordered_json j;
  j["leaves"] = dg.leaves;
  j["merges"] = nlohmann::ordered_json::array();
  for (const auto& m : dg.merges)
    j["merges"].push_back({{"a", m.a}, {"b", m.b}, {"height", m.height}});
  return j;
}

inline void write_distance_csv(std::ostream& out, const DistanceMatrix& dm) {
  out << "query_id";
  for (const auto& l : dm.labels()) out << ',' << l;
  out << '\n';
  char buf[32];
  for (std::size_t i = 0; i < dm.size(); ++i) {
    out << dm.labels()[i];
    for (std::size_t j = 0; j < dm.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.6f", dm.at(i, j));
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace kgshard
