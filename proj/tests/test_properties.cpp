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

#include <gtest/gtest.h>

#include "checks.hpp"

using namespace kgtest;

TEST(Properties, FederatedMatchesSingleStore) {
  std::mt19937_64 rng(1001);
  for (int i = 0; i < 150; ++i) {
    auto why = check_federated(rng);
    ASSERT_TRUE(why.empty()) << "case " << i << ": " << why;
  }
}

TEST(Properties, MigrationConservesTriples) {
  std::mt19937_64 rng(1002);
  for (int i = 0; i < 2; ++i) {
    auto why = check_conservation(rng, 15);
    ASSERT_TRUE(why.empty()) << why;
  }
}

TEST(Properties, AdaptationNeverWorse) {
  std::mt19937_64 rng(1003);
  for (int i = 0; i < 15; ++i) {
    auto r = check_never_worse(rng);
    ASSERT_TRUE(r.failure.empty()) << "case " << i << ": " << r.failure;
  }
}

TEST(Properties, ClusteringMatchesBruteForce) {
  std::mt19937_64 rng(1004);
  for (int i = 0; i < 40; ++i) {
    auto why = check_hac(rng);
    ASSERT_TRUE(why.empty()) << "case " << i << ": " << why;
  }
}

TEST(Properties, OwnershipMatchesLinearScan) {
  std::mt19937_64 rng(1005);
  for (int i = 0; i < 100; ++i) {
    auto g = random_graph(rng, {60, 12, 4, 3, 0.3});
    auto p = random_partition(rng, g, 3);
    Ownership own(g, p);
    auto want = owner_scan(g, p);
    for (TripleId id = 0; id < g.triple_count(); ++id)
      ASSERT_EQ(shard_of_triple(own, p, id), want[id]);
  }
}

TEST(Properties, CostGrowsWithDistributedJoins) {
  // Same query, same rows: the partition with more cross-shard joins never
  // costs less.
  std::mt19937_64 rng(1006);
  for (int i = 0; i < 100; ++i) {
    auto g = random_graph(rng, {80, 15, 4, 2, 0.2});
    auto q = random_query(rng, g, 4);
    Partition one;
    one.k = 2;
    for (const auto& f : build_inventory(g, extract_features(q).features)) one.assignment[f] = 0;
    auto split = random_partition(rng, g, 2);
    auto [r1, c1] = execute(rewrite_federated(q, one), deploy(g, one), g);
    auto [r2, c2] = execute(rewrite_federated(q, split), deploy(g, split), g);
    ASSERT_EQ(c1.rows, c2.rows);
    ASSERT_EQ(c1.dist_joins, 0u);
    if (c2.dist_joins > 0) EXPECT_GT(c2.cost_units, c1.cost_units);
    else EXPECT_DOUBLE_EQ(c2.cost_units, c1.cost_units);
  }
}

TEST(Properties, PartitionJsonRoundTrip) {
  std::mt19937_64 rng(1007);
  for (int i = 0; i < 50; ++i) {
    auto g = random_graph(rng, {60, 12, 4, 3, 0.3});
    auto p = random_partition(rng, g, 1 + static_cast<std::uint32_t>(below(rng, 4)));
    p.version = below(rng, 100);
    p.workload_fingerprint = rng();
    auto back = partition_from_json(nlohmann::json::parse(to_json(p).dump()));
    ASSERT_EQ(back, p);
  }
}

TEST(Properties, BoundedCounterAgreesWithOracle) {
  std::mt19937_64 rng(1008);
  for (int i = 0; i < 100; ++i) {
    auto g = random_graph(rng, {60, 12, 4, 3, 0.3});
    auto q = random_query(rng, g, 4);
    auto n = bounded_solutions(g, q, 1000000, 100000000);
    ASSERT_TRUE(n);
    ASSERT_EQ(*n, evaluate_bgp(g, q).size()) << to_sparql(q);
  }
}
