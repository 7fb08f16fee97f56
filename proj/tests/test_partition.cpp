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

#include "support.hpp"

using namespace kgtest;

namespace {

KnowledgeGraph small_graph() {
  KnowledgeGraph g;
  g.add(I("http://a"), I(kType), I("http://C"));
  g.add(I("http://b"), I(kType), I("http://C"));
  g.add(I("http://b"), I(kType), I("http://D"));
  g.add(I("http://a"), I("http://p"), I("http://b"));
  g.add(I("http://b"), I("http://p"), I("http://a"));
  g.add(I("http://a"), I("http://q"), Term::literal("x"));
  return g;
}

}  // namespace

TEST(Partition, OwnershipPrecedencePoThenPThenOrphan) {
  auto g = small_graph();
  Partition p;
  p.k = 3;
  p.assignment[Feature::po(I(kType), I("http://C"))] = 0;
  p.assignment[Feature::p(I(kType))] = 1;
  p.assignment[Feature::p(I("http://p"))] = 1;
  p.orphan_assignment[I("http://q")] = 2;
  Ownership own(g, p);
  std::vector<ShardId> got;
  for (TripleId id = 0; id < g.triple_count(); ++id) got.push_back(shard_of_triple(own, p, id));
  EXPECT_EQ(got, (std::vector<ShardId>{0, 0, 1, 1, 1, 2}));
  EXPECT_EQ(got, owner_scan(g, p));
  EXPECT_EQ(own.mass(Feature::po(I(kType), I("http://C"))), 2u);
  EXPECT_EQ(own.mass(Feature::p(I(kType))), 1u);
  EXPECT_EQ(own.orphans().size(), 1u);

  p.orphan_assignment.clear();
  EXPECT_THROW(shard_of_triple(Ownership(g, p), p, 5), InvalidPartition);
}

TEST(Partition, InventoryCoversPredicatesAndClasses) {
  auto g = small_graph();
  auto inv = build_inventory(g, {Feature::po(I("http://p"), I("http://a"))});
  EXPECT_EQ(inv, (std::set<Feature>{Feature::p(I(kType)), Feature::p(I("http://p")),
                                    Feature::p(I("http://q")),
                                    Feature::po(I(kType), I("http://C")),
                                    Feature::po(I(kType), I("http://D")),
                                    Feature::po(I("http://p"), I("http://a"))}));
  Partition prev;
  prev.assignment[Feature::p(I("http://gone"))] = 0;
  EXPECT_TRUE(build_inventory(g, {}, &prev).contains(Feature::p(I("http://gone"))));
}

TEST(Partition, ExtendKeepsPhysicalLayout) {
  auto g = small_graph();
  Partition p;
  p.k = 2;
  p.assignment[Feature::p(I(kType))] = 1;
  p.assignment[Feature::p(I("http://p"))] = 0;
  p.orphan_assignment[I("http://q")] = 1;
  auto ext = extend_partition(p, build_inventory(g, {Feature::po(I("http://p"), I("http://a"))}, &p));
  EXPECT_EQ(ext.shard_of(Feature::po(I(kType), I("http://C"))), 1u);
  EXPECT_EQ(ext.shard_of(Feature::po(I("http://p"), I("http://a"))), 0u);
  EXPECT_EQ(ext.shard_of(Feature::p(I("http://q"))), 1u);
  EXPECT_EQ(owner_scan(g, p), owner_scan(g, ext));
}

TEST(Partition, PlanMigrationDiffs) {
  auto g = small_graph();
  Partition a;
  a.k = 2;
  for (auto f : build_inventory(g, {})) a.assignment[f] = 0;
  Partition b = a;
  b.assignment[Feature::p(I("http://p"))] = 1;
  auto plan = plan_migration(Ownership(g, b), a, b);
  ASSERT_EQ(plan.moves.size(), 1u);
  EXPECT_EQ(plan.moves[0], (Move{Feature::p(I("http://p")), 0, 1, 2}));
  EXPECT_EQ(plan.triples_moved(), 2u);
  EXPECT_TRUE(plan_migration(Ownership(g, a), a, a).empty());
}

TEST(Partition, JsonRoundTrip) {
  std::mt19937_64 rng(9);
  auto g = random_graph(rng, {});
  auto p = random_partition(rng, g, 4);
  p.version = 7;
  p.workload_fingerprint = 0xdeadbeefcafef00dULL;
  p.frequencies = {{"Q1", 13}, {"Q2", 1}};
  auto text = to_json(p).dump();
  auto back = partition_from_json(nlohmann::json::parse(text));
  EXPECT_EQ(back, p);
  EXPECT_EQ(to_json(back).dump(), text);
  EXPECT_EQ(to_json(p)["workload_fingerprint"], "deadbeefcafef00d");

  MigrationPlan plan{{{Feature::p(I("http://p")), 0, 1, 2}}, 3.5, 1.25};
  EXPECT_EQ(plan_from_json(nlohmann::json::parse(to_json(plan).dump())), plan);
}

TEST(Partition, JsonErrors) {
  using nlohmann::json;
  EXPECT_THROW(partition_from_json(json::parse(R"({"k":2})")), InputError);
  EXPECT_THROW(partition_from_json(json::parse(R"({"version":0,"k":0,"assignment":[]})")), InputError);
  EXPECT_THROW(partition_from_json(json::parse(
                   R"({"version":0,"k":2,"assignment":[{"feature":"P <http://p>","shard":5}]})")),
               InputError);
  EXPECT_THROW(partition_from_json(json::parse(
                   R"({"version":0,"k":2,"assignment":[{"feature":"X <http://p>","shard":0}]})")),
               InputError);
  EXPECT_THROW(partition_from_json(json::parse(
                   R"({"version":0,"k":2,"assignment":[],"workload_fingerprint":"zz"})")),
               InputError);
}

TEST(Partition, FeatureTextRoundTrip) {
  for (const auto& f : {Feature::p(I("http://p")), Feature::po(I(kType), I("http://C")),
                        Feature::po(I("http://p"), Term::literal("a b", "", "en"))})
    EXPECT_EQ(parse_feature(to_string(f)), f);
  EXPECT_THROW(parse_feature("P"), InputError);
  EXPECT_THROW(parse_feature("P <http://p> <http://o>"), InputError);
}
