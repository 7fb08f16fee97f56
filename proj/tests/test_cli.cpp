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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "support.hpp"

namespace fs = std::filesystem;

namespace {

/// Scratch directory, removed on teardown.
class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("kgshard_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run(const std::string& args) const {
    std::string cmd = std::string(KGSHARD_CLI) + " " + args + " >" + path("stdout.txt") + " 2>" +
                      path("stderr.txt");
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  }

  std::string slurp(const std::string& name) const {
    std::ifstream in(path(name));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  void spit(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
  }

  std::string workload(const std::string& rel) const { return kgtest::data_path(rel); }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, FullCycle) {
  ASSERT_EQ(run("generate --seed 42 --out " + path("lubm.nt")), 0) << slurp("stderr.txt");
  const std::string data = "--data " + path("lubm.nt");
  const std::string lubm14 = " --workload " + workload("workloads/lubm14.jsonl");
  const std::string eq = " --workload " + workload("workloads/lubm_eq10.jsonl");

  ASSERT_EQ(run("partition " + data + lubm14 + " --k 3 --out " + path("p0")), 0) << slurp("stderr.txt");
  EXPECT_TRUE(fs::exists(path("p0/partition.json")));
  EXPECT_TRUE(fs::exists(path("p0/manifest.json")));

  ASSERT_EQ(run("run " + data + lubm14 + " --partition " + path("p0/partition.json") + " --out " + path("r0")), 0);
  auto csv = slurp("r0/costs.csv");
  EXPECT_EQ(csv.rfind("query_id,frequency,local_joins,dist_joins,rows,cost_units\n", 0), 0u);
  EXPECT_NE(csv.find("\nALL,14,"), std::string::npos);
  EXPECT_TRUE(fs::exists(path("r0/timing.csv")));

  ASSERT_EQ(run("adapt " + data + eq + " --partition " + path("p0/partition.json") + " --out " + path("a1")), 0)
      << slurp("stderr.txt");
  EXPECT_NE(slurp("stdout.txt").find("committed"), std::string::npos);
  auto plan = nlohmann::json::parse(slurp("a1/plan.json"));
  EXPECT_EQ(plan["outcome"], "committed");
  EXPECT_TRUE(fs::exists(path("a1/comparison.csv")));

  // Same workload again: nothing to do, partition unchanged.
  ASSERT_EQ(run("adapt " + data + eq + " --partition " + path("a1/partition.json") + " --out " + path("a2")), 0);
  EXPECT_EQ(nlohmann::json::parse(slurp("a2/plan.json"))["outcome"], "no-op");
  EXPECT_EQ(slurp("a2/partition.json"), slurp("a1/partition.json"));

  ASSERT_EQ(run("report " + data + eq + " --partition " + path("a1/partition.json") + " --out " + path("rep")), 0);
  for (const char* f : {"distances.csv", "dendrogram.json", "groups.json", "features.csv", "federated.sparql"})
    EXPECT_TRUE(fs::exists(path(std::string("rep/") + f))) << f;
}

TEST_F(Cli, RunIsByteIdentical) {
  ASSERT_EQ(run("generate --seed 5 --out " + path("g.nt")), 0);
  const std::string args = "--data " + path("g.nt") + " --workload " + workload("workloads/lubm14.jsonl");
  ASSERT_EQ(run("partition " + args + " --out " + path("p")), 0);
  ASSERT_EQ(run("run " + args + " --partition " + path("p/partition.json")), 0);
  auto first = slurp("stdout.txt");
  ASSERT_EQ(run("run " + args + " --partition " + path("p/partition.json")), 0);
  EXPECT_EQ(slurp("stdout.txt"), first);
  EXPECT_EQ(first.rfind("query_id,", 0), 0u);
}

TEST_F(Cli, InputErrorsExitTwo) {
  ASSERT_EQ(run("generate --seed 1 --out " + path("g.nt")), 0);
  spit("bad.jsonl", "{\"id\": \"Q1\", \"query\": \"SELECT ?x WHERE { ?x \", \"frequency\": 1}\n");
  spit("bad.nt", "<http://a> <http://b> .\n");
  spit("bad.json", "{\"kk\": 1}");
  const std::string data = "--data " + path("g.nt");
  EXPECT_EQ(run("partition " + data + " --workload " + path("bad.jsonl") + " --out " + path("p")), 2);
  EXPECT_NE(slurp("stderr.txt").find("error"), std::string::npos);
  EXPECT_EQ(run("partition --data " + path("bad.nt") + " --workload " +
                workload("workloads/lubm14.jsonl") + " --out " + path("p")),
            2);
  EXPECT_EQ(run("partition " + data + " --workload " + path("missing.jsonl") + " --out " + path("p")), 2);
  EXPECT_EQ(run("generate --config " + path("bad.json")), 2);
  EXPECT_EQ(run("generate --linkage ward"), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("run " + data + " --workload " + workload("workloads/lubm14.jsonl")), 2);
}

TEST_F(Cli, PartitionShardCountMustMatch) {
  ASSERT_EQ(run("generate --seed 1 --out " + path("g.nt")), 0);
  const std::string args = "--data " + path("g.nt") + " --workload " + workload("workloads/lubm14.jsonl");
  ASSERT_EQ(run("partition " + args + " --k 2 --out " + path("p")), 0);
  EXPECT_EQ(run("run " + args + " --k 3 --partition " + path("p/partition.json")), 2);
  EXPECT_EQ(run("run " + args + " --k 2 --partition " + path("p/partition.json")), 0);
}
