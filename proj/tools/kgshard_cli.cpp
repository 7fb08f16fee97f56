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

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "kgshard/commands.hpp"

namespace {

struct Flags {
  std::string data, workload, config, out, partition, baseline;
  std::optional<std::uint32_t> k, universities;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> linkage;
  std::optional<double> cut, threshold;
};

kgshard::EngineConfig resolve(const Flags& f) {
  kgshard::EngineConfig c;
  if (!f.config.empty()) c = kgshard::load_config(f.config);
  if (f.k) c.k = *f.k;
  if (f.universities) c.universities = *f.universities;
  if (f.seed) c.seed = *f.seed;
  if (f.linkage) c.partitioner.linkage = kgshard::parse_linkage(*f.linkage);
  if (f.cut) c.partitioner.cut_d = *f.cut;
  if (f.threshold) c.threshold = *f.threshold;
  c.validate();
  return c;
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw kgshard::InputError(std::string(flag) + " is required");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kgshard: workload-aware knowledge graph partitioning"};
  app.require_subcommand(1);
  Flags f;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", f.config, "JSON engine config");
    sub->add_option("--k", f.k, "shard count");
    sub->add_option("--seed", f.seed, "generator seed");
    sub->add_option("--linkage", f.linkage, "single | complete | average");
    sub->add_option("--cut", f.cut, "dendrogram cut distance");
    sub->add_option("--threshold", f.threshold, "cost degradation that forces adaptation");
  };
  auto inputs = [&](CLI::App* sub) {
    sub->add_option("--data", f.data, "N-Triples dataset");
    sub->add_option("--workload", f.workload, "workload JSONL");
  };

  auto* gen = app.add_subcommand("generate", "write a synthetic university dataset");
  common(gen);
  gen->add_option("--universities", f.universities, "number of universities");
  gen->add_option("--out", f.out, "output .nt file (stdout when omitted)");

  auto* part = app.add_subcommand("partition", "build the initial partition");
  common(part);
  inputs(part);
  part->add_option("--out", f.out, "output directory");

  auto* run = app.add_subcommand("run", "simulate the workload on a partition");
  common(run);
  inputs(run);
  run->add_option("--partition", f.partition, "partition JSON");
  run->add_option("--out", f.out, "output directory (CSV to stdout when omitted)");

  auto* adp = app.add_subcommand("adapt", "adapt a partition to the current workload");
  common(adp);
  inputs(adp);
  adp->add_option("--partition", f.partition, "partition JSON");
  adp->add_option("--baseline", f.baseline, "cost CSV of an earlier run");
  adp->add_option("--out", f.out, "output directory");

  auto* rep = app.add_subcommand("report", "export clustering and placement details");
  common(rep);
  inputs(rep);
  rep->add_option("--partition", f.partition, "partition JSON (optional)");
  rep->add_option("--out", f.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const auto cfg = resolve(f);
    if (gen->parsed()) {
      kgshard::cmd_generate(cfg, f.out, std::cout);
    } else if (part->parsed()) {
      require(f.data, "--data");
      require(f.workload, "--workload");
      require(f.out, "--out");
      kgshard::cmd_partition(f.data, f.workload, cfg, f.out, std::cout);
    } else if (run->parsed()) {
      require(f.data, "--data");
      require(f.workload, "--workload");
      require(f.partition, "--partition");
      kgshard::cmd_run(f.data, f.partition, f.workload, cfg, f.out, std::cout);
    } else if (adp->parsed()) {
      require(f.data, "--data");
      require(f.workload, "--workload");
      require(f.partition, "--partition");
      require(f.out, "--out");
      kgshard::cmd_adapt(f.data, f.partition, f.workload, cfg, f.out, f.baseline, std::cout);
    } else if (rep->parsed()) {
      require(f.data, "--data");
      require(f.workload, "--workload");
      require(f.out, "--out");
      kgshard::cmd_report(f.data, f.partition, f.workload, cfg, f.out, std::cout);
    }
  } catch (const kgshard::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
