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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>

#include "checks.hpp"

using namespace kgtest;

namespace {

int failures = 0;

void report(int n, bool ok, double seconds, double limit, const std::string& detail) {
  const bool in_time = seconds <= limit;
  if (!ok || !in_time) ++failures;
  std::printf("%s criterion %d: %s (%.2f s, limit %.0f s)%s\n", ok && in_time ? "PASS" : "FAIL", n,
              detail.c_str(), seconds, limit, in_time ? "" : " [too slow]");
  std::fflush(stdout);
}

/// Runs `body` (which fills `detail` and returns pass/fail) and times it.
void criterion(int n, double limit, const std::function<bool(std::string&)>& body) {
  auto t0 = std::chrono::steady_clock::now();
  std::string detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail += std::string(" exception: ") + e.what();
  }
  double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(n, ok, s, limit, detail);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

/// Everything an experiment writes, for byte comparison.
struct Artifacts {
  std::string partition_before, partition_after, plan, costs_before, costs_after, comparison;
  bool operator==(const Artifacts&) const = default;
};

struct Experiment {
  AdaptResult result;
  Artifacts files;
  double skew = 0;
};

Experiment run_experiment(const KnowledgeGraph& g, const Workload& base, const Workload& next) {
  Experiment e;
  auto p = initial_partition(g, base, 3);
  e.result = adapt(p, g, next);
  auto dump = [](const auto& x) { return to_json(x).dump(2); };
  auto csv = [](const CostReport& r) {
    std::ostringstream out;
    write_cost_csv(out, r);
    return out.str();
  };
  std::ostringstream cmp;
  write_comparison_csv(cmp, e.result.before, e.result.after);
  e.files = {dump(p), dump(e.result.partition), dump(e.result.plan), csv(e.result.before),
             csv(e.result.after), cmp.str()};
  e.skew = shard_skew(shard_sizes(g, e.result.partition));
  return e;
}

std::uint64_t subset_dist_joins(const CostReport& r, const Workload& subset) {
  std::uint64_t n = 0;
  for (const auto& e : r.entries)
    if (subset.contains(e.query_id)) n += e.frequency * e.dist_joins;
  return n;
}

}  // namespace

int main() {
  const auto lubm14 = load_fixture("workloads/lubm14.jsonl");
  const auto eq10 = load_fixture("workloads/lubm_eq10.jsonl");
  std::vector<double> committed_skews;

  criterion(1, 1, [&](std::string& d) {
    double v = jaccard_distance(lubm14.at("Q2").features.features, lubm14.at("Q8").features.features);
    d = fmt("Jaccard(Q2, Q8) = %.17g, expected 0.625", v);
    return v == 0.625;
  });

  criterion(2, 1, [&](std::string& d) {
    const auto& q2 = lubm14.at("Q2").features.features;
    const auto& q8 = lubm14.at("Q8").features.features;
    const std::set<Feature> want2{Feature::po(I(kType), ub("GraduateStudent")),
                                  Feature::po(I(kType), ub("University")),
                                  Feature::po(I(kType), ub("Department")),
                                  Feature::p(ub("memberOf")), Feature::p(ub("subOrganizationOf")),
                                  Feature::p(ub("undergraduateDegreeFrom"))};
    const std::set<Feature> want8{Feature::po(I(kType), ub("Student")),
                                  Feature::po(I(kType), ub("Department")),
                                  Feature::p(ub("memberOf")), Feature::p(ub("subOrganizationOf")),
                                  Feature::p(ub("emailAddress"))};
    d = fmt("Q2 has %.0f features, Q8 has %.0f", static_cast<double>(q2.size()),
            static_cast<double>(q8.size()));
    return q2 == want2 && q8 == want8;
  });

  criterion(3, 30, [&](std::string& d) {
    std::mt19937_64 rng(3);
    int bad = 0;
    std::string first;
    for (int i = 0; i < 200; ++i) {
      auto why = check_hac(rng, 8);
      if (!why.empty() && bad++ == 0) first = why;
    }
    d = fmt("%.0f of 200 matrices differ from the rescan oracle", bad) + (first.empty() ? "" : ": " + first);
    return bad == 0;
  });

  criterion(4, 60, [&](std::string& d) {
    std::mt19937_64 rng(4);
    int bad = 0;
    std::string first;
    for (int i = 0; i < 500; ++i) {
      auto why = check_federated(rng);
      if (!why.empty() && bad++ == 0) first = why;
    }
    d = fmt("%.0f of 500 federated results differ from whole-graph evaluation", bad) +
        (first.empty() ? "" : ": " + first);
    return bad == 0;
  });

  criterion(5, 60, [&](std::string& d) {
    std::mt19937_64 rng(5);
    int commits = 0;
    auto why = check_conservation(rng, 50, &commits);
    d = why.empty() ? fmt("50 adaptation steps, %.0f migrations applied, every triple on exactly its owner's shard",
                          commits)
                    : why;
    return why.empty();
  });

  criterion(6, 300, [&](std::string& d) {
    std::mt19937_64 rng(6);
    int ran = 0, attempts = 0, commits = 0, reverts = 0, bad = 0;
    std::string first;
    while (ran < 100 && attempts < 1000) {
      ++attempts;
      auto r = check_never_worse(rng);
      if (!r.ran) continue;
      ++ran;
      if (r.outcome == AdaptOutcome::Committed) {
        ++commits;
        committed_skews.push_back(r.skew);
      } else {
        ++reverts;
      }
      if (!r.failure.empty() && bad++ == 0) first = r.failure;
    }
    d = fmt("%.0f scenarios: %.0f committed, %.0f reverted", ran, commits, reverts) +
        fmt(", %.0f violations, %.0f infeasible instances skipped", bad, attempts - ran) +
        (first.empty() ? "" : ": " + first);
    return ran == 100 && bad == 0;
  });

  const auto g = generate_lubm({1, 42});
  Workload with_eq = lubm14;
  for (const auto& [id, e] : eq10.entries()) with_eq.register_query(e.query, e.frequency);
  Workload biased = lubm14;
  biased.register_query(lubm14.at("Q1").query, 13);
  Experiment exp1, exp2;

  criterion(7, 120, [&](std::string& d) {
    exp1 = run_experiment(g, lubm14, with_eq);
    const auto& r = exp1.result;
    auto before = subset_dist_joins(r.before, eq10);
    auto after = subset_dist_joins(r.after, eq10);
    double drop = before == 0 ? 0 : 1.0 - static_cast<double>(after) / static_cast<double>(before);
    d = std::string(to_string(r.outcome)) + ", EQ weighted distributed joins " +
        fmt("%.0f -> %.0f (%.1f%% lower, need >= 30%%)", before, after, 100 * drop);
    if (r.outcome == AdaptOutcome::Committed) committed_skews.push_back(exp1.skew);
    return r.outcome == AdaptOutcome::Committed && drop >= 0.30;
  });

  criterion(8, 120, [&](std::string& d) {
    exp2 = run_experiment(g, lubm14, biased);
    const auto& r = exp2.result;
    auto q1b = r.before.find("Q1")->dist_joins, q1a = r.after.find("Q1")->dist_joins;
    d = std::string(to_string(r.outcome)) +
        fmt(", weighted cost %.4f -> %.4f", r.before.weighted_total(), r.after.weighted_total()) +
        fmt(", Q1 distributed joins %.0f -> %.0f", q1b, q1a);
    if (r.outcome == AdaptOutcome::Committed) committed_skews.push_back(exp2.skew);
    return r.outcome == AdaptOutcome::Committed &&
           r.after.weighted_total() < r.before.weighted_total() && q1a <= q1b;
  });

  criterion(9, 1, [&](std::string& d) {
    double worst = 0;
    for (double s : committed_skews) worst = std::max(worst, s);
    d = fmt("%.0f committed partitions, worst max/mean %.4f (limit 1.25)",
            static_cast<double>(committed_skews.size()), worst);
    return !committed_skews.empty() && worst <= 1.25 + 1e-12;
  });

  criterion(10, 240, [&](std::string& d) {
    auto again1 = run_experiment(g, lubm14, with_eq);
    auto again2 = run_experiment(g, lubm14, biased);
    bool same1 = again1.files == exp1.files, same2 = again2.files == exp2.files;
    d = std::string("experiment 1 ") + (same1 ? "identical" : "differs") + ", experiment 2 " +
        (same2 ? "identical" : "differs");
    return same1 && same2;
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
