// Copyright 2026 The seqmanip Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <map>
#include <set>

namespace seqmanip {
namespace {

// Policy and non-manipulator rankings; the manipulator side of canonical
// instances is fixed.
std::string signature(const Instance& inst) {
  std::string s = to_string(inst.policy()) + "|";
  for (Agent a = 2; a <= inst.num_agents(); ++a) {
    for (Item g : inst.ranking(a)) s += std::to_string(g) + ",";
    s += "|";
  }
  return s;
}

TEST(CanonicalPolicies, RestrictedGrowthLabels) {
  const auto ps = canonical_policies(3, 3);
  std::vector<std::string> text;
  for (const auto& p : ps) text.push_back(to_string(p));
  EXPECT_EQ(text, (std::vector<std::string>{"111", "112", "121", "122", "123", "211", "212", "213", "221",
                                            "222", "223", "231", "232", "233"}));
}

TEST(CanonicalInstances, CountMatchesEnumeration) {
  for (int n = 1; n <= 3; ++n)
    for (std::size_t m = 0; m <= 4; ++m) {
      std::uint64_t seen = 0;
      std::set<std::string> distinct;
      for (const Policy& p : canonical_policies(n, m))
        for_each_instance_with_policy(n, p, [&](const Instance& inst) {
          ++seen;
          distinct.insert(signature(inst));
        });
      EXPECT_EQ(seen, count_canonical_instances(n, m)) << n << " " << m;
      EXPECT_EQ(distinct.size(), seen);
    }
  EXPECT_EQ(count_canonical_instances(3, 6), 69'045'127u);
}

// Every instance with n <= 3 and m <= 4 (all policies, all ranking tuples,
// utilities m..1) has the optimum of its canonical representative.
TEST(CanonicalInstances, CoverEveryInstanceUpToRelabelling) {
  for (int n = 2; n <= 3; ++n)
    for (std::size_t m = 1; m <= 4; ++m) {
      std::map<std::string, Rational> canonical;
      for (const Policy& p : canonical_policies(n, m))
        for_each_instance_with_policy(n, p, [&](const Instance& inst) { canonical[signature(inst)] = dp_value(inst); });

      std::mt19937_64 rng(m * 10 + static_cast<std::uint64_t>(n));
      for (int k = 0; k < 400; ++k) {
        const Instance raw = generate_random_instance(n, m, rng());
        // Relabel items so the manipulator ranks them 0, 1, ...
        std::vector<Item> to_new(m);
        for (std::size_t pos = 0; pos < m; ++pos) to_new[static_cast<std::size_t>(raw.ranking(1)[pos])] = static_cast<Item>(pos);
        // Relabel agents by first appearance.
        std::vector<Agent> agent_map(static_cast<std::size_t>(n) + 1, 0);
        agent_map[1] = 1;
        Agent next = 2;
        Policy p;
        for (Agent a : raw.policy().turns) {
          if (!agent_map[static_cast<std::size_t>(a)]) agent_map[static_cast<std::size_t>(a)] = next++;
          p.turns.push_back(agent_map[static_cast<std::size_t>(a)]);
        }
        for (Agent a = 2; a <= n; ++a)
          if (!agent_map[static_cast<std::size_t>(a)]) agent_map[static_cast<std::size_t>(a)] = next++;
        std::vector<Ranking> rankings(static_cast<std::size_t>(n));
        for (Agent a = 1; a <= n; ++a) {
          Ranking r;
          for (Item g : raw.ranking(a)) r.push_back(to_new[static_cast<std::size_t>(g)]);
          rankings[static_cast<std::size_t>(agent_map[static_cast<std::size_t>(a)] - 1)] = r;
        }
        // Truncate each ranking after the agent's last reachable position.
        for (Agent a = 2; a <= n; ++a) {
          std::size_t last = 0;
          for (std::size_t t = 0; t < m; ++t)
            if (p[t] == a) last = t + 1;
          if (last + 1 >= m) continue;
          Ranking& r = rankings[static_cast<std::size_t>(a - 1)];
          std::sort(r.begin() + static_cast<long>(last), r.end());
        }
        std::vector<Rational> utility(m);
        for (std::size_t g = 0; g < m; ++g) utility[static_cast<std::size_t>(to_new[g])] = raw.utility(static_cast<Item>(g));
        const Instance canon = Instance::create(raw.item_names(), n, p, rankings, utility);
        ASSERT_TRUE(canonical.count(signature(canon))) << signature(canon);
        EXPECT_EQ(canonical[signature(canon)], dp_value(raw));
      }
    }
}

TEST(Sweep, SmallExhaustivePoolsPass) {
  VerifyOptions options;
  options.certify_all_crucial = true;
  for (std::size_t m = 0; m <= 5; ++m) {
    const SweepStats s = exhaustive_sweep(2, m, options, 2);
    EXPECT_TRUE(s.ok()) << s.first_failure.value_or("");
    EXPECT_EQ(s.instances, count_canonical_instances(2, m));
  }
  const SweepStats s3 = exhaustive_sweep(3, 4, options, 2);
  EXPECT_TRUE(s3.ok());
  EXPECT_GT(s3.crucial_certified, 0u);
}

TEST(Sweep, CertifyingEverythingAgreesWithLazyCertification) {
  VerifyOptions all;
  all.certify_all_crucial = true;
  const SweepStats eager = exhaustive_sweep(3, 4, all);
  const SweepStats lazy = exhaustive_sweep(3, 4);
  EXPECT_EQ(eager.crucial_violations, lazy.crucial_violations);
  EXPECT_EQ(eager.greedy_suboptimal, lazy.greedy_suboptimal);
}

TEST(Sweep, RandomPoolIsReproducible) {
  RandomSweepSpec spec;
  spec.count = 40;
  spec.seed = 17;
  EXPECT_EQ(random_sweep_instance(spec, 5), random_sweep_instance(spec, 5));
  const SweepStats a = random_sweep(spec, {}, 1), b = random_sweep(spec, {}, 3);
  EXPECT_TRUE(a.ok());
  EXPECT_EQ(a.instances, 40u);
  EXPECT_EQ(a.greedy_suboptimal, b.greedy_suboptimal);
}

TEST(ParallelMap, PreservesOrderAndPropagatesErrors) {
  const auto v = parallel_map<std::size_t>(100, 4, [](std::size_t i) { return i * i; });
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v[i], i * i);
  EXPECT_THROW(parallel_map<int>(10, 3,
                                 [](std::size_t i) -> int {
                                   if (i == 7) throw std::runtime_error("boom");
                                   return 0;
                                 }),
               std::runtime_error);
}

}  // namespace
}  // namespace seqmanip
