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

#include <chrono>

namespace seqmanip {
namespace {

using testing::example1;
using testing::items;
using testing::trace;

TEST(Greedy, ExampleOne) {
  const Instance inst = example1();
  const GreedyResult g = greedy_alg(inst);
  EXPECT_EQ(g.sequence, trace(inst, "e1 b3 c2 d2 a1"));
  EXPECT_EQ(testing::bundle_names(inst, bundle_of(inst, g.sequence).items), (std::set<std::string>{"a", "e"}));
  EXPECT_EQ(execute(inst, g.strategy), g.sequence);
}

TEST(Greedy, DominatedPolicyOfExampleOne) {
  const Instance inst = example1("32121");
  const GreedyResult g = greedy_alg(inst);
  EXPECT_EQ(bundle_of(inst, g.sequence).items, items(inst, "ba"));
  EXPECT_EQ(bundle_of(inst, g.sequence).total_utility, Rational(9));
}

TEST(Greedy, ManipulatorOnly) {
  const Instance inst = testing::make_instance("ab", "11", {"ab"});
  EXPECT_EQ(greedy_alg(inst).sequence, trace(inst, "a1 b1"));
}

TEST(Greedy, ExplicitPolicyOverload) {
  const Instance inst = example1();
  const Policy p = parse_policy("31221");
  EXPECT_EQ(bundle_of(inst, greedy_alg(inst, p.turns).sequence).items, items(inst, "ca"));
  EXPECT_THROW(greedy_alg(inst, parse_policy("3122").turns), std::invalid_argument);
}

// The greedy rule restated naively, rescanning rankings at every turn.
AllocationSequence naive_greedy(const Instance& inst) {
  const auto& p = inst.policy().turns;
  std::vector<bool> taken(inst.num_items(), false);
  AllocationSequence seq;
  for (std::size_t t = 0; t < p.size(); ++t) {
    Agent whose = p[t];
    if (whose == kManipulator) {
      whose = kManipulator;
      for (std::size_t u = t + 1; u < p.size(); ++u)
        if (p[u] != kManipulator) {
          whose = p[u];
          break;
        }
    }
    for (Item g : inst.ranking(whose)) {
      if (taken[static_cast<std::size_t>(g)]) continue;
      taken[static_cast<std::size_t>(g)] = true;
      seq.push_back({g, p[t]});
      break;
    }
  }
  return seq;
}

TEST(Greedy, MatchesNaiveRuleAndIsGreedy) {
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    const Instance inst = generate_random_instance(1 + static_cast<int>(seed % 5), seed % 13, seed);
    const GreedyResult g = greedy_alg(inst);
    EXPECT_EQ(g.sequence, naive_greedy(inst)) << seed;
    EXPECT_TRUE(is_greedy(inst, g.sequence)) << seed;
    EXPECT_EQ(execute(inst, g.strategy), g.sequence) << seed;
    EXPECT_EQ(greedy_alg(inst).strategy, g.strategy) << seed;
  }
}

TEST(Greedy, GreedyRunsOnDominatedPoliciesAreGreedy) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const Instance inst = generate_random_instance(3, 2 + seed % 7, seed);
    for (const Policy& p : enumerate_dominated(inst.policy()))
      EXPECT_TRUE(is_greedy(inst, greedy_alg(inst, p.turns).sequence));
  }
}

TEST(Greedy, NearLinearTime) {
  auto time_at = [](std::size_t m) {
    const Instance inst = generate_random_instance(3, m, 99);
    const auto t0 = std::chrono::steady_clock::now();
    std::size_t sink = 0;
    for (int r = 0; r < 20; ++r) sink += greedy_alg(inst).sequence.size();
    EXPECT_EQ(sink, 20 * m);
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  const double small = time_at(20000), large = time_at(160000);
  // 8x the items; quadratic behaviour would be 64x.
  EXPECT_LT(large / small, 24.0) << small << " " << large;
}

}  // namespace
}  // namespace seqmanip
