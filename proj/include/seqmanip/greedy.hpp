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

#pragma once

#include "seqmanip/engine.hpp"

#include <span>
#include <vector>

namespace seqmanip {

namespace detail {

// Scratch buffers reused across greedy runs on the same instance.
struct GreedyWorkspace {
  std::vector<char> taken;
  std::vector<std::size_t> cursor;

  void reset(const Instance& inst) {
    taken.assign(inst.num_items(), 0);
    cursor.assign(static_cast<std::size_t>(inst.num_agents()) + 1, 0);
  }
};

// Runs the greedy rule under `policy` and reports each allocation to
// `emit(item, agent)`. Every ranking cursor only moves forward, so a run
// costs O(m + total cursor advance) = O(nm).
template <typename Emit>
void run_greedy(const Instance& inst, std::span<const Agent> policy, GreedyWorkspace& ws, Emit&& emit) {
  ws.reset(inst);
  auto top_remaining = [&](Agent a) {
    const Ranking& r = inst.ranking(a);
    std::size_t& c = ws.cursor[static_cast<std::size_t>(a)];
    while (ws.taken[static_cast<std::size_t>(r[c])]) ++c;
    return r[c];
  };
  // Position of the first non-manipulator turn after the current one.
  std::size_t next_core = 0;
  for (std::size_t t = 0; t < policy.size(); ++t) {
    const Agent a = policy[t];
    Item g;
    if (a != kManipulator) {
      g = top_remaining(a);
    } else {
      if (next_core <= t) {
        next_core = t + 1;
        while (next_core < policy.size() && policy[next_core] == kManipulator) ++next_core;
      }
      g = top_remaining(next_core < policy.size() ? policy[next_core] : kManipulator);
    }
    ws.taken[static_cast<std::size_t>(g)] = 1;
    emit(g, a);
  }
}

}  // namespace detail

struct GreedyResult {
  AllocationSequence sequence;
  PickingStrategy strategy;
};

// GreedyAlg under an arbitrary policy over the instance's items.
inline GreedyResult greedy_alg(const Instance& inst, std::span<const Agent> policy) {
  if (policy.size() != inst.num_items()) throw std::invalid_argument("policy length differs from item count");
  GreedyResult out;
  out.sequence.reserve(policy.size());
  detail::GreedyWorkspace ws;
  detail::run_greedy(inst, policy, ws, [&](Item g, Agent a) { out.sequence.push_back({g, a}); });
  out.strategy = strategy_from_sequence(inst, out.sequence);
  return out;
}

inline GreedyResult greedy_alg(const Instance& inst) { return greedy_alg(inst, inst.policy().turns); }

}  // namespace seqmanip
