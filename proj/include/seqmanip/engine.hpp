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

// Executing picking sequences and reasoning about allocation traces.
//
// Non-manipulators always pick truthfully: at each of its turns an agent
// takes its most preferred item that is still available. The manipulator
// plays a picking strategy, a permutation of the items, and takes the
// earliest still-available entry of it.

#pragma once

#include "seqmanip/model.hpp"
#include "seqmanip/policy.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace seqmanip {

struct PickingStrategy {
  std::vector<Item> order;

  friend bool operator==(const PickingStrategy&, const PickingStrategy&) = default;
};

struct Allocation {
  Item item;
  Agent agent;

  friend bool operator==(const Allocation&, const Allocation&) = default;
};

// Possibly partial: a prefix of a full allocation trace.
using AllocationSequence = std::vector<Allocation>;

struct Bundle {
  std::vector<Item> items;  // in allocation order
  Rational total_utility;
};

inline bool is_permutation_of_items(const Instance& inst, std::span<const Item> order) {
  const std::size_t m = inst.num_items();
  if (order.size() != m) return false;
  std::vector<char> seen(m, 0);
  for (Item g : order) {
    if (g < 0 || static_cast<std::size_t>(g) >= m || seen[static_cast<std::size_t>(g)]) return false;
    seen[static_cast<std::size_t>(g)] = 1;
  }
  return true;
}

// Runs `strategy` under an explicit policy (same length as the item set).
inline AllocationSequence execute(const Instance& inst, std::span<const Agent> policy,
                                  const PickingStrategy& strategy) {
  const std::size_t m = inst.num_items();
  if (!is_permutation_of_items(inst, strategy.order))
    throw std::invalid_argument("picking strategy is not a permutation of the items");
  if (policy.size() != m) throw std::invalid_argument("policy length differs from item count");
  std::vector<char> taken(m, 0);
  std::vector<std::size_t> cursor(static_cast<std::size_t>(inst.num_agents()) + 1, 0);
  AllocationSequence seq;
  seq.reserve(m);
  for (Agent a : policy) {
    std::span<const Item> order =
        a == kManipulator ? std::span<const Item>(strategy.order) : std::span<const Item>(inst.ranking(a));
    std::size_t& c = cursor[static_cast<std::size_t>(a)];
    while (taken[static_cast<std::size_t>(order[c])]) ++c;
    const Item g = order[c];
    taken[static_cast<std::size_t>(g)] = 1;
    seq.push_back({g, a});
  }
  return seq;
}

inline AllocationSequence execute(const Instance& inst, const PickingStrategy& strategy) {
  return execute(inst, inst.policy().turns, strategy);
}

inline PickingStrategy truthful_strategy(const Instance& inst) { return {inst.ranking(kManipulator)}; }

inline Policy agents_of(const AllocationSequence& seq) {
  Policy p;
  for (const auto& step : seq) p.turns.push_back(step.agent);
  return p;
}

inline Bundle bundle_of(const Instance& inst, const AllocationSequence& seq, Agent agent = kManipulator) {
  Bundle b;
  b.total_utility = 0;
  for (const auto& step : seq) {
    if (step.agent != agent) continue;
    b.items.push_back(step.item);
    b.total_utility += inst.utility(step.item);
  }
  return b;
}

// Items sorted by the manipulator's ranking; the canonical form for
// comparing bundles as sets.
inline std::vector<Item> sorted_by_manipulator(const Instance& inst, std::vector<Item> items) {
  std::sort(items.begin(), items.end(),
            [&](Item a, Item b) { return inst.rank(kManipulator, a) < inst.rank(kManipulator, b); });
  return items;
}

// Manipulator's items in allocation order, then every other item in
// truthful order.
inline PickingStrategy strategy_from_sequence(const Instance& inst, const AllocationSequence& seq) {
  PickingStrategy s;
  std::vector<char> used(inst.num_items(), 0);
  for (const auto& step : seq) {
    if (step.agent != kManipulator) continue;
    s.order.push_back(step.item);
    used[static_cast<std::size_t>(step.item)] = 1;
  }
  for (Item g : inst.ranking(kManipulator))
    if (!used[static_cast<std::size_t>(g)]) s.order.push_back(g);
  return s;
}

// True iff no item repeats and every non-manipulator step takes that
// agent's top remaining item. The trace's own agents define the policy.
inline bool is_feasible_trace(const Instance& inst, const AllocationSequence& seq) {
  const std::size_t m = inst.num_items();
  if (seq.size() > m) return false;
  std::vector<char> taken(m, 0);
  std::vector<std::size_t> cursor(static_cast<std::size_t>(inst.num_agents()) + 1, 0);
  for (const auto& step : seq) {
    if (step.item < 0 || static_cast<std::size_t>(step.item) >= m) return false;
    if (step.agent < 1 || step.agent > inst.num_agents()) return false;
    if (taken[static_cast<std::size_t>(step.item)]) return false;
    if (step.agent != kManipulator) {
      const Ranking& r = inst.ranking(step.agent);
      std::size_t& c = cursor[static_cast<std::size_t>(step.agent)];
      while (taken[static_cast<std::size_t>(r[c])]) ++c;
      if (r[c] != step.item) return false;
    }
    taken[static_cast<std::size_t>(step.item)] = 1;
  }
  return true;
}

struct Feasibility {
  bool feasible = false;
  // Present when the sequence is feasible and complete.
  std::optional<PickingStrategy> strategy;
};

// `seq` must follow a prefix of the instance's own policy.
inline Feasibility check_feasible(const Instance& inst, const AllocationSequence& seq) {
  if (seq.size() > inst.num_items())
    throw std::invalid_argument("allocation sequence longer than the policy");
  for (std::size_t t = 0; t < seq.size(); ++t)
    if (seq[t].agent != inst.policy()[t])
      throw std::invalid_argument("allocation " + std::to_string(t + 1) + " is for agent " +
                                  std::to_string(seq[t].agent) + " but the policy has agent " +
                                  std::to_string(inst.policy()[t]));
  Feasibility out;
  out.feasible = is_feasible_trace(inst, seq);
  if (out.feasible && seq.size() == inst.num_items()) out.strategy = strategy_from_sequence(inst, seq);
  return out;
}

// Has `agent` considered `item` within the first `x` allocations? That is:
// the last item the agent received so far is ranked strictly below `item`.
inline bool considered_before(const Instance& inst, const AllocationSequence& seq, Item item, Agent agent,
                              std::size_t x) {
  if (agent == kManipulator) throw std::invalid_argument("considered_before is defined for non-manipulators only");
  if (x > seq.size()) throw std::invalid_argument("position beyond the end of the sequence");
  std::optional<Item> last;
  for (std::size_t t = 0; t < x; ++t)
    if (seq[t].agent == agent) last = seq[t].item;
  if (!last) return false;
  return inst.prefers(agent, item, *last);
}

// Greedy: each manipulator step takes the favourite remaining item of the
// next non-manipulator in the core (or its own best remaining item once the
// core is exhausted). The trace may follow any policy with the instance's
// core, e.g. a dominated one.
inline bool is_greedy(const Instance& inst, const AllocationSequence& seq) {
  if (!is_feasible_trace(inst, seq)) throw std::invalid_argument("is_greedy: infeasible allocation sequence");
  const auto core = core_of(inst.policy());
  const std::size_t m = inst.num_items();
  std::vector<char> taken(m, 0);
  std::size_t core_idx = 0;
  auto top_remaining = [&](Agent a) {
    for (Item g : inst.ranking(a))
      if (!taken[static_cast<std::size_t>(g)]) return g;
    return Item{-1};
  };
  for (const auto& step : seq) {
    if (step.agent == kManipulator) {
      const Agent target = core_idx < core.size() ? core[core_idx] : kManipulator;
      if (top_remaining(target) != step.item) return false;
    } else {
      if (core_idx >= core.size() || core[core_idx] != step.agent)
        throw std::invalid_argument("is_greedy: sequence core differs from the instance core");
      ++core_idx;
    }
    taken[static_cast<std::size_t>(step.item)] = 1;
  }
  return true;
}

// Same per-agent counts, same allocated item set, same last item for every
// non-manipulator.
inline bool invariance_related(const AllocationSequence& s1, const AllocationSequence& s2) {
  if (s1.size() != s2.size()) return false;
  std::map<Agent, std::size_t> count1, count2;
  std::map<Agent, Item> last1, last2;
  std::vector<Item> items1, items2;
  for (const auto& st : s1) {
    ++count1[st.agent];
    if (st.agent != kManipulator) last1[st.agent] = st.item;
    items1.push_back(st.item);
  }
  for (const auto& st : s2) {
    ++count2[st.agent];
    if (st.agent != kManipulator) last2[st.agent] = st.item;
    items2.push_back(st.item);
  }
  std::sort(items1.begin(), items1.end());
  std::sort(items2.begin(), items2.end());
  return count1 == count2 && items1 == items2 && last1 == last2;
}

// replacement ++ seq[i..]. Valid whenever the replaced prefix and the
// replacement are in the invariance relation.
inline AllocationSequence splice(const Instance& inst, const AllocationSequence& seq, std::size_t i,
                                 const AllocationSequence& replacement) {
  if (seq.size() != inst.num_items() || !is_feasible_trace(inst, seq))
    throw std::invalid_argument("splice: base sequence must be feasible and complete");
  if (i > seq.size() || replacement.size() != i)
    throw std::invalid_argument("splice: replacement length must equal the prefix length");
  if (!is_feasible_trace(inst, replacement)) throw std::invalid_argument("splice: replacement is infeasible");
  const AllocationSequence prefix(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(i));
  if (!invariance_related(prefix, replacement))
    throw std::invalid_argument("splice: replacement is not in the invariance relation with the prefix");
  AllocationSequence out = replacement;
  out.insert(out.end(), seq.begin() + static_cast<std::ptrdiff_t>(i), seq.end());
  if (!is_feasible_trace(inst, out)) throw std::logic_error("splice: exchange produced an infeasible sequence");
  return out;
}

}  // namespace seqmanip
