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

// Exponential ground-truth solvers for small instances.
//
// choice_tree_best branches over every available item at every manipulator
// turn; it knows nothing about greediness or domination and is the
// definitional optimum. dominated_greedy_best runs GreedyAlg on every
// dominated policy and keeps the best result. The two share no code beyond
// executing strategies, so agreement between them (and with the DP) is a
// meaningful check.

#pragma once

#include "seqmanip/engine.hpp"
#include "seqmanip/greedy.hpp"
#include "seqmanip/policy.hpp"

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace seqmanip {

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleBudget {
  std::uint64_t max_nodes = 10'000'000;    // choice-tree expansions
  std::uint64_t max_policies = 1'000'000;  // dominated policies visited
};

struct Solution {
  PickingStrategy strategy;
  AllocationSequence sequence;  // execute(instance, strategy)
  Bundle bundle;
  Rational utility;
};

inline Solution make_solution(const Instance& inst, PickingStrategy strategy) {
  Solution s;
  s.sequence = execute(inst, strategy);
  s.strategy = std::move(strategy);
  s.bundle = bundle_of(inst, s.sequence);
  s.utility = s.bundle.total_utility;
  return s;
}

namespace detail {

// Bit (m-1-rank) per item: among equal utilities the larger mask is the
// bundle that is lexicographically smaller in the manipulator's order.
inline std::uint64_t rank_bit(const Instance& inst, Item g) {
  return std::uint64_t{1} << (inst.num_items() - 1 - inst.rank(kManipulator, g));
}

template <typename W>
struct TreeValue {
  W utility{};
  std::uint64_t bundle = 0;

  bool better_than(const TreeValue& o) const {
    return utility > o.utility || (utility == o.utility && bundle > o.bundle);
  }
};

template <typename W>
class ChoiceTree {
 public:
  ChoiceTree(const Instance& inst, std::span<const Agent> policy, std::span<const W> weights, std::uint64_t budget)
      : inst_(inst), policy_(policy), w_(weights), budget_(budget), m_(inst.num_items()) {
    if (m_ > 64) throw BudgetExceeded("choice-tree oracle supports at most 64 items");
    if (policy.size() != m_) throw std::invalid_argument("policy length differs from item count");
    if (m_ <= kFlatLimit) {
      flat_.resize(std::size_t{1} << m_);
      known_.assign(std::size_t{1} << m_, 0);
    }
  }

  TreeValue<W> solve() { return value(0); }

  // Manipulator picks, in order, along the tie-broken optimal branch.
  std::vector<Item> best_picks() {
    std::vector<Item> picks;
    std::uint64_t mask = 0;
    for (std::size_t t = 0; t < m_; ++t) {
      const Item g = policy_[t] == kManipulator ? best_choice(mask) : top_remaining(policy_[t], mask);
      if (policy_[t] == kManipulator) picks.push_back(g);
      mask |= std::uint64_t{1} << g;
    }
    return picks;
  }

  std::uint64_t nodes() const { return nodes_; }

 private:
  static constexpr std::size_t kFlatLimit = 16;

  Item top_remaining(Agent a, std::uint64_t mask) const {
    for (Item g : inst_.ranking(a))
      if (!(mask >> g & 1)) return g;
    return -1;
  }

  TreeValue<W> candidate(std::uint64_t mask, Item g) {
    TreeValue<W> sub = value(mask | (std::uint64_t{1} << g));
    sub.utility += w_[static_cast<std::size_t>(g)];
    sub.bundle |= rank_bit(inst_, g);
    return sub;
  }

  Item best_choice(std::uint64_t mask) {
    Item best_item = -1;
    TreeValue<W> best;
    for (std::size_t i = 0; i < m_; ++i) {
      const auto g = static_cast<Item>(i);
      if (mask >> g & 1) continue;
      TreeValue<W> c = candidate(mask, g);
      if (best_item < 0 || c.better_than(best)) {
        best = c;
        best_item = g;
      }
    }
    return best_item;
  }

  TreeValue<W> value(std::uint64_t mask) {
    const auto t = static_cast<std::size_t>(std::popcount(mask));
    if (t == m_) return {};
    if (m_ <= kFlatLimit) {
      if (known_[mask]) return flat_[mask];
    } else if (auto it = memo_.find(mask); it != memo_.end()) {
      return it->second;
    }
    if (++nodes_ > budget_) throw BudgetExceeded("choice-tree oracle exceeded its node budget");
    TreeValue<W> out;
    if (policy_[t] != kManipulator) {
      out = value(mask | (std::uint64_t{1} << top_remaining(policy_[t], mask)));
    } else {
      bool first = true;
      for (std::size_t i = 0; i < m_; ++i) {
        const auto g = static_cast<Item>(i);
        if (mask >> g & 1) continue;
        TreeValue<W> c = candidate(mask, g);
        if (first || c.better_than(out)) out = c;
        first = false;
      }
    }
    if (m_ <= kFlatLimit) {
      flat_[mask] = out;
      known_[mask] = 1;
    } else {
      memo_.emplace(mask, out);
    }
    return out;
  }

  const Instance& inst_;
  std::span<const Agent> policy_;
  std::span<const W> w_;
  std::uint64_t budget_;
  std::size_t m_;
  std::uint64_t nodes_ = 0;
  std::vector<TreeValue<W>> flat_;
  std::vector<char> known_;
  std::unordered_map<std::uint64_t, TreeValue<W>> memo_;
};

template <typename W>
W greedy_value(const Instance& inst, std::span<const Agent> policy, std::span<const W> w, GreedyWorkspace& ws) {
  W total{};
  run_greedy(inst, policy, ws, [&](Item g, Agent a) {
    if (a == kManipulator) total += w[static_cast<std::size_t>(g)];
  });
  return total;
}

}  // namespace detail

// Exact optimum under `policy` (defaults to the instance's own).
inline Rational choice_tree_value(const Instance& inst, std::span<const Agent> policy,
                                  const OracleBudget& budget = {}) {
  return visit_weights(inst, [&](auto w) {
    using W = typename decltype(w)::value_type;
    detail::ChoiceTree<W> tree(inst, policy, w, budget.max_nodes);
    return inst.weights().to_rational(tree.solve().utility);
  });
}

inline Rational choice_tree_value(const Instance& inst, const OracleBudget& budget = {}) {
  return choice_tree_value(inst, inst.policy().turns, budget);
}

// Among maximizers, returns the bundle that is lexicographically smallest
// when listed in the manipulator's order.
inline Solution choice_tree_best(const Instance& inst, const OracleBudget& budget = {}) {
  return visit_weights(inst, [&](auto w) {
    using W = typename decltype(w)::value_type;
    detail::ChoiceTree<W> tree(inst, inst.policy().turns, w, budget.max_nodes);
    const auto best = tree.solve();
    AllocationSequence picks;
    for (Item g : tree.best_picks()) picks.push_back({g, kManipulator});
    Solution s = make_solution(inst, strategy_from_sequence(inst, picks));
    if (s.utility != inst.weights().to_rational(best.utility))
      throw std::logic_error("choice-tree reconstruction does not reach the optimum");
    return s;
  });
}

struct DominatedGreedySolution {
  Solution solution;
  // A dominated policy whose greedy run attains the optimum: the policy of a
  // corresponding crucial instance.
  Policy policy;
};

inline Rational dominated_greedy_value(const Instance& inst, const OracleBudget& budget = {}) {
  return visit_weights(inst, [&](auto w) {
    using W = typename decltype(w)::value_type;
    detail::GreedyWorkspace ws;
    W best{};
    std::uint64_t visited = 0;
    DominatedPolicies stream(inst.policy());
    while (auto p = stream.next()) {
      if (++visited > budget.max_policies) throw BudgetExceeded("dominated-policy enumeration exceeded its budget");
      const W v = detail::greedy_value<W>(inst, p->turns, w, ws);
      if (visited == 1 || v > best) best = v;
    }
    return inst.weights().to_rational(best);
  });
}

// Ties go to the earliest policy in enumeration order.
inline DominatedGreedySolution dominated_greedy_best(const Instance& inst, const OracleBudget& budget = {}) {
  return visit_weights(inst, [&](auto w) {
    using W = typename decltype(w)::value_type;
    detail::GreedyWorkspace ws;
    W best{};
    Policy best_policy = inst.policy();
    std::uint64_t visited = 0;
    DominatedPolicies stream(inst.policy());
    while (auto p = stream.next()) {
      if (++visited > budget.max_policies) throw BudgetExceeded("dominated-policy enumeration exceeded its budget");
      const W v = detail::greedy_value<W>(inst, p->turns, w, ws);
      if (visited == 1 || v > best) {
        best = v;
        best_policy = *p;
      }
    }
    const GreedyResult g = greedy_alg(inst, best_policy.turns);
    DominatedGreedySolution out{make_solution(inst, g.strategy), best_policy};
    if (out.solution.utility != inst.weights().to_rational(best))
      throw std::logic_error("strategy from a dominated greedy run lost utility on the original policy");
    return out;
  });
}

// Every strictly dominated policy has a strictly worse optimum.
inline bool is_crucial(const Instance& inst, const OracleBudget& budget = {}) {
  const Rational opt = choice_tree_value(inst, budget);
  std::uint64_t visited = 0;
  DominatedPolicies stream(inst.policy());
  while (auto p = stream.next()) {
    if (++visited > budget.max_policies) throw BudgetExceeded("dominated-policy enumeration exceeded its budget");
    if (*p == inst.policy()) continue;
    if (choice_tree_value(inst, p->turns, budget) >= opt) return false;
  }
  return true;
}

}  // namespace seqmanip
