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

// Cross-validation sweeps: DP against both oracles, truthful half-optimality
// and greedy optimality on crucial instances, over exhaustive or random
// instance pools.
//
// Exhaustive pools contain one representative per class of instances that
// behave identically for every picking strategy:
//   * items are relabelled so the manipulator ranks them g1 > g2 > ... (its
//     utilities are m, m-1, ..., 1);
//   * non-manipulator labels first appear in increasing order in the policy;
//   * an agent whose last turn is at position p can only ever pick among its
//     top p items, so only the ordered top-p prefix of its ranking is
//     enumerated (a full permutation once p >= m - 1), and the tail is filled
//     in increasing item order.

#pragma once

#include "seqmanip/dp.hpp"
#include "seqmanip/generators.hpp"
#include "seqmanip/greedy.hpp"
#include "seqmanip/oracle.hpp"
#include "seqmanip/policy.hpp"
#include "seqmanip/responses.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace seqmanip {

struct VerifyOptions {
  OracleBudget budget{};
  // Run the crucial-instance certifier on every instance. Otherwise it only
  // runs where greedy misses the optimum, which decides the same property.
  bool certify_all_crucial = false;
};

struct SweepStats {
  std::uint64_t instances = 0;
  std::uint64_t oracle_mismatches = 0;   // dp, choice tree, dominated greedy disagree
  std::uint64_t half_violations = 0;     // 2 * truthful < optimal
  std::uint64_t crucial_certified = 0;   // counted only with certify_all_crucial
  std::uint64_t greedy_suboptimal = 0;   // greedy < optimal
  std::uint64_t crucial_violations = 0;  // crucial but greedy < optimal
  std::optional<std::string> first_failure;

  bool ok() const { return oracle_mismatches == 0 && half_violations == 0 && crucial_violations == 0; }

  void merge(const SweepStats& o) {
    instances += o.instances;
    oracle_mismatches += o.oracle_mismatches;
    half_violations += o.half_violations;
    crucial_certified += o.crucial_certified;
    greedy_suboptimal += o.greedy_suboptimal;
    crucial_violations += o.crucial_violations;
    if (!first_failure && o.first_failure) first_failure = o.first_failure;
  }
};

namespace detail {

inline std::string describe(const Instance& inst) {
  std::ostringstream out;
  out << "policy " << to_string(inst.policy());
  for (Agent a = 2; a <= inst.num_agents(); ++a) {
    out << " | r" << a << " ";
    for (Item g : inst.ranking(a)) out << inst.name(g) << ' ';
  }
  return out.str();
}

template <typename W>
W truthful_scaled(const Instance& inst, std::span<const W> w) {
  W total{};
  for (const auto& st : execute(inst, truthful_strategy(inst)))
    if (st.agent == kManipulator) total += w[static_cast<std::size_t>(st.item)];
  return total;
}

template <typename W>
bool crucial_scaled(const Instance& inst, std::span<const W> w, const W& opt, const OracleBudget& budget) {
  DominatedPolicies stream(inst.policy());
  while (auto p = stream.next()) {
    if (*p == inst.policy()) continue;
    ChoiceTree<W> tree(inst, p->turns, w, budget.max_nodes);
    if (!(tree.solve().utility < opt)) return false;
  }
  return true;
}

template <typename W>
void verify_scaled(const Instance& inst, std::span<const W> w, const VerifyOptions& options, SweepStats& stats) {
  ++stats.instances;
  auto fail = [&](const std::string& what) {
    if (!stats.first_failure) stats.first_failure = what + " on " + describe(inst);
  };

  OptBuilder<W> dp(inst, w, {});
  dp.build();
  const W dp_opt = dp.best_final()->second;

  ChoiceTree<W> tree(inst, inst.policy().turns, w, options.budget.max_nodes);
  const W tree_opt = tree.solve().utility;

  GreedyWorkspace ws;
  W dg_opt{};
  std::uint64_t visited = 0;
  DominatedPolicies stream(inst.policy());
  while (auto p = stream.next()) {
    if (++visited > options.budget.max_policies) throw BudgetExceeded("dominated-policy enumeration exceeded its budget");
    const W v = greedy_value<W>(inst, p->turns, w, ws);
    if (visited == 1 || v > dg_opt) dg_opt = v;
  }

  if (!(dp_opt == tree_opt && tree_opt == dg_opt)) {
    ++stats.oracle_mismatches;
    fail("dp/oracle mismatch");
  }

  const W truthful = truthful_scaled<W>(inst, w);
  if (truthful + truthful < tree_opt) {
    ++stats.half_violations;
    fail("truthful below half of the optimum");
  }

  const W greedy = greedy_value<W>(inst, inst.policy().turns, w, ws);
  const bool greedy_optimal = greedy == tree_opt;
  if (!greedy_optimal) ++stats.greedy_suboptimal;
  if (options.certify_all_crucial || !greedy_optimal) {
    const bool crucial = crucial_scaled<W>(inst, w, tree_opt, options.budget);
    if (crucial) ++stats.crucial_certified;
    if (crucial && !greedy_optimal) {
      ++stats.crucial_violations;
      fail("greedy suboptimal on a crucial instance");
    }
  }
}

// All rankings of m items whose first p entries are an ordered selection
// and whose tail is ascending; p >= m - 1 gives every permutation.
inline std::vector<Ranking> truncated_rankings(std::size_t m, std::size_t p) {
  if (p + 1 >= m) p = m;
  std::vector<Ranking> out;
  Ranking prefix;
  std::vector<char> used(m, 0);
  std::function<void()> rec = [&]() {
    if (prefix.size() == p) {
      Ranking r = prefix;
      for (std::size_t g = 0; g < m; ++g)
        if (!used[g]) r.push_back(static_cast<Item>(g));
      out.push_back(std::move(r));
      return;
    }
    for (std::size_t g = 0; g < m; ++g) {
      if (used[g]) continue;
      used[g] = 1;
      prefix.push_back(static_cast<Item>(g));
      rec();
      prefix.pop_back();
      used[g] = 0;
    }
  };
  rec();
  return out;
}

}  // namespace detail

// Policies over agents 1..n of length m whose non-manipulator labels appear
// for the first time in increasing order.
inline std::vector<Policy> canonical_policies(int n, std::size_t m) {
  std::vector<Policy> out;
  Policy cur;
  std::function<void(Agent)> rec = [&](Agent max_label) {
    if (cur.size() == m) {
      out.push_back(cur);
      return;
    }
    const Agent limit = std::min<Agent>(n, std::max<Agent>(max_label, 1) + 1);
    for (Agent a = 1; a <= limit; ++a) {
      cur.turns.push_back(a);
      rec(std::max(max_label, a));
      cur.turns.pop_back();
    }
  };
  rec(1);
  return out;
}

// Calls f(instance) for every canonical instance built on `policy`.
template <typename F>
void for_each_instance_with_policy(int n, const Policy& policy, F&& f) {
  const std::size_t m = policy.size();
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= m; ++i) names.push_back("g" + std::to_string(i));
  Ranking identity(m);
  for (std::size_t i = 0; i < m; ++i) identity[i] = static_cast<Item>(i);
  const auto utility = descending_integer_utilities(identity);

  std::vector<std::vector<Ranking>> choices;
  for (Agent j = 2; j <= n; ++j) {
    std::size_t last = 0;
    for (std::size_t t = 0; t < m; ++t)
      if (policy[t] == j) last = t + 1;
    choices.push_back(detail::truncated_rankings(m, last));
  }
  std::vector<std::size_t> odo(choices.size(), 0);
  while (true) {
    std::vector<Ranking> rankings{identity};
    for (std::size_t j = 0; j < choices.size(); ++j) rankings.push_back(choices[j][odo[j]]);
    f(Instance::create(names, n, policy, std::move(rankings), utility));
    std::size_t j = 0;
    while (j < odo.size() && ++odo[j] == choices[j].size()) odo[j++] = 0;
    if (j == odo.size()) break;
  }
}

inline std::uint64_t count_canonical_instances(int n, std::size_t m) {
  std::uint64_t total = 0;
  for (const Policy& p : canonical_policies(n, m)) {
    std::uint64_t c = 1;
    for (Agent j = 2; j <= n; ++j) {
      std::size_t last = 0;
      for (std::size_t t = 0; t < m; ++t)
        if (p[t] == j) last = t + 1;
      if (last + 1 >= m) last = m;
      for (std::size_t i = 0; i < last; ++i) c *= m - i;
    }
    total += c;
  }
  return total;
}

inline SweepStats verify_instance(const Instance& inst, const VerifyOptions& options = {}) {
  SweepStats stats;
  visit_weights(inst, [&](auto w) {
    using W = typename decltype(w)::value_type;
    detail::verify_scaled<W>(inst, w, options, stats);
  });
  return stats;
}

// Runs work(i) for i in [0, count) on up to `jobs` threads; results are
// merged in index order so output does not depend on scheduling.
template <typename Result, typename Work>
std::vector<Result> parallel_map(std::size_t count, unsigned jobs, Work&& work) {
  std::vector<Result> results(count);
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        results[i] = work(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return results;
}

// Every canonical instance with n agents and exactly m items.
inline SweepStats exhaustive_sweep(int n, std::size_t m, const VerifyOptions& options = {}, unsigned jobs = 1) {
  const auto policies = canonical_policies(n, m);
  auto parts = parallel_map<SweepStats>(policies.size(), jobs, [&](std::size_t i) {
    SweepStats s;
    for_each_instance_with_policy(n, policies[i], [&](const Instance& inst) { s.merge(verify_instance(inst, options)); });
    return s;
  });
  SweepStats total;
  for (const auto& p : parts) total.merge(p);
  return total;
}

struct RandomSweepSpec {
  std::vector<int> agents{3, 4};  // cycled through by instance index
  std::size_t min_items = 1;
  std::size_t max_items = 9;
  std::size_t count = 1000;
  std::uint64_t seed = 1;
};

// Seed of the i-th random instance, so any failure can be replayed alone.
inline std::uint64_t random_instance_seed(std::uint64_t seed, std::size_t i) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (i + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Odd-indexed instances get random utilities, even ones m, m-1, ..., 1.
inline Instance random_sweep_instance(const RandomSweepSpec& spec, std::size_t i) {
  const std::uint64_t s = random_instance_seed(spec.seed, i);
  std::mt19937_64 rng(s);
  const int n = spec.agents[i % spec.agents.size()];
  const std::size_t m = spec.min_items + detail::draw_below(rng, spec.max_items - spec.min_items + 1);
  Instance inst = generate_random_instance(n, m, s);
  return i % 2 == 1 ? with_random_utilities(inst, s) : inst;
}

// Random pool; besides the scaled checks, compares the full solutions of
// the DP and both oracles through the public interface.
inline SweepStats random_sweep(const RandomSweepSpec& spec, const VerifyOptions& options = {}, unsigned jobs = 1) {
  auto parts = parallel_map<SweepStats>(spec.count, jobs, [&](std::size_t i) {
    const Instance inst = random_sweep_instance(spec, i);
    SweepStats s = verify_instance(inst, options);
    const Rational dp = dp_best_response(inst).solution.utility;
    const Rational tree = choice_tree_best(inst, options.budget).utility;
    const Rational dg = dominated_greedy_best(inst, options.budget).solution.utility;
    if (!(dp == tree && tree == dg)) {
      ++s.oracle_mismatches;
      if (!s.first_failure)
        s.first_failure = "solution mismatch on random instance seed " + std::to_string(random_instance_seed(spec.seed, i));
    }
    return s;
  });
  SweepStats total;
  for (const auto& p : parts) total.merge(p);
  return total;
}

}  // namespace seqmanip
