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

#include "seqmanip/dp.hpp"
#include "seqmanip/engine.hpp"
#include "seqmanip/oracle.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace seqmanip {

inline Solution truthful_response(const Instance& inst) { return make_solution(inst, truthful_strategy(inst)); }

struct ApproximationReport {
  Rational truthful;
  Rational optimal;
  Rational ratio;  // truthful / optimal, always within [1/2, 1]
};

inline ApproximationReport approximation_report(const Instance& inst) {
  if (inst.manipulator_turns() == 0)
    throw std::invalid_argument("approximation ratio is undefined when the manipulator has no turns");
  ApproximationReport r;
  r.truthful = truthful_response(inst).utility;
  r.optimal = dp_value(inst);
  r.ratio = r.truthful / r.optimal;
  return r;
}

inline bool better_than_truth(const Instance& inst) { return dp_value(inst) > truthful_response(inst).utility; }

// Reweights the manipulator so that every target item outweighs all
// non-target items together. Targets get m*W, m*W - 1, ... and the others
// m, m - 1, ..., each group in the original manipulator order, W = m + 1;
// the manipulator's ranking is rebuilt to match.
inline Instance target_weighted_instance(const Instance& inst, const std::vector<Item>& target) {
  const std::size_t m = inst.num_items();
  std::vector<char> in_target(m, 0);
  for (Item g : target) {
    if (g < 0 || static_cast<std::size_t>(g) >= m) throw std::invalid_argument("target item out of range");
    if (in_target[static_cast<std::size_t>(g)]) throw std::invalid_argument("duplicate target item");
    in_target[static_cast<std::size_t>(g)] = 1;
  }
  const BigInt big = BigInt(m) * BigInt(m + 1);
  Ranking r1;
  std::vector<Rational> u(m);
  BigInt next_big = big, next_small = m;
  for (Item g : inst.ranking(kManipulator)) {
    if (!in_target[static_cast<std::size_t>(g)]) continue;
    r1.push_back(g);
    u[static_cast<std::size_t>(g)] = Rational(next_big--);
  }
  for (Item g : inst.ranking(kManipulator)) {
    if (in_target[static_cast<std::size_t>(g)]) continue;
    r1.push_back(g);
    u[static_cast<std::size_t>(g)] = Rational(next_small--);
  }
  return inst.with_manipulator(std::move(r1), std::move(u));
}

// Can the manipulator end up with exactly `target`?
inline bool allocation_response(const Instance& inst, const std::vector<Item>& target) {
  if (target.size() != inst.manipulator_turns())
    throw std::invalid_argument("target bundle must contain exactly k1 = " +
                                std::to_string(inst.manipulator_turns()) + " items");
  const Instance weighted = target_weighted_instance(inst, target);
  const DpSolution best = dp_best_response(weighted);
  auto got = best.solution.bundle.items;
  auto want = target;
  std::sort(got.begin(), got.end());
  std::sort(want.begin(), want.end());
  return got == want;
}

}  // namespace seqmanip
