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

#include "seqmanip/model.hpp"

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace seqmanip {

namespace detail {

// Unbiased draw in [0, bound) from a 64-bit engine; the libstdc++
// distributions are not pinned across versions, this is.
inline std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % bound;
}

inline Ranking random_permutation(std::mt19937_64& rng, std::size_t m) {
  Ranking r(m);
  for (std::size_t i = 0; i < m; ++i) r[i] = static_cast<Item>(i);
  for (std::size_t i = m; i > 1; --i) std::swap(r[i - 1], r[draw_below(rng, i)]);
  return r;
}

inline std::vector<std::string> numbered_items(std::size_t m) {
  std::vector<std::string> names;
  names.reserve(m);
  for (std::size_t i = 1; i <= m; ++i) names.push_back("g" + std::to_string(i));
  return names;
}

}  // namespace detail

// Utilities m, m-1, ..., 1 along `r1`.
inline std::vector<Rational> descending_integer_utilities(const Ranking& r1) {
  std::vector<Rational> u(r1.size());
  for (std::size_t pos = 0; pos < r1.size(); ++pos) u[static_cast<std::size_t>(r1[pos])] = Rational(r1.size() - pos);
  return u;
}

// Items g1..gm; every ranking and the policy are uniform and depend only on
// (n, m, seed).
inline Instance generate_random_instance(int n, std::size_t m, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("generate_random_instance: need n >= 1");
  std::mt19937_64 rng(seed);
  std::vector<Ranking> rankings;
  for (int a = 0; a < n; ++a) rankings.push_back(detail::random_permutation(rng, m));
  Policy policy;
  for (std::size_t t = 0; t < m; ++t)
    policy.turns.push_back(static_cast<Agent>(1 + detail::draw_below(rng, static_cast<std::uint64_t>(n))));
  auto utility = descending_integer_utilities(rankings.front());
  return Instance::create(detail::numbered_items(m), n, std::move(policy), std::move(rankings), std::move(utility));
}

// Same instance with strictly decreasing random integer utilities in
// [1, 1000*m], for sweeps that should not depend on the m..1 family.
inline Instance with_random_utilities(const Instance& inst, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const std::size_t m = inst.num_items();
  std::vector<std::uint64_t> values;
  while (values.size() < m) {
    const std::uint64_t v = 1 + detail::draw_below(rng, 1000 * m);
    if (std::find(values.begin(), values.end(), v) == values.end()) values.push_back(v);
  }
  std::sort(values.rbegin(), values.rend());
  std::vector<Rational> u(m);
  const Ranking& r1 = inst.ranking(kManipulator);
  for (std::size_t pos = 0; pos < m; ++pos) u[static_cast<std::size_t>(r1[pos])] = Rational(values[pos]);
  return inst.with_manipulator(r1, std::move(u));
}

// The truthful-response lower-bound family: 3 items, 2 agents, policy 121,
// u = (1, 1 - 1/K, 1/K). K >= 3 keeps u(g2) > u(g3).
inline Instance generate_tightness_instance(std::int64_t K) {
  if (K < 3)
    throw InstanceError("K", "tightness instance needs K >= 3 (K = " + std::to_string(K) +
                                 " breaks strict decrease of utilities)");
  const Rational eps(1, K);
  return Instance::create({"g1", "g2", "g3"}, 2, Policy{{1, 2, 1}}, {Ranking{0, 1, 2}, Ranking{1, 2, 0}},
                          {Rational(1), Rational(1) - eps, eps});
}

}  // namespace seqmanip
