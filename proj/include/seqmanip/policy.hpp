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

// Structure of a policy as seen from the manipulator.
//
// A segment is a maximal run of turns holding at most one non-manipulator,
// which must come last. Cutting after every non-manipulator turn gives m'
// non-trivial segments plus one trailing "trivial" segment made only of
// manipulator turns (possibly empty). The core is the policy with the
// manipulator deleted.
//
// pi dominates pi' when both have the same length and core and every
// manipulator turn of pi' is no earlier than the matching turn of pi.

#pragma once

#include "seqmanip/model.hpp"

#include <cstddef>
#include <iterator>
#include <optional>
#include <vector>

namespace seqmanip {

struct PolicyDecomposition {
  // m' + 1 entries; the last is the trivial segment.
  std::vector<std::vector<Agent>> segments;
  std::vector<Agent> core;
  // 1-based positions of the manipulator.
  std::vector<std::size_t> position_vector;
  // k_prefix[x] = manipulator turns within the first x segments, x = 0..m'.
  std::vector<std::size_t> k_prefix;

  std::size_t non_trivial_count() const { return core.size(); }
  std::size_t trivial_length() const { return segments.back().size(); }

  // pi^s(x): concatenation of the first x segments.
  Policy prefix_segments(std::size_t x) const {
    Policy p;
    for (std::size_t s = 0; s < x && s < segments.size(); ++s)
      p.turns.insert(p.turns.end(), segments[s].begin(), segments[s].end());
    return p;
  }

  Policy concatenate() const { return prefix_segments(segments.size()); }
};

inline PolicyDecomposition decompose(const Policy& policy) {
  PolicyDecomposition d;
  d.k_prefix.push_back(0);
  std::vector<Agent> current;
  std::size_t manip_so_far = 0;
  for (std::size_t t = 0; t < policy.size(); ++t) {
    const Agent a = policy[t];
    current.push_back(a);
    if (a == kManipulator) {
      d.position_vector.push_back(t + 1);
      ++manip_so_far;
    } else {
      d.core.push_back(a);
      d.segments.push_back(std::move(current));
      current.clear();
      d.k_prefix.push_back(manip_so_far);
    }
  }
  d.segments.push_back(std::move(current));
  return d;
}

inline std::vector<Agent> core_of(const Policy& policy) {
  std::vector<Agent> core;
  for (Agent a : policy.turns)
    if (a != kManipulator) core.push_back(a);
  return core;
}

inline std::vector<std::size_t> manipulator_positions(const Policy& policy) {
  std::vector<std::size_t> z;
  for (std::size_t t = 0; t < policy.size(); ++t)
    if (policy[t] == kManipulator) z.push_back(t + 1);
  return z;
}

// Rebuilds a policy of length m from its core and 1-based manipulator positions.
inline Policy policy_from_positions(const std::vector<Agent>& core, const std::vector<std::size_t>& positions,
                                    std::size_t m) {
  Policy p;
  p.turns.reserve(m);
  std::size_t next_core = 0, next_pos = 0;
  for (std::size_t t = 1; t <= m; ++t) {
    if (next_pos < positions.size() && positions[next_pos] == t) {
      p.turns.push_back(kManipulator);
      ++next_pos;
    } else {
      p.turns.push_back(core[next_core++]);
    }
  }
  return p;
}

// Policies with different cores are simply incomparable.
inline bool dominates(const Policy& p1, const Policy& p2) {
  if (p1.size() != p2.size()) return false;
  if (core_of(p1) != core_of(p2)) return false;
  const auto z1 = manipulator_positions(p1);
  const auto z2 = manipulator_positions(p2);
  for (std::size_t i = 0; i < z1.size(); ++i)
    if (z1[i] > z2[i]) return false;
  return true;
}

// Lazily yields every policy dominated by `origin` (itself first), ordered
// lexicographically by manipulator position vector.
class DominatedPolicies {
 public:
  explicit DominatedPolicies(const Policy& origin)
      : core_(core_of(origin)), lower_(manipulator_positions(origin)), current_(lower_), m_(origin.size()) {}

  std::optional<Policy> next() {
    if (done_) return std::nullopt;
    Policy out = policy_from_positions(core_, current_, m_);
    advance();
    return out;
  }

  const std::vector<std::size_t>& lower_bound() const { return lower_; }

  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = Policy;
    using difference_type = std::ptrdiff_t;
    using pointer = const Policy*;
    using reference = const Policy&;

    iterator() = default;
    explicit iterator(DominatedPolicies* owner) : owner_(owner) { ++*this; }

    reference operator*() const { return *value_; }
    pointer operator->() const { return &*value_; }
    iterator& operator++() {
      value_ = owner_->next();
      return *this;
    }
    void operator++(int) { ++*this; }
    friend bool operator==(const iterator& it, std::default_sentinel_t) { return !it.value_.has_value(); }

   private:
    DominatedPolicies* owner_ = nullptr;
    std::optional<Policy> value_;
  };

  iterator begin() { return iterator(this); }
  std::default_sentinel_t end() const { return {}; }

 private:
  void advance() {
    const std::size_t k = current_.size();
    // Rightmost coordinate that can still move right.
    std::size_t i = k;
    while (i > 0 && current_[i - 1] >= m_ - (k - i)) --i;
    if (i == 0) {
      done_ = true;
      return;
    }
    ++current_[i - 1];
    for (std::size_t j = i; j < k; ++j) current_[j] = std::max(lower_[j], current_[j - 1] + 1);
  }

  std::vector<Agent> core_;
  std::vector<std::size_t> lower_;
  std::vector<std::size_t> current_;
  std::size_t m_;
  bool done_ = false;
};

inline DominatedPolicies enumerate_dominated(const Policy& policy) { return DominatedPolicies(policy); }

}  // namespace seqmanip
