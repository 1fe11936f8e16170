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

#include "seqmanip/rational.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace seqmanip {

// Items are addressed by their index into Instance::item_names().
using Item = std::int32_t;
// Agents are numbered 1..n. Agent 1 is always the manipulator.
using Agent = std::int32_t;

inline constexpr Agent kManipulator = 1;

// A complete strict ranking, most preferred first.
using Ranking = std::vector<Item>;

struct Policy {
  std::vector<Agent> turns;

  std::size_t size() const { return turns.size(); }
  bool empty() const { return turns.empty(); }
  Agent operator[](std::size_t i) const { return turns[i]; }

  friend bool operator==(const Policy&, const Policy&) = default;
  friend auto operator<=>(const Policy&, const Policy&) = default;
};

inline std::string to_string(const Policy& p) {
  const bool wide = std::any_of(p.turns.begin(), p.turns.end(), [](Agent a) { return a > 9; });
  std::string out;
  for (Agent a : p.turns) {
    if (wide && !out.empty()) out.push_back(',');
    out += std::to_string(a);
  }
  return out;
}

// Short form used in tests and the CLI: "13221". Multi-digit agents need commas.
inline Policy parse_policy(std::string_view text) {
  Policy p;
  if (text.find(',') != std::string_view::npos) {
    std::size_t start = 0;
    while (start <= text.size()) {
      auto end = text.find(',', start);
      if (end == std::string_view::npos) end = text.size();
      p.turns.push_back(std::stoi(std::string(text.substr(start, end - start))));
      start = end + 1;
    }
    return p;
  }
  for (char c : text) {
    if (c < '0' || c > '9') throw std::invalid_argument("bad policy character");
    p.turns.push_back(c - '0');
  }
  return p;
}

// Validation failure; `path()` names the offending field, e.g. "rankings.2".
class InstanceError : public std::runtime_error {
 public:
  InstanceError(std::string path, const std::string& message)
      : std::runtime_error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Manipulator utilities scaled by the lcm of their denominators, so solvers
// can add and compare integers. The int64 copy exists only when the total
// fits with headroom.
class ScaledWeights {
 public:
  ScaledWeights() = default;

  explicit ScaledWeights(std::span<const Rational> utility) {
    if (all_small_integers(utility)) {
      small_.reserve(utility.size());
      for (const auto& u : utility)
        small_.push_back(static_cast<std::int64_t>(boost::multiprecision::numerator(u)));
      return;
    }
    fits_ = false;
    for (const auto& u : utility)
      denominator_ = boost::multiprecision::lcm(denominator_, boost::multiprecision::denominator(u));
    big_.reserve(utility.size());
    BigInt total = 0;
    for (const auto& u : utility) {
      big_.push_back(boost::multiprecision::numerator(u) *
                     (denominator_ / boost::multiprecision::denominator(u)));
      total += big_.back();
    }
    if (total < kHeadroom) {
      small_.reserve(big_.size());
      for (const auto& w : big_) small_.push_back(static_cast<std::int64_t>(w));
      fits_ = true;
    }
  }

  bool fits_int64() const { return fits_; }
  std::span<const std::int64_t> small() const { return small_; }
  // Empty on the all-small-integer fast path; use small() there.
  std::span<const BigInt> big() const { return big_; }
  const BigInt& denominator() const { return denominator_; }

  Rational to_rational(std::int64_t w) const { return Rational(BigInt(w), denominator_); }
  Rational to_rational(const BigInt& w) const { return Rational(w, denominator_); }

 private:
  static constexpr std::int64_t kHeadroom = std::numeric_limits<std::int64_t>::max() / 4;

  static bool all_small_integers(std::span<const Rational> utility) {
    std::int64_t total = 0;
    for (const auto& u : utility) {
      if (boost::multiprecision::denominator(u) != 1) return false;
      const BigInt& num = boost::multiprecision::numerator(u);
      if (num < 0 || num >= kHeadroom) return false;
      total += static_cast<std::int64_t>(num);
      if (total >= kHeadroom) return false;
    }
    return true;
  }

  BigInt denominator_ = 1;
  std::vector<BigInt> big_;
  std::vector<std::int64_t> small_;
  bool fits_ = true;
};

// I = (O, N, pi, rankings) plus the manipulator's additive utility.
// Immutable once created; every constructor path validates.
class Instance {
 public:
  // The empty instance: no items, a lone manipulator.
  Instance() : rankings_(1) {}

  static Instance create(std::vector<std::string> item_names, int n_agents, Policy policy,
                         std::vector<Ranking> rankings, std::vector<Rational> utility) {
    Instance inst;
    inst.names_ = std::move(item_names);
    inst.n_agents_ = n_agents;
    inst.policy_ = std::move(policy);
    inst.rankings_ = std::move(rankings);
    inst.utility_ = std::move(utility);
    inst.validate_and_index();
    return inst;
  }

  std::size_t num_items() const { return names_.size(); }
  int num_agents() const { return n_agents_; }
  const Policy& policy() const { return policy_; }
  const std::vector<std::string>& item_names() const { return names_; }
  const std::string& name(Item g) const { return names_[static_cast<std::size_t>(g)]; }

  std::optional<Item> find_item(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const Ranking& ranking(Agent a) const { return rankings_[static_cast<std::size_t>(a - 1)]; }
  const std::vector<Ranking>& rankings() const { return rankings_; }

  // 0-based position of `g` in agent `a`'s ranking.
  std::size_t rank(Agent a, Item g) const {
    return rank_[static_cast<std::size_t>(a - 1) * num_items() + static_cast<std::size_t>(g)];
  }

  bool prefers(Agent a, Item lhs, Item rhs) const { return rank(a, lhs) < rank(a, rhs); }

  const Rational& utility(Item g) const { return utility_[static_cast<std::size_t>(g)]; }
  const std::vector<Rational>& utilities() const { return utility_; }
  const ScaledWeights& weights() const { return weights_; }

  // k_1
  std::size_t manipulator_turns() const {
    return static_cast<std::size_t>(std::count(policy_.turns.begin(), policy_.turns.end(), kManipulator));
  }
  // m' = m - k_1
  std::size_t non_manipulator_turns() const { return num_items() - manipulator_turns(); }

  Instance with_policy(Policy p) const {
    return create(names_, n_agents_, std::move(p), rankings_, utility_);
  }

  // Replaces the manipulator's ranking and utility together.
  Instance with_manipulator(Ranking r1, std::vector<Rational> utility) const {
    auto rankings = rankings_;
    rankings.front() = std::move(r1);
    return create(names_, n_agents_, policy_, std::move(rankings), std::move(utility));
  }

  friend bool operator==(const Instance& a, const Instance& b) {
    return a.names_ == b.names_ && a.n_agents_ == b.n_agents_ && a.policy_ == b.policy_ &&
           a.rankings_ == b.rankings_ && a.utility_ == b.utility_;
  }

 private:
  void validate_and_index() {
    const std::size_t m = names_.size();
    index_.clear();
    for (std::size_t i = 0; i < m; ++i) {
      const std::string path = "items[" + std::to_string(i) + "]";
      if (names_[i].empty()) throw InstanceError(path, "empty item identifier");
      if (!index_.emplace(names_[i], static_cast<Item>(i)).second)
        throw InstanceError(path, "duplicate item '" + names_[i] + "'");
    }
    if (n_agents_ < 1) throw InstanceError("agents", "need at least one agent");
    if (policy_.size() != m)
      throw InstanceError("policy", "policy length " + std::to_string(policy_.size()) +
                                        " differs from item count " + std::to_string(m));
    for (std::size_t t = 0; t < m; ++t) {
      if (policy_[t] < 1 || policy_[t] > n_agents_)
        throw InstanceError("policy[" + std::to_string(t) + "]",
                            "agent index " + std::to_string(policy_[t]) + " out of range 1.." +
                                std::to_string(n_agents_));
    }
    if (rankings_.size() != static_cast<std::size_t>(n_agents_))
      throw InstanceError("rankings", "expected " + std::to_string(n_agents_) + " rankings, got " +
                                          std::to_string(rankings_.size()));
    rank_.assign(static_cast<std::size_t>(n_agents_) * m, m);
    for (std::size_t a = 0; a < rankings_.size(); ++a) {
      const std::string path = "rankings." + std::to_string(a + 1);
      const Ranking& r = rankings_[a];
      if (r.size() != m) throw InstanceError(path, "ranking is not a permutation of the items");
      for (std::size_t pos = 0; pos < m; ++pos) {
        const Item g = r[pos];
        if (g < 0 || static_cast<std::size_t>(g) >= m || rank_[a * m + static_cast<std::size_t>(g)] != m)
          throw InstanceError(path, "ranking is not a permutation of the items");
        rank_[a * m + static_cast<std::size_t>(g)] = pos;
      }
    }
    if (utility_.size() != m)
      throw InstanceError("utilities", "expected a utility for each of the " + std::to_string(m) + " items");
    // Scaled weights share one denominator, so sign and order checks can
    // run on them instead of on rationals.
    weights_ = ScaledWeights(utility_);
    if (weights_.fits_int64()) {
      check_utilities(weights_.small());
    } else {
      check_utilities(weights_.big());
    }
  }

  template <typename W>
  void check_utilities(std::span<const W> w) const {
    for (std::size_t g = 0; g < w.size(); ++g)
      if (w[g] <= 0) throw InstanceError("utilities." + names_[g], "utility must be strictly positive");
    const Ranking& r1 = rankings_.front();
    for (std::size_t pos = 1; pos < r1.size(); ++pos) {
      const auto hi = static_cast<std::size_t>(r1[pos - 1]);
      const auto lo = static_cast<std::size_t>(r1[pos]);
      if (!(w[hi] > w[lo]))
        throw InstanceError("utilities." + names_[lo],
                            "utility inconsistent with ranking: '" + names_[hi] + "' is ranked above '" +
                                names_[lo] + "' but its utility is not larger");
    }
  }

  std::vector<std::string> names_;
  int n_agents_ = 1;
  Policy policy_;
  std::vector<Ranking> rankings_;
  std::vector<Rational> utility_;
  std::unordered_map<std::string, Item> index_;
  std::vector<std::size_t> rank_;
  ScaledWeights weights_;
};

// Calls f with the instance's scaled weights as a span of int64 when they
// fit, otherwise as a span of BigInt.
template <typename F>
decltype(auto) visit_weights(const Instance& inst, F&& f) {
  if (inst.weights().fits_int64()) return std::forward<F>(f)(inst.weights().small());
  return std::forward<F>(f)(inst.weights().big());
}

}  // namespace seqmanip
