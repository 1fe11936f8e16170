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

// Polynomial-time best response for a fixed number of agents.
//
// A state (x, y, i_2..i_n) stands for the greedy partial allocation
// sequences that cover the first x segments of some dominated policy, end
// on a non-manipulator turn, give y items to the manipulator with at most
// k(r) of them inside the first r segments for every r, and leave agent j's
// last item at rank i_j of its ranking (0 = nothing yet). All such
// sequences allocate the same item set, namely the union of each agent's
// ranking prefix up to i_j, so a state only needs its best utility and a
// backpointer.
//
// Stage x extends a stage x-1 state by one segment for core agent r: q
// manipulator turns take the first q remaining items of r's ranking, then r
// takes the next one. After the last stage the manipulator receives every
// item still unallocated (the trivial segment), and the best completion is
// the optimum.
//
// States are stored sparsely (only reachable ones), keyed by a packed
// integer whose numeric order is the lexicographic order of (y, i_2..i_n).
// Each stage is a key-sorted vector: candidates are generated, sorted, and
// reduced with the tie-break, which keeps construction deterministic.

#pragma once

#include "seqmanip/engine.hpp"
#include "seqmanip/oracle.hpp"
#include "seqmanip/policy.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

namespace seqmanip {

struct DpState {
  std::size_t x = 0;
  std::size_t y = 0;
  // last_rank[j - 2] = 1-based rank of agent j's last item, 0 if none.
  std::vector<std::size_t> last_rank;

  friend bool operator==(const DpState&, const DpState&) = default;
  friend auto operator<=>(const DpState&, const DpState&) = default;
};

struct DpBackpointer {
  DpState predecessor;
  std::size_t q = 0;               // manipulator turns in the last segment
  std::size_t predecessor_rank = 0;  // i*_r
};

struct DpEntry {
  Rational utility;
  std::optional<DpBackpointer> back;  // empty for the base state
  std::size_t allocated_count = 0;    // x + y
};

using OptTable = std::map<DpState, DpEntry>;

struct DpOptions {
  // Replays both candidates whenever two transitions reach the same state
  // and checks they are in the invariance relation. Slow; for tests.
  bool check_invariance = false;
};

struct DpSolution {
  Solution solution;
  // The greedy trace the table produced; it follows `dominated_policy`, not
  // necessarily the instance's own policy.
  AllocationSequence dominated_trace;
  Policy dominated_policy;
  DpState final_state;
  std::size_t state_count = 0;
};

// (1+m)^(n-1) * (m'+1) * (k_1+1): the size of the full state box.
inline BigInt dp_state_bound(const Instance& inst) {
  BigInt b = 1;
  for (int j = 2; j <= inst.num_agents(); ++j) b *= inst.num_items() + 1;
  return b * (inst.non_manipulator_turns() + 1) * (inst.manipulator_turns() + 1);
}

namespace detail {

template <typename W>
class OptBuilder {
 public:
  struct Entry {
    W utility{};
    std::uint64_t pred = 0;
    std::uint32_t q = 0;
    std::uint32_t pred_rank = 0;
  };
  using Stage = std::vector<std::pair<std::uint64_t, Entry>>;

  OptBuilder(const Instance& inst, std::span<const W> w, DpOptions options)
      : inst_(inst), w_(w), options_(options), dec_(decompose(inst.policy())) {
    m_ = inst.num_items();
    n_ = static_cast<std::size_t>(inst.num_agents());
    const std::size_t widest = std::max<std::size_t>(m_, inst.manipulator_turns());
    bits_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::bit_width(widest)));
    if (bits_ * n_ > 64) throw std::invalid_argument("dp: too many agents for the packed state encoding");
    field_mask_ = bits_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits_) - 1;
    taken_.assign(m_, 0);
  }

  void build() {
    const std::size_t stages = dec_.core.size();
    table_.assign(stages + 1, {});
    table_[0].emplace_back(0, Entry{});
    for (std::size_t x = 1; x <= stages; ++x) expand(x);
  }

  const std::vector<Stage>& table() const { return table_; }

  std::size_t state_count() const {
    std::size_t c = 0;
    for (const auto& s : table_) c += s.size();
    return c;
  }

  std::size_t y_of(std::uint64_t key) const { return field(key, 0); }
  std::size_t rank_of(std::uint64_t key, Agent j) const { return field(key, static_cast<std::size_t>(j) - 1); }

  DpState state_of(std::size_t x, std::uint64_t key) const {
    DpState s{x, y_of(key), {}};
    for (Agent j = 2; j <= static_cast<Agent>(n_); ++j) s.last_rank.push_back(rank_of(key, j));
    return s;
  }

  // Manipulator's total once the trivial segment takes everything left.
  W completed_utility(std::uint64_t key, const Entry& e) {
    mark_allocated(key);
    W total = e.utility;
    for (std::size_t g = 0; g < m_; ++g)
      if (!taken_[g]) total += w_[g];
    return total;
  }

  // Final-stage state with the best completion; ties to the smallest key.
  std::optional<std::pair<std::uint64_t, W>> best_final() {
    std::optional<std::pair<std::uint64_t, W>> best;
    for (const auto& [key, e] : table_.back()) {
      const W total = completed_utility(key, e);
      if (!best || total > best->second || (total == best->second && key < best->first)) best = {key, total};
    }
    return best;
  }

  // Rebuilds the greedy partial sequence of a stored state from its
  // backpointers.
  AllocationSequence replay(std::size_t x, std::uint64_t key) const {
    std::vector<std::uint32_t> qs(x);
    for (std::size_t s = x; s > 0; --s) {
      const Entry& e = lookup(s, key);
      qs[s - 1] = e.q;
      key = e.pred;
    }
    AllocationSequence seq;
    std::vector<char> taken(m_, 0);
    for (std::size_t s = 0; s < x; ++s) append_segment(seq, taken, dec_.core[s], qs[s]);
    return seq;
  }

  // Replay plus the trivial segment, items in the manipulator's order.
  AllocationSequence replay_complete(std::uint64_t key) const {
    AllocationSequence seq = replay(dec_.core.size(), key);
    std::vector<char> taken(m_, 0);
    for (const auto& st : seq) taken[static_cast<std::size_t>(st.item)] = 1;
    for (Item g : inst_.ranking(kManipulator))
      if (!taken[static_cast<std::size_t>(g)]) seq.push_back({g, kManipulator});
    return seq;
  }

 private:
  std::size_t field(std::uint64_t key, std::size_t idx) const {
    return static_cast<std::size_t>((key >> (bits_ * (n_ - 1 - idx))) & field_mask_);
  }

  std::uint64_t with_field(std::uint64_t key, std::size_t idx, std::size_t value) const {
    const std::size_t shift = bits_ * (n_ - 1 - idx);
    return (key & ~(field_mask_ << shift)) | (static_cast<std::uint64_t>(value) << shift);
  }

  void mark_allocated(std::uint64_t key) {
    std::fill(taken_.begin(), taken_.end(), 0);
    for (Agent j = 2; j <= static_cast<Agent>(n_); ++j) {
      const Ranking& r = inst_.ranking(j);
      const std::size_t upto = rank_of(key, j);
      for (std::size_t p = 0; p < upto; ++p) taken_[static_cast<std::size_t>(r[p])] = 1;
    }
  }

  void append_segment(AllocationSequence& seq, std::vector<char>& taken, Agent r, std::size_t q) const {
    std::size_t given = 0;
    for (Item g : inst_.ranking(r)) {
      if (taken[static_cast<std::size_t>(g)]) continue;
      taken[static_cast<std::size_t>(g)] = 1;
      if (given++ < q) {
        seq.push_back({g, kManipulator});
      } else {
        seq.push_back({g, r});
        return;
      }
    }
    throw std::logic_error("dp replay ran out of items");
  }

  const Entry& lookup(std::size_t x, std::uint64_t key) const {
    const Stage& st = table_[x];
    auto it = std::lower_bound(st.begin(), st.end(), key, [](const auto& e, std::uint64_t k) { return e.first < k; });
    if (it == st.end() || it->first != key) throw std::logic_error("dp: dangling backpointer");
    return it->second;
  }

  static bool prefer_candidate(const Entry& cand, const Entry& cur) {
    if (cand.utility != cur.utility) return cand.utility > cur.utility;
    if (cand.q != cur.q) return cand.q < cur.q;
    if (cand.pred_rank != cur.pred_rank) return cand.pred_rank < cur.pred_rank;
    return cand.pred < cur.pred;
  }

  void expand(std::size_t x) {
    const Agent r = dec_.core[x - 1];
    const std::size_t k_x = dec_.k_prefix[x];
    const Ranking& ranking_r = inst_.ranking(r);
    Stage cand_list;
    for (const auto& [key, entry] : table_[x - 1]) {
      const std::size_t y_prev = y_of(key);
      const std::size_t rank_prev = rank_of(key, r);
      mark_allocated(key);
      W gained{};
      std::size_t q = 0;
      // Everything ranked at or above r's last item is already allocated.
      for (std::size_t pos = rank_prev; pos < m_; ++pos) {
        const Item g = ranking_r[pos];
        if (taken_[static_cast<std::size_t>(g)]) continue;
        if (y_prev + q > k_x) break;
        Entry cand{entry.utility + gained, key, static_cast<std::uint32_t>(q),
                   static_cast<std::uint32_t>(rank_prev)};
        const std::uint64_t new_key = with_field(with_field(key, 0, y_prev + q), static_cast<std::size_t>(r) - 1, pos + 1);
        cand_list.emplace_back(new_key, cand);
        gained += w_[static_cast<std::size_t>(g)];
        ++q;
      }
    }
    std::sort(cand_list.begin(), cand_list.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      return prefer_candidate(a.second, b.second);
    });
    Stage& next = table_[x];
    next.reserve(cand_list.size());
    for (std::size_t i = 0; i < cand_list.size(); ++i) {
      if (!next.empty() && next.back().first == cand_list[i].first) {
        if (options_.check_invariance) check_invariance(x, next.back().second, cand_list[i].second, cand_list[i].first);
        continue;
      }
      next.push_back(cand_list[i]);
    }
  }

  AllocationSequence replay_candidate(std::size_t x, const Entry& e) const {
    AllocationSequence seq = replay(x - 1, e.pred);
    std::vector<char> taken(m_, 0);
    for (const auto& st : seq) taken[static_cast<std::size_t>(st.item)] = 1;
    append_segment(seq, taken, dec_.core[x - 1], e.q);
    return seq;
  }

  void check_invariance(std::size_t x, const Entry& a, const Entry& b, std::uint64_t key) {
    const auto sa = replay_candidate(x, a);
    const auto sb = replay_candidate(x, b);
    if (!invariance_related(sa, sb))
      throw std::logic_error("dp: two sequences reaching state " + std::to_string(key) + " at stage " +
                             std::to_string(x) + " are not in the invariance relation");
  }

  const Instance& inst_;
  std::span<const W> w_;
  DpOptions options_;
  PolicyDecomposition dec_;
  std::size_t m_ = 0;
  std::size_t n_ = 0;
  std::size_t bits_ = 1;
  std::uint64_t field_mask_ = 1;
  std::vector<char> taken_;
  std::vector<Stage> table_;
};

}  // namespace detail

// The opt(x, y, i_2..i_n) table; unreachable states are absent.
inline OptTable build_opt_table(const Instance& inst, const DpOptions& options = {}) {
  return visit_weights(inst, [&](auto w) {
    using W = typename decltype(w)::value_type;
    detail::OptBuilder<W> builder(inst, w, options);
    builder.build();
    OptTable out;
    const auto& table = builder.table();
    for (std::size_t x = 0; x < table.size(); ++x) {
      for (const auto& [key, e] : table[x]) {
        DpEntry entry{inst.weights().to_rational(e.utility), std::nullopt, x + builder.y_of(key)};
        if (x > 0) entry.back = DpBackpointer{builder.state_of(x - 1, e.pred), e.q, e.pred_rank};
        out.emplace(builder.state_of(x, key), std::move(entry));
      }
    }
    return out;
  });
}

// Partial allocation sequence represented by a table state.
inline AllocationSequence replay_state(const Instance& inst, const OptTable& table, const DpState& state) {
  const auto core = core_of(inst.policy());
  std::vector<const DpEntry*> chain;
  DpState cur = state;
  while (true) {
    auto it = table.find(cur);
    if (it == table.end()) throw std::invalid_argument("replay_state: state not in table");
    if (!it->second.back) break;
    chain.push_back(&it->second);
    cur = it->second.back->predecessor;
  }
  AllocationSequence seq;
  std::vector<char> taken(inst.num_items(), 0);
  for (std::size_t s = 0; s < chain.size(); ++s) {
    const DpEntry& e = *chain[chain.size() - 1 - s];
    const Agent r = core[s];
    std::size_t given = 0;
    for (Item g : inst.ranking(r)) {
      if (taken[static_cast<std::size_t>(g)]) continue;
      taken[static_cast<std::size_t>(g)] = 1;
      if (given++ < e.back->q) {
        seq.push_back({g, kManipulator});
      } else {
        seq.push_back({g, r});
        break;
      }
    }
  }
  return seq;
}

inline Rational dp_value(const Instance& inst) {
  return visit_weights(inst, [&](auto w) {
    using W = typename decltype(w)::value_type;
    detail::OptBuilder<W> builder(inst, w, {});
    builder.build();
    auto best = builder.best_final();
    if (!best) throw std::logic_error("dp: no complete state");
    return inst.weights().to_rational(best->second);
  });
}

inline DpSolution dp_best_response(const Instance& inst, const DpOptions& options = {}) {
  return visit_weights(inst, [&](auto w) {
    using W = typename decltype(w)::value_type;
    detail::OptBuilder<W> builder(inst, w, options);
    builder.build();
    auto best = builder.best_final();
    if (!best) throw std::logic_error("dp: no complete state");
    DpSolution out;
    out.state_count = builder.state_count();
    out.final_state = builder.state_of(builder.table().size() - 1, best->first);
    out.dominated_trace = builder.replay_complete(best->first);
    out.dominated_policy = agents_of(out.dominated_trace);
    out.solution = make_solution(inst, strategy_from_sequence(inst, out.dominated_trace));
    if (out.solution.utility != inst.weights().to_rational(best->second))
      throw std::logic_error("dp: reconstructed strategy does not reach the table optimum");
    return out;
  });
}

inline nlohmann::json opt_table_to_json(const OptTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [state, entry] : table) {
    nlohmann::json row;
    row["x"] = state.x;
    row["y"] = state.y;
    row["last_rank"] = state.last_rank;
    row["utility"] = to_string(entry.utility);
    row["allocated"] = entry.allocated_count;
    if (entry.back) {
      row["back"] = {{"x", entry.back->predecessor.x},
                     {"y", entry.back->predecessor.y},
                     {"last_rank", entry.back->predecessor.last_rank},
                     {"q", entry.back->q},
                     {"predecessor_rank", entry.back->predecessor_rank}};
    } else {
      row["back"] = nullptr;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace seqmanip
