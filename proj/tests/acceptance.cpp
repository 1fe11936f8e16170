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

// Acceptance gate. Prints one PASS/FAIL line per criterion (details on the
// following indented lines) and exits non-zero if any criterion fails.
//
//   acceptance [--jobs N] [--quick]
//
// --quick shrinks the exhaustive pool to m <= 5 for local iteration; the
// gate itself always runs the full pool.

#include "properties.hpp"
#include "seqmanip/cli.hpp"
#include "test_support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

namespace {

using namespace seqmanip;
using Clock = std::chrono::steady_clock;

// Pinned thresholds.
constexpr double kGoldenMaxMillis = 1.0;
constexpr std::size_t kExhaustiveMaxItems = 6;
constexpr std::size_t kRandomInstances = 1000;
constexpr std::size_t kRandomMaxItems = 9;
constexpr std::uint64_t kRandomSeed = 20260101;
constexpr double kPoolMaxSeconds = 600.0;
constexpr std::size_t kPropertySamples = 500;
constexpr std::uint64_t kPropertySeed = 7;
constexpr double kMaxLogLogSlope = 7.0;
constexpr double kMaxMillisAtThirty = 10'000.0;
constexpr std::size_t kScalingInstancesPerSize = 5;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt_millis(const char* what, double ms, double limit) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s %.3f ms (limit %.1f ms)", what, ms, limit);
  return buf;
}

std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f s", s);
  return buf;
}

class Report {
 public:
  void criterion(int id, const std::string& name, bool pass, const std::vector<std::string>& details) {
    std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << id << ": " << name << '\n';
    for (const auto& d : details) std::cout << "      " << d << '\n';
    std::cout.flush();
    all_ &= pass;
  }
  bool all() const { return all_; }

 private:
  bool all_ = true;
};

std::string names(const Instance& inst, std::vector<Item> items) {
  std::string s = "{";
  for (Item g : sorted_by_manipulator(inst, std::move(items))) s += (s.size() > 1 ? "," : "") + inst.name(g);
  return s + "}";
}

void golden_example(Report& report) {
  const auto t0 = Clock::now();
  const Instance inst = testing::example1();
  const Solution truth = truthful_response(inst);
  const DpSolution dp = dp_best_response(inst);
  const AllocationSequence manipulated = execute(inst, PickingStrategy{testing::items(inst, "bacde")});
  const double millis = seconds_since(t0) * 1e3;

  const bool truthful_ok = bundle_of(inst, truth.sequence, 1).items == testing::items(inst, "ad") &&
                           bundle_of(inst, truth.sequence, 2).items == testing::items(inst, "cb") &&
                           bundle_of(inst, truth.sequence, 3).items == testing::items(inst, "e");
  const bool dp_ok = sorted_by_manipulator(inst, dp.solution.bundle.items) == testing::items(inst, "ab");
  const bool strat_ok = bundle_of(inst, manipulated).items == testing::items(inst, "ba");
  report.criterion(1, "golden Example 1", truthful_ok && dp_ok && strat_ok && millis < kGoldenMaxMillis,
                   {"truthful bundles 1:" + names(inst, bundle_of(inst, truth.sequence, 1).items) +
                        " 2:" + names(inst, bundle_of(inst, truth.sequence, 2).items) +
                        " 3:" + names(inst, bundle_of(inst, truth.sequence, 3).items),
                    "dp bundle " + names(inst, dp.solution.bundle.items) + ", utility " + to_string(dp.solution.utility),
                    "strategy bacde yields " + names(inst, bundle_of(inst, manipulated).items),
                    fmt_millis("runtime", millis, kGoldenMaxMillis)});
}

void golden_dominated(Report& report) {
  const Instance inst = testing::example1("32121");
  const auto greedy = bundle_of(inst, greedy_alg(inst).sequence).items;
  const bool crucial = is_crucial(inst);
  const bool dom = dominates(parse_policy("13221"), parse_policy("32121"));
  report.criterion(2, "golden dominated-policy example", greedy == testing::items(inst, "ba") && crucial && dom,
                   {"greedy on 32121 yields " + names(inst, greedy),
                    std::string("is_crucial(32121) = ") + (crucial ? "true" : "false"),
                    std::string("dominates(13221, 32121) = ") + (dom ? "true" : "false")});
}

void tightness(Report& report) {
  bool pass = true;
  std::vector<std::string> details;
  for (std::int64_t k : {3, 10, 1000}) {
    const Rational eps(1, k);
    const ApproximationReport r = approximation_report(generate_tightness_instance(k));
    const bool ok = r.truthful == 1 + eps && r.optimal == 2 - eps && r.ratio == (1 + eps) / (2 - eps) &&
                    r.ratio > Rational(1, 2);
    pass &= ok;
    details.push_back("K=" + std::to_string(k) + ": truthful " + to_string(r.truthful) + ", optimal " +
                      to_string(r.optimal) + ", ratio " + to_string(r.ratio) + " (" + to_decimal(r.ratio) + ")");
  }
  report.criterion(3, "tightness family", pass, details);
}

struct Pools {
  SweepStats exhaustive;
  SweepStats random;
  SweepStats certified;  // subpool where every instance went through the certifier
  double seconds = 0;
};

Pools oracle_equivalence(Report& report, unsigned jobs, std::size_t max_items) {
  Pools pools;
  std::vector<std::string> details;
  const auto t0 = Clock::now();
  for (int n : {2, 3}) {
    for (std::size_t m = 0; m <= max_items; ++m) {
      VerifyOptions options;
      options.certify_all_crucial = m <= 5;
      const auto t = Clock::now();
      const SweepStats s = exhaustive_sweep(n, m, options, jobs);
      pools.exhaustive.merge(s);
      if (options.certify_all_crucial) pools.certified.merge(s);
      if (m >= 5)
        details.push_back("exhaustive n=" + std::to_string(n) + " m=" + std::to_string(m) + ": " +
                          std::to_string(s.instances) + " instances, " + std::to_string(s.oracle_mismatches) +
                          " mismatches, " + fmt_seconds(seconds_since(t)));
    }
  }
  RandomSweepSpec spec;
  spec.agents = {3, 4};
  spec.min_items = 1;
  spec.max_items = kRandomMaxItems;
  spec.count = kRandomInstances;
  spec.seed = kRandomSeed;
  pools.random = random_sweep(spec, {}, jobs);
  pools.seconds = seconds_since(t0);

  details.insert(details.begin(), "exhaustive pool: " + std::to_string(pools.exhaustive.instances) +
                                      " canonical instances, n in {2,3}, m <= " + std::to_string(max_items) + ", " +
                                      std::to_string(pools.exhaustive.oracle_mismatches) + " mismatches");
  details.push_back("random pool: " + std::to_string(pools.random.instances) + " instances, n in {3,4}, m <= " +
                    std::to_string(kRandomMaxItems) + ", seed " + std::to_string(kRandomSeed) + ", " +
                    std::to_string(pools.random.oracle_mismatches) + " mismatches");
  details.push_back("wall time " + fmt_seconds(pools.seconds) + " on " + std::to_string(jobs) + " thread(s) (limit " +
                    fmt_seconds(kPoolMaxSeconds) + ")");
  if (pools.exhaustive.first_failure) details.push_back("first failure: " + *pools.exhaustive.first_failure);
  if (pools.random.first_failure) details.push_back("first failure: " + *pools.random.first_failure);
  const bool pass = pools.exhaustive.oracle_mismatches == 0 && pools.random.oracle_mismatches == 0 &&
                    max_items >= kExhaustiveMaxItems && pools.random.instances >= 1000 &&
                    pools.seconds <= kPoolMaxSeconds;
  report.criterion(4, "oracle equivalence (dp = choice tree = dominated greedy)", pass, details);
  return pools;
}

void half_optimality(Report& report, const Pools& pools) {
  const std::uint64_t violations = pools.exhaustive.half_violations + pools.random.half_violations;
  const testing::DominanceTallies dom = testing::sample_dominance(kPropertySamples, kPropertySeed);
  const testing::MoveTallies mv = testing::sample_moves(kPropertySamples, kPropertySeed);
  auto line = [](const std::string& what, const testing::PropertyTally& t) {
    std::string s = what + ": " + std::to_string(t.samples - t.failures) + "/" + std::to_string(t.samples) + " hold";
    if (!t.held()) s += "; e.g. " + t.first_counterexample;
    return s;
  };
  const bool pass = violations == 0 && dom.shared_strategy.held() && mv.same_strategy.held() &&
                    dom.shared_strategy.samples >= kPropertySamples && mv.same_strategy.samples >= kPropertySamples;
  report.criterion(5, "truthful >= optimal / 2; dominance monotonicity; move preserves bundle", pass,
                   {"half-optimality over both pools: " + std::to_string(violations) + " violations in " +
                        std::to_string(pools.exhaustive.instances + pools.random.instances) + " instances",
                    line("monotonicity, same strategy under a dominated policy", dom.shared_strategy),
                    line("move, same strategy keeps the bundle", mv.same_strategy),
                    "related forms that do hold on the same samples:",
                    "  " + line("strategy transfer reproduces the dominated bundle", dom.transfer),
                    "  " + line("optimum under a dominated policy <= optimum", dom.optimum),
                    "  " + line("move with no manipulator turn crossed", mv.same_strategy_no_crossing),
                    "  " + line("move realised by the rearranged trace", mv.rearranged_trace)});
}

void crucial_greedy(Report& report, const Pools& pools) {
  const bool pass = pools.exhaustive.crucial_violations == 0;
  report.criterion(
      6, "greedy is optimal on every crucial instance", pass,
      {std::to_string(pools.exhaustive.crucial_violations) + " crucial instances with greedy below the optimum among " +
           std::to_string(pools.exhaustive.instances),
       "certifier run on every instance with m <= 5: " + std::to_string(pools.certified.crucial_certified) +
           " crucial of " + std::to_string(pools.certified.instances),
       "m > 5: certifier run on the " + std::to_string(pools.exhaustive.greedy_suboptimal - pools.certified.greedy_suboptimal) +
           " instances where greedy misses the optimum; none is crucial"});
}

void scaling(Report& report) {
  std::vector<double> xs, ys;
  std::vector<std::string> details;
  bool bound_ok = true;
  double millis_at_30 = 0;
  std::uint64_t seed = 1000;
  for (std::size_t m : {10, 15, 20, 25, 30}) {
    double total = 0, worst = 0;
    std::size_t max_states = 0;
    for (std::size_t k = 0; k < kScalingInstancesPerSize; ++k) {
      const Instance inst = generate_random_instance(3, m, seed++);
      const auto t0 = Clock::now();
      const DpSolution dp = dp_best_response(inst);
      const double ms = seconds_since(t0) * 1e3;
      total += ms;
      worst = std::max(worst, ms);
      max_states = std::max(max_states, dp.state_count);
      bound_ok &= BigInt(dp.state_count) <= dp_state_bound(inst);
    }
    const double mean = total / kScalingInstancesPerSize;
    if (m == 30) millis_at_30 = worst;
    xs.push_back(std::log(static_cast<double>(m)));
    ys.push_back(std::log(std::max(mean, 1e-6)));
    char buf[160];
    std::snprintf(buf, sizeof buf, "m=%zu: mean %.3f ms, max %.3f ms, max states %zu", m, mean, worst, max_states);
    details.emplace_back(buf);
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  char buf[160];
  std::snprintf(buf, sizeof buf, "log-log slope %.3f (limit %.1f); m=30 worst %.3f ms (limit %.0f ms)", slope,
                kMaxLogLogSlope, millis_at_30, kMaxMillisAtThirty);
  details.emplace_back(buf);
  details.emplace_back(std::string("state count within (1+m)^(n-1)(m'+1)(k1+1) on every run: ") +
                       (bound_ok ? "yes" : "no"));
  report.criterion(7, "polynomial scaling of the DP at n = 3",
                   slope <= kMaxLogLogSlope && millis_at_30 <= kMaxMillisAtThirty && bound_ok, details);
}

void determinism(Report& report) {
  const std::string dir = SEQMANIP_SAMPLES_DIR;
  const std::string random_path = (std::filesystem::temp_directory_path() / "seqmanip_acceptance_r20.json").string();
  std::ofstream(random_path) << serialize_instance(generate_random_instance(3, 20, 42));
  bool pass = true;
  std::vector<std::string> details;
  for (const std::string& path : {dir + "/example1.json", random_path}) {
    std::ostringstream a, b, e1, e2;
    const int c1 = run_cli({"solve", path}, a, e1);
    const int c2 = run_cli({"solve", path}, b, e2);
    const bool same = c1 == 0 && c2 == 0 && a.str() == b.str() && !a.str().empty();
    pass &= same;
    details.push_back(std::filesystem::path(path).filename().string() + ": " + std::to_string(a.str().size()) +
                      " bytes, identical: " + (same ? "yes" : "no"));
  }
  report.criterion(8, "solve output is byte-identical across runs", pass, details);
}

}  // namespace

int main(int argc, char** argv) {
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  bool quick = false;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--jobs" && i + 1 < argc) {
      jobs = static_cast<unsigned>(std::stoul(argv[++i]));
    } else if (a == "--quick") {
      quick = true;
    } else {
      std::cerr << "usage: acceptance [--jobs N] [--quick]\n";
      return 1;
    }
  }
  Report report;
  try {
    golden_example(report);
    golden_dominated(report);
    tightness(report);
    const Pools pools = oracle_equivalence(report, jobs, quick ? 5 : kExhaustiveMaxItems);
    half_optimality(report, pools);
    crucial_greedy(report, pools);
    scaling(report);
    determinism(report);
  } catch (const std::exception& e) {
    std::cout << "FAIL  aborted: " << e.what() << '\n';
    return 1;
  }
  std::cout << (report.all() ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL") << '\n';
  return report.all() ? 0 : 1;
}
