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

// Command-line front end. run_cli is the whole program minus main(), so it
// can be driven from tests with string streams.
//
// Exit codes: 0 success, 1 invalid input, 2 internal verification mismatch,
// 3 oracle budget exceeded. Results go to `out` (JSON, or CSV with --csv),
// diagnostics to `err`.

#pragma once

#include "seqmanip/dp.hpp"
#include "seqmanip/generators.hpp"
#include "seqmanip/greedy.hpp"
#include "seqmanip/instance_io.hpp"
#include "seqmanip/oracle.hpp"
#include "seqmanip/responses.hpp"
#include "seqmanip/sweep.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

namespace seqmanip {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitMismatch = 2;
inline constexpr int kExitBudget = 3;

namespace cli {

using nlohmann::json;

struct VerificationMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// "NODES" or "NODES,POLICIES".
inline OracleBudget parse_budget(const std::string& text) {
  OracleBudget b;
  auto parse_count = [&](const std::string& s) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (s.empty() || used != s.size() || s[0] == '-' || v == 0)
      throw std::invalid_argument("budget must be NODES or NODES,POLICIES with positive integers, got '" + text + "'");
    return static_cast<std::uint64_t>(v);
  };
  const auto comma = text.find(',');
  b.max_nodes = parse_count(text.substr(0, comma));
  if (comma != std::string::npos) b.max_policies = parse_count(text.substr(comma + 1));
  return b;
}

inline OracleBudget default_budget() {
  if (const char* env = std::getenv("SEQMANIP_BUDGET"); env && *env) return parse_budget(env);
  return {};
}

inline json names_of(const Instance& inst, const std::vector<Item>& items) {
  json out = json::array();
  for (Item g : items) out.push_back(inst.name(g));
  return out;
}

inline std::string joined(const Instance& inst, const std::vector<Item>& items) {
  std::string s;
  for (Item g : items) {
    if (!s.empty()) s += ' ';
    s += inst.name(g);
  }
  return s;
}

inline json solution_json(const Instance& inst, const Solution& s) {
  json out;
  out["bundle"] = names_of(inst, sorted_by_manipulator(inst, s.bundle.items));
  out["utility"] = to_string(s.utility);
  out["strategy"] = names_of(inst, s.strategy.order);
  json seq = json::array();
  for (const auto& st : s.sequence) seq.push_back({{"item", inst.name(st.item)}, {"agent", st.agent}});
  out["sequence"] = std::move(seq);
  return out;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

inline void write_csv(std::ostream& out, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << csv_field(cells[i]);
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
}

inline void write_solution_csv(std::ostream& out, const Instance& inst, const Solution& s) {
  write_csv(out, {"utility", "bundle", "strategy"},
            {{to_string(s.utility), joined(inst, sorted_by_manipulator(inst, s.bundle.items)),
              joined(inst, s.strategy.order)}});
}

inline std::vector<Item> parse_target(const Instance& inst, const std::string& text) {
  std::vector<Item> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string name = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!name.empty()) {
      auto g = inst.find_item(name);
      if (!g) throw InstanceError("target", "unknown item '" + name + "'");
      out.push_back(*g);
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

inline json stats_json(const SweepStats& s) {
  json out;
  out["instances"] = s.instances;
  out["oracle_mismatches"] = s.oracle_mismatches;
  out["half_violations"] = s.half_violations;
  out["greedy_suboptimal"] = s.greedy_suboptimal;
  out["crucial_certified"] = s.crucial_certified;
  out["crucial_violations"] = s.crucial_violations;
  out["first_failure"] = s.first_failure ? json(*s.first_failure) : json(nullptr);
  return out;
}

}  // namespace cli

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using cli::json;

  CLI::App app{"Exact best-response solver for sequential allocation"};
  app.name("seqmanip");
  app.require_subcommand(1);

  std::string file, method = "choice-tree", budget_text, target_text, bench_csv;
  bool csv = false, check = false, dump_table = false, exhaustive = false, random_utilities = false,
       certify_crucial = false;
  std::int64_t tightness = 0;
  std::vector<int> agents;
  std::size_t items = 0, min_items = 0, max_items = 6, random_count = 0, count = 1;
  std::vector<std::size_t> item_list;
  std::uint64_t seed = 1;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());

  auto add_common = [&](CLI::App* sub, bool with_file) {
    if (with_file) sub->add_option("file", file, "instance JSON file")->required();
    sub->add_flag("--csv", csv, "write CSV instead of JSON");
    sub->add_option("--budget", budget_text, "oracle budget NODES[,POLICIES]");
  };

  auto* solve = app.add_subcommand("solve", "best response via the dynamic program");
  add_common(solve, true);
  solve->add_flag("--check", check, "recompute with the dominated-greedy oracle; exit 2 on mismatch");
  solve->add_flag("--dump-table", dump_table, "include the opt table");

  auto* greedy = app.add_subcommand("greedy", "run the greedy algorithm on the instance policy");
  add_common(greedy, true);

  auto* truthful = app.add_subcommand("truthful", "truthful picking by the manipulator");
  add_common(truthful, true);

  auto* oracle = app.add_subcommand("oracle", "exponential ground-truth solvers");
  add_common(oracle, true);
  oracle->add_option("--method", method, "choice-tree or dominated-greedy")
      ->check(CLI::IsMember({"choice-tree", "dominated-greedy"}));

  auto* ratio = app.add_subcommand("ratio", "truthful / optimal utility ratio");
  ratio->add_option("file", file, "instance JSON file");
  ratio->add_option("--tightness", tightness, "use the tightness family member with this K");
  ratio->add_flag("--csv", csv, "write CSV instead of JSON");

  auto* achievable = app.add_subcommand("achievable", "can the manipulator obtain exactly a given bundle");
  add_common(achievable, true);
  achievable->add_option("--target", target_text, "comma-separated item names")->required();

  auto* gen = app.add_subcommand("gen", "generate an instance");
  gen->add_option("--agents", agents, "number of agents");
  gen->add_option("--items", items, "number of items");
  gen->add_option("--seed", seed, "random seed");
  gen->add_flag("--random-utilities", random_utilities, "random strictly decreasing integer utilities");
  gen->add_option("--tightness", tightness, "the tightness family member with this K");

  auto* verify = app.add_subcommand("verify", "cross-validate the DP against both oracles");
  verify->add_option("--agents", agents, "agent counts (comma-separated); exhaustive pools use the largest")
      ->delimiter(',');
  verify->add_option("--min-items", min_items, "smallest item count");
  verify->add_option("--max-items", max_items, "largest item count");
  verify->add_flag("--exhaustive", exhaustive, "every canonical instance in range");
  verify->add_option("--random", random_count, "number of random instances");
  verify->add_option("--seed", seed, "random seed");
  verify->add_option("--jobs", jobs, "worker threads");
  verify->add_flag("--certify-crucial", certify_crucial, "run the crucial certifier on every instance");
  verify->add_flag("--csv", csv, "write CSV instead of JSON");
  verify->add_option("--budget", budget_text, "oracle budget NODES[,POLICIES]");

  auto* bench = app.add_subcommand("bench", "time the DP on random instances");
  bench->add_option("--agents", agents, "number of agents");
  bench->add_option("--items", item_list, "item counts (comma-separated)")->delimiter(',');
  bench->add_option("--count", count, "instances per item count");
  bench->add_option("--seed", seed, "random seed");
  bench->add_option("--jobs", jobs, "worker threads");
  bench->add_option("--csv", bench_csv, "write CSV rows to this path ('-' for standard output)");

  std::vector<std::string> argv_store{"seqmanip"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  auto emit = [&](const json& j) { out << j.dump(2) << '\n'; };

  try {
    const OracleBudget budget = budget_text.empty() ? cli::default_budget() : cli::parse_budget(budget_text);

    if (solve->parsed()) {
      const Instance inst = load_instance(file);
      const DpSolution dp = dp_best_response(inst);
      json j = cli::solution_json(inst, dp.solution);
      j["dominated_policy"] = to_string(dp.dominated_policy);
      j["dp_states"] = dp.state_count;
      if (dump_table) j["table"] = opt_table_to_json(build_opt_table(inst));
      bool mismatch = false;
      if (check) {
        const DominatedGreedySolution dg = dominated_greedy_best(inst, budget);
        mismatch = dg.solution.utility != dp.solution.utility;
        j["check"] = {{"dominated_greedy_utility", to_string(dg.solution.utility)}, {"agrees", !mismatch}};
      }
      if (csv) {
        cli::write_solution_csv(out, inst, dp.solution);
      } else {
        emit(j);
      }
      if (mismatch) throw cli::VerificationMismatch("dominated-greedy oracle disagrees with the DP");
      return kExitOk;
    }

    if (greedy->parsed()) {
      const Instance inst = load_instance(file);
      const Solution s = make_solution(inst, greedy_alg(inst).strategy);
      csv ? cli::write_solution_csv(out, inst, s) : emit(cli::solution_json(inst, s));
      return kExitOk;
    }

    if (truthful->parsed()) {
      const Instance inst = load_instance(file);
      const Solution s = truthful_response(inst);
      if (csv) {
        cli::write_solution_csv(out, inst, s);
      } else {
        json j = cli::solution_json(inst, s);
        json bundles = json::object();
        for (Agent a = 1; a <= inst.num_agents(); ++a)
          bundles[std::to_string(a)] = cli::names_of(inst, bundle_of(inst, s.sequence, a).items);
        j["bundles"] = std::move(bundles);
        emit(j);
      }
      return kExitOk;
    }

    if (oracle->parsed()) {
      const Instance inst = load_instance(file);
      json j;
      Solution s;
      if (method == "choice-tree") {
        s = choice_tree_best(inst, budget);
        j = cli::solution_json(inst, s);
      } else {
        const DominatedGreedySolution dg = dominated_greedy_best(inst, budget);
        s = dg.solution;
        j = cli::solution_json(inst, s);
        j["policy"] = to_string(dg.policy);
      }
      j["method"] = method;
      csv ? cli::write_solution_csv(out, inst, s) : emit(j);
      return kExitOk;
    }

    if (ratio->parsed()) {
      if (file.empty() == (tightness == 0))
        throw std::invalid_argument("ratio needs exactly one of FILE or --tightness K");
      const Instance inst = file.empty() ? generate_tightness_instance(tightness) : load_instance(file);
      const ApproximationReport r = approximation_report(inst);
      if (csv) {
        cli::write_csv(out, {"truthful", "optimal", "ratio", "ratio_decimal"},
                       {{to_string(r.truthful), to_string(r.optimal), to_string(r.ratio), to_decimal(r.ratio)}});
      } else {
        emit({{"truthful", to_string(r.truthful)},
              {"optimal", to_string(r.optimal)},
              {"ratio", to_string(r.ratio)},
              {"ratio_decimal", to_decimal(r.ratio)}});
      }
      return kExitOk;
    }

    if (achievable->parsed()) {
      const Instance inst = load_instance(file);
      const std::vector<Item> target = cli::parse_target(inst, target_text);
      const bool ok = allocation_response(inst, target);
      if (csv) {
        cli::write_csv(out, {"target", "achievable"}, {{cli::joined(inst, target), ok ? "true" : "false"}});
      } else {
        emit({{"target", cli::names_of(inst, target)}, {"achievable", ok}});
      }
      return kExitOk;
    }

    if (gen->parsed()) {
      if (tightness != 0) {
        emit(to_json(generate_tightness_instance(tightness)));
        return kExitOk;
      }
      if (agents.size() != 1) throw std::invalid_argument("gen needs --agents N --items M (or --tightness K)");
      Instance inst = generate_random_instance(agents[0], items, seed);
      if (random_utilities) inst = with_random_utilities(inst, seed);
      json j = to_json(inst);
      j["seed"] = seed;
      emit(j);
      return kExitOk;
    }

    if (verify->parsed()) {
      if (agents.empty()) agents = {3};
      for (int a : agents)
        if (a < 1) throw std::invalid_argument("agent counts must be positive");
      if (min_items > max_items) throw std::invalid_argument("--min-items exceeds --max-items");
      if (!exhaustive && random_count == 0) exhaustive = true;
      VerifyOptions options{budget, certify_crucial};
      const int n = *std::max_element(agents.begin(), agents.end());

      json j;
      j["seed"] = seed;
      SweepStats all;
      std::vector<std::vector<std::string>> rows;
      json pools = json::array();
      if (exhaustive) {
        for (std::size_t m = min_items; m <= max_items; ++m) {
          err << "verify: exhaustive n=" << n << " m=" << m << " (" << count_canonical_instances(n, m)
              << " instances)\n";
          const SweepStats s = exhaustive_sweep(n, m, options, jobs);
          all.merge(s);
          json p = cli::stats_json(s);
          p["pool"] = "exhaustive";
          p["agents"] = n;
          p["items"] = m;
          pools.push_back(p);
          rows.push_back({"exhaustive", std::to_string(n), std::to_string(m), std::to_string(s.instances),
                          std::to_string(s.oracle_mismatches), std::to_string(s.half_violations),
                          std::to_string(s.crucial_violations)});
        }
      }
      if (random_count > 0) {
        RandomSweepSpec spec{agents, std::max<std::size_t>(min_items, 1), max_items, random_count, seed};
        if (spec.min_items > spec.max_items) throw std::invalid_argument("random pool needs --max-items >= 1");
        err << "verify: random pool of " << random_count << " instances, seed " << seed << '\n';
        const SweepStats s = random_sweep(spec, options, jobs);
        all.merge(s);
        json p = cli::stats_json(s);
        p["pool"] = "random";
        pools.push_back(p);
        rows.push_back({"random", "", "", std::to_string(s.instances), std::to_string(s.oracle_mismatches),
                        std::to_string(s.half_violations), std::to_string(s.crucial_violations)});
      }
      j["pools"] = std::move(pools);
      j["total"] = cli::stats_json(all);
      j["ok"] = all.ok();
      if (csv) {
        cli::write_csv(out,
                       {"pool", "agents", "items", "instances", "oracle_mismatches", "half_violations",
                        "crucial_violations"},
                       rows);
      } else {
        emit(j);
      }
      if (!all.ok()) throw cli::VerificationMismatch(all.first_failure.value_or("verification failed"));
      return kExitOk;
    }

    if (bench->parsed()) {
      const int n = agents.empty() ? 3 : agents[0];
      if (item_list.empty()) item_list = {10, 15, 20, 25, 30};
      struct Row {
        std::uint64_t seed;
        std::size_t m, k1, states;
        Rational opt, truth;
        double millis;
      };
      std::vector<std::pair<std::size_t, std::size_t>> jobs_list;  // (m, index)
      for (std::size_t m : item_list)
        for (std::size_t c = 0; c < count; ++c) jobs_list.emplace_back(m, jobs_list.size());
      err << "bench: n=" << n << ", seed " << seed << '\n';
      auto rows = parallel_map<Row>(jobs_list.size(), jobs, [&](std::size_t i) {
        Row r;
        r.seed = random_instance_seed(seed, i);
        r.m = jobs_list[i].first;
        const Instance inst = generate_random_instance(n, r.m, r.seed);
        r.k1 = inst.manipulator_turns();
        const auto t0 = std::chrono::steady_clock::now();
        const DpSolution dp = dp_best_response(inst);
        r.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        r.states = dp.state_count;
        r.opt = dp.solution.utility;
        r.truth = truthful_response(inst).utility;
        return r;
      });
      const std::vector<std::string> header{"seed",        "n",     "m",         "k1",        "utility_opt",
                                            "utility_truthful", "ratio", "dp_states", "dp_millis"};
      std::vector<std::vector<std::string>> cells;
      json j = json::array();
      for (const Row& r : rows) {
        const std::string rat = r.k1 == 0 ? std::string("NA") : to_string(Rational(r.truth / r.opt));
        char millis[32];
        std::snprintf(millis, sizeof millis, "%.3f", r.millis);
        cells.push_back({std::to_string(r.seed), std::to_string(n), std::to_string(r.m), std::to_string(r.k1),
                         to_string(r.opt), to_string(r.truth), rat, std::to_string(r.states), millis});
        json row;
        for (std::size_t c = 0; c < header.size(); ++c) row[header[c]] = cells.back()[c];
        j.push_back(row);
      }
      if (bench_csv == "-") {
        cli::write_csv(out, header, cells);
      } else {
        if (!bench_csv.empty()) {
          std::ofstream f(bench_csv);
          if (!f) throw std::invalid_argument("cannot write '" + bench_csv + "'");
          cli::write_csv(f, header, cells);
        }
        emit(j);
      }
      return kExitOk;
    }
  } catch (const cli::VerificationMismatch& e) {
    err << "verification mismatch: " << e.what() << '\n';
    return kExitMismatch;
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << '\n';
    return kExitBudget;
  } catch (const InstanceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::logic_error& e) {
    err << "internal verification failure: " << e.what() << '\n';
    return kExitMismatch;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitInvalid;
}

}  // namespace seqmanip
