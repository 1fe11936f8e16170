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

// JSON instance documents:
//
//   {
//     "items": ["a","b","c","d","e"],
//     "agents": 3,
//     "policy": [1,3,2,2,1],
//     "rankings": { "1": ["a","b","c","d","e"], "2": [...], "3": [...] },
//     "utilities": { "a": "5", "b": "4", "c": "3", "d": "2", "e": "1" }
//   }
//
// Utilities are "p" or "p/q" strings (bare JSON integers are accepted on
// input). Serialization is canonical: object keys sorted, rationals reduced.

#pragma once

#include "seqmanip/model.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace seqmanip {

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw InstanceError(key, "missing field");
  return *it;
}

inline Item item_by_name(const std::unordered_map<std::string, Item>& index, const nlohmann::json& v,
                         const std::string& path) {
  if (!v.is_string()) throw InstanceError(path, "item identifiers must be strings");
  auto it = index.find(v.get<std::string>());
  if (it == index.end()) throw InstanceError(path, "unknown item '" + v.get<std::string>() + "'");
  return it->second;
}

}  // namespace detail

inline Instance instance_from_json(const nlohmann::json& doc) {
  using nlohmann::json;
  if (!doc.is_object()) throw InstanceError("", "malformed document: expected a JSON object");

  const json& items = detail::require(doc, "items");
  if (!items.is_array()) throw InstanceError("items", "expected an array of strings");
  std::vector<std::string> names;
  std::unordered_map<std::string, Item> index;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!items[i].is_string()) throw InstanceError("items[" + std::to_string(i) + "]", "expected a string");
    names.push_back(items[i].get<std::string>());
    if (!index.emplace(names.back(), static_cast<Item>(i)).second)
      throw InstanceError("items[" + std::to_string(i) + "]", "duplicate item name '" + names.back() + "'");
  }

  const json& agents = detail::require(doc, "agents");
  if (!agents.is_number_integer()) throw InstanceError("agents", "expected an integer");
  const auto n = agents.get<std::int64_t>();
  if (n < 1 || n > 1'000'000) throw InstanceError("agents", "agent count out of range");

  const json& pol = detail::require(doc, "policy");
  if (!pol.is_array()) throw InstanceError("policy", "expected an array of agent indices");
  Policy policy;
  for (std::size_t t = 0; t < pol.size(); ++t) {
    if (!pol[t].is_number_integer()) throw InstanceError("policy[" + std::to_string(t) + "]", "expected an integer");
    const auto a = pol[t].get<std::int64_t>();
    if (a < 1 || a > n)
      throw InstanceError("policy[" + std::to_string(t) + "]",
                          "agent index " + std::to_string(a) + " out of range 1.." + std::to_string(n));
    policy.turns.push_back(static_cast<Agent>(a));
  }

  const json& ranks = detail::require(doc, "rankings");
  if (!ranks.is_object()) throw InstanceError("rankings", "expected an object keyed by agent index");
  for (auto it = ranks.begin(); it != ranks.end(); ++it) {
    const std::string& key = it.key();
    const bool numeric = !key.empty() && key.find_first_not_of("0123456789") == std::string::npos;
    if (!numeric || key.size() > 7 || std::stoll(key) < 1 || std::stoll(key) > n)
      throw InstanceError("rankings." + key, "agent index out of range 1.." + std::to_string(n));
  }
  std::vector<Ranking> rankings;
  for (std::int64_t a = 1; a <= n; ++a) {
    const std::string path = "rankings." + std::to_string(a);
    auto it = ranks.find(std::to_string(a));
    if (it == ranks.end()) throw InstanceError(path, "missing ranking");
    if (!it->is_array()) throw InstanceError(path, "expected an array of items");
    Ranking r;
    for (std::size_t pos = 0; pos < it->size(); ++pos)
      r.push_back(detail::item_by_name(index, (*it)[pos], path + "[" + std::to_string(pos) + "]"));
    rankings.push_back(std::move(r));
  }

  const json& utils = detail::require(doc, "utilities");
  if (!utils.is_object()) throw InstanceError("utilities", "expected an object keyed by item");
  std::vector<Rational> utility(names.size());
  std::vector<bool> seen(names.size(), false);
  for (auto it = utils.begin(); it != utils.end(); ++it) {
    const std::string path = "utilities." + it.key();
    auto idx = index.find(it.key());
    if (idx == index.end()) throw InstanceError(path, "unknown item '" + it.key() + "'");
    const auto g = static_cast<std::size_t>(idx->second);
    try {
      if (it->is_string()) {
        utility[g] = parse_rational(it->get<std::string>());
      } else if (it->is_number_integer()) {
        utility[g] = Rational(it->get<std::int64_t>());
      } else {
        throw InstanceError(path, "expected a rational string such as \"3\" or \"7/2\"");
      }
    } catch (const std::invalid_argument& e) {
      throw InstanceError(path, e.what());
    }
    seen[g] = true;
  }
  for (std::size_t g = 0; g < names.size(); ++g)
    if (!seen[g]) throw InstanceError("utilities." + names[g], "missing utility");

  return Instance::create(std::move(names), static_cast<int>(n), std::move(policy), std::move(rankings),
                          std::move(utility));
}

inline Instance parse_instance(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InstanceError("", std::string("malformed document: ") + e.what());
  }
  return instance_from_json(doc);
}

inline Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InstanceError("", "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

inline nlohmann::json to_json(const Instance& inst) {
  using nlohmann::json;
  json doc;
  doc["items"] = inst.item_names();
  doc["agents"] = inst.num_agents();
  doc["policy"] = inst.policy().turns;
  json ranks = json::object();
  for (Agent a = 1; a <= inst.num_agents(); ++a) {
    json r = json::array();
    for (Item g : inst.ranking(a)) r.push_back(inst.name(g));
    ranks[std::to_string(a)] = std::move(r);
  }
  doc["rankings"] = std::move(ranks);
  json utils = json::object();
  for (std::size_t g = 0; g < inst.num_items(); ++g)
    utils[inst.name(static_cast<Item>(g))] = to_string(inst.utility(static_cast<Item>(g)));
  doc["utilities"] = std::move(utils);
  return doc;
}

inline std::string serialize_instance(const Instance& inst) { return to_json(inst).dump(2) + "\n"; }

}  // namespace seqmanip
