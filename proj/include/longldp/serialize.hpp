// SPDX-License-Identifier: Apache-2.0
//
// Client-state serialization: a documented, stable JSON encoding carrying the
// protocol tag, parameters, memo entries, and privacy ledger. A restored
// client continues exactly where the original stopped (memoized entries and
// ledger intact); fresh randomness is supplied by the caller's Rng.
//
// Encodings (keys sorted alphabetically by the JSON library):
//   loloha: {"protocol":"loloha","k","g","eps_inf","eps_1","hash_seed",
//            "memo":[[x,x'],...],"ledger":[classes...]}
//   lsue/losue: {"protocol":"lsue"|"losue","k","eps_inf","eps_1",
//            "memo":[[v,[bits...]],...],"ledger":[...]}
//   lgrr:   {"protocol":"lgrr","k","eps_inf","eps_1","memo":[[v,v'],...],
//            "ledger":[...]}
//   dbitflip: {"protocol":"dbitflip","k","b","d","eps_inf",
//            "sampled":[...],"memo":[[class,[bits...]],...],"ledger":[...]}

#pragma once

#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "longldp/longitudinal.hpp"

namespace longldp {

using Json = nlohmann::json;

namespace detail {

inline Json ledger_to_json(const PrivacyLedger& ledger) {
  Json arr = Json::array();
  for (int c : ledger.classes()) arr.push_back(c);
  return arr;
}

inline std::set<int> ledger_from_json(const Json& arr) {
  std::set<int> classes;
  for (const auto& c : arr) classes.insert(c.get<int>());
  return classes;
}

}  // namespace detail

inline Json client_to_json(const LolohaClient& c) {
  Json memo = Json::array();
  for (const auto& [x, xp] : c.memo()) memo.push_back(Json::array({x, xp}));
  return Json{{"protocol", "loloha"},
              {"k", c.k()},
              {"g", c.g()},
              {"eps_inf", c.budget().eps_inf},
              {"eps_1", c.budget().eps_1},
              {"hash_seed", c.hash().seed},
              {"memo", memo},
              {"ledger", detail::ledger_to_json(c.ledger())}};
}

inline LolohaClient loloha_from_json(const Json& j) {
  if (j.at("protocol").get<std::string>() != "loloha") {
    throw std::invalid_argument("loloha_from_json: wrong protocol tag");
  }
  const int k = j.at("k").get<int>();
  const int g = j.at("g").get<int>();
  const PrivacyBudget budget =
      make_budget(j.at("eps_inf").get<double>(), j.at("eps_1").get<double>());
  const SeededHash hash{j.at("hash_seed").get<std::uint64_t>(), k, g};
  std::map<int, int> memo;
  for (const auto& kv : j.at("memo")) {
    memo[kv.at(0).get<int>()] = kv.at(1).get<int>();
  }
  LolohaClient c;
  c.restore(budget, k, g, hash, memo, detail::ledger_from_json(j.at("ledger")));
  return c;
}

inline Json client_to_json(const UeLongClient& c) {
  Json memo = Json::array();
  for (const auto& [v, bits] : c.memo()) {
    Json b = Json::array();
    for (auto bit : bits) b.push_back(static_cast<int>(bit));
    memo.push_back(Json::array({v, b}));
  }
  return Json{{"protocol", to_string(c.flavor())},
              {"k", c.k()},
              {"eps_inf", c.budget().eps_inf},
              {"eps_1", c.budget().eps_1},
              {"memo", memo},
              {"ledger", detail::ledger_to_json(c.ledger())}};
}

inline UeLongClient ue_long_from_json(const Json& j) {
  const std::string tag = j.at("protocol").get<std::string>();
  UeLongFlavor flavor;
  if (tag == "lsue") {
    flavor = UeLongFlavor::kLsue;
  } else if (tag == "losue") {
    flavor = UeLongFlavor::kLosue;
  } else {
    throw std::invalid_argument("ue_long_from_json: wrong protocol tag");
  }
  const int k = j.at("k").get<int>();
  const PrivacyBudget budget =
      make_budget(j.at("eps_inf").get<double>(), j.at("eps_1").get<double>());
  std::map<int, Bits> memo;
  for (const auto& kv : j.at("memo")) {
    Bits bits;
    for (const auto& bit : kv.at(1)) {
      bits.push_back(static_cast<std::uint8_t>(bit.get<int>()));
    }
    memo[kv.at(0).get<int>()] = std::move(bits);
  }
  UeLongClient c;
  c.restore(budget, k, flavor, memo, detail::ledger_from_json(j.at("ledger")));
  return c;
}

inline Json client_to_json(const LgrrClient& c) {
  Json memo = Json::array();
  for (const auto& [v, vp] : c.memo()) memo.push_back(Json::array({v, vp}));
  return Json{{"protocol", "lgrr"},
              {"k", c.k()},
              {"eps_inf", c.budget().eps_inf},
              {"eps_1", c.budget().eps_1},
              {"memo", memo},
              {"ledger", detail::ledger_to_json(c.ledger())}};
}

inline LgrrClient lgrr_from_json(const Json& j) {
  if (j.at("protocol").get<std::string>() != "lgrr") {
    throw std::invalid_argument("lgrr_from_json: wrong protocol tag");
  }
  const int k = j.at("k").get<int>();
  const PrivacyBudget budget =
      make_budget(j.at("eps_inf").get<double>(), j.at("eps_1").get<double>());
  std::map<int, int> memo;
  for (const auto& kv : j.at("memo")) {
    memo[kv.at(0).get<int>()] = kv.at(1).get<int>();
  }
  LgrrClient c;
  c.restore(budget, k, memo, detail::ledger_from_json(j.at("ledger")));
  return c;
}

inline Json client_to_json(const DBitClient& c) {
  Json memo = Json::array();
  for (const auto& [cls, bits] : c.memo()) {
    Json b = Json::array();
    for (auto bit : bits) b.push_back(static_cast<int>(bit));
    memo.push_back(Json::array({cls, b}));
  }
  Json sampled = Json::array();
  for (int idx : c.sampled_indices()) sampled.push_back(idx);
  return Json{{"protocol", "dbitflip"},
              {"k", c.k()},
              {"b", c.b()},
              {"d", c.d()},
              {"eps_inf", c.eps_inf()},
              {"sampled", sampled},
              {"memo", memo},
              {"ledger", detail::ledger_to_json(c.ledger())}};
}

inline DBitClient dbit_from_json(const Json& j) {
  if (j.at("protocol").get<std::string>() != "dbitflip") {
    throw std::invalid_argument("dbit_from_json: wrong protocol tag");
  }
  std::vector<int> sampled;
  for (const auto& idx : j.at("sampled")) sampled.push_back(idx.get<int>());
  std::map<int, Bits> memo;
  for (const auto& kv : j.at("memo")) {
    Bits bits;
    for (const auto& bit : kv.at(1)) {
      bits.push_back(static_cast<std::uint8_t>(bit.get<int>()));
    }
    memo[kv.at(0).get<int>()] = std::move(bits);
  }
  DBitClient c;
  c.restore(j.at("k").get<int>(), j.at("b").get<int>(), j.at("d").get<int>(),
            j.at("eps_inf").get<double>(), sampled, memo,
            detail::ledger_from_json(j.at("ledger")));
  return c;
}

inline void save_client_state(const std::string& path, const Json& state) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << state.dump(2) << '\n';
}

inline Json load_client_state(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  Json j;
  in >> j;
  return j;
}

}  // namespace longldp
