/*
 * Copyright 2026 The hwsdro Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "dro/config.h"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "dro/errors.h"

namespace dro {
namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = Trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double ParseDouble(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ArgumentError("config key " + key + ": expected a number, got '" + s + "'");
  }
}

std::uint64_t ParseUnsigned(const std::string& key, const std::string& s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ArgumentError("config key " + key + ": expected a non-negative integer, got '" + s + "'");
  }
  return v;
}

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string JoinSizes(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

}  // namespace

bool ParseBool(const std::string& s) {
  std::string l = s;
  std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return std::tolower(c); });
  if (l == "true" || l == "1" || l == "yes" || l == "on") return true;
  if (l == "false" || l == "0" || l == "no" || l == "off") return false;
  throw ArgumentError("expected a boolean, got '" + s + "'");
}

ConfigMap ConfigMap::Parse(const std::string& text) {
  ConfigMap map;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ArgumentError("config line " + std::to_string(lineno) + ": missing '='");
    }
    const std::string key = Trim(t.substr(0, eq));
    if (key.empty()) throw ArgumentError("config line " + std::to_string(lineno) + ": empty key");
    map.Set(key, Trim(t.substr(eq + 1)));
  }
  return map;
}

ConfigMap ConfigMap::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return Parse(ss.str());
}

ArmSpec ParseArm(const std::string& token) {
  const std::string t = Trim(token);
  if (t == "erm") return {"erm", Objective::kErm, 1.0};
  if (t.rfind("dro:", 0) == 0) {
    const std::string beta_text = t.substr(4);
    const double beta = ParseDouble("experiment.arms", beta_text);
    RobustnessParam{beta};
    return {"dro_beta" + beta_text, Objective::kDro, beta};
  }
  throw ArgumentError("unknown arm '" + t + "', expected erm or dro:<beta>");
}

void ApplyConfig(const ConfigMap& map, ExperimentConfig& cfg) {
  auto& d = cfg.dataset;
  auto& t = cfg.train;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  auto size = [](std::size_t& field) -> Setter {
    return [&field](const std::string& k, const std::string& v) { field = ParseUnsigned(k, v); };
  };
  auto real = [](double& field) -> Setter {
    return [&field](const std::string& k, const std::string& v) { field = ParseDouble(k, v); };
  };
  auto flag = [](bool& field) -> Setter {
    return [&field](const std::string&, const std::string& v) { field = ParseBool(v); };
  };
  const std::map<std::string, Setter> setters = {
      {"dataset.num_classes", size(d.num_classes)},
      {"dataset.dim", size(d.dim)},
      {"dataset.train_per_class", size(d.train_per_class)},
      {"dataset.test_per_class", size(d.test_per_class)},
      {"dataset.minority_class", size(d.minority_class)},
      {"dataset.imbalance_ratio", real(d.imbalance_ratio)},
      {"dataset.mean_radius", real(d.mean_radius)},
      {"dataset.stddev", real(d.stddev)},
      {"dataset.seed",
       [&d](const std::string& k, const std::string& v) { d.seed = ParseUnsigned(k, v); }},
      {"model.hidden",
       [&t](const std::string& k, const std::string& v) {
         t.hidden_layers.clear();
         for (const auto& item : SplitList(v)) t.hidden_layers.push_back(ParseUnsigned(k, item));
       }},
      {"train.objective",
       [&t](const std::string& k, const std::string& v) {
         if (v == "erm") {
           t.objective = Objective::kErm;
         } else if (v == "dro") {
           t.objective = Objective::kDro;
         } else {
           throw ArgumentError("config key " + k + ": expected erm or dro");
         }
       }},
      {"train.beta", real(t.beta)},
      {"train.lr", real(t.lr)},
      {"train.momentum", real(t.momentum)},
      {"train.nesterov", flag(t.nesterov)},
      {"train.batch_size", size(t.batch_size)},
      {"train.epochs", size(t.epochs)},
      {"train.steps", size(t.steps)},
      {"train.seed",
       [&t](const std::string& k, const std::string& v) { t.seed = ParseUnsigned(k, v); }},
      {"train.importance_sampling", flag(t.importance_sampling)},
      {"train.w_min", real(t.w_min)},
      {"train.w_max", real(t.w_max)},
      {"train.with_replacement", flag(t.with_replacement)},
      {"train.schedule",
       [&t](const std::string& k, const std::string& v) {
         if (v == "constant") {
           t.schedule = LrSchedule::kConstant;
         } else if (v == "poly") {
           t.schedule = LrSchedule::kPolyDecay;
         } else {
           throw ArgumentError("config key " + k + ": expected constant or poly");
         }
       }},
      {"train.store_init",
       [&t](const std::string& k, const std::string& v) {
         if (v == "zeros") {
           t.store_init = StoreInit::kZeros;
         } else if (v == "forward") {
           t.store_init = StoreInit::kForwardPass;
         } else {
           throw ArgumentError("config key " + k + ": expected zeros or forward");
         }
       }},
      {"train.loss",
       [&t](const std::string& k, const std::string& v) {
         if (v == "cross_entropy") {
           t.loss_kind = LossKind::kCrossEntropySoftmax;
         } else if (v == "squared_error") {
           t.loss_kind = LossKind::kSquaredError;
         } else {
           throw ArgumentError("config key " + k + ": expected cross_entropy or squared_error");
         }
       }},
      {"train.log_interval", size(t.log_interval)},
      {"train.record_wall_time", flag(t.record_wall_time)},
      {"experiment.arms",
       [&cfg](const std::string&, const std::string& v) {
         cfg.arms.clear();
         for (const auto& item : SplitList(v)) cfg.arms.push_back(ParseArm(item));
       }},
      {"experiment.seeds",
       [&cfg](const std::string& k, const std::string& v) {
         cfg.seeds.clear();
         for (const auto& item : SplitList(v)) cfg.seeds.push_back(ParseUnsigned(k, item));
       }},
      {"experiment.out_dir", [&cfg](const std::string&, const std::string& v) { cfg.out_dir = v; }},
  };
  for (const auto& [key, value] : map.values()) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw ArgumentError("unknown config key '" + key + "'");
    it->second(key, value);
  }
}

std::string CanonicalText(const ExperimentConfig& cfg) {
  const auto& d = cfg.dataset;
  const auto& t = cfg.train;
  std::map<std::string, std::string> kv = {
      {"dataset.num_classes", std::to_string(d.num_classes)},
      {"dataset.dim", std::to_string(d.dim)},
      {"dataset.train_per_class", std::to_string(d.train_per_class)},
      {"dataset.test_per_class", std::to_string(d.test_per_class)},
      {"dataset.minority_class", std::to_string(d.minority_class)},
      {"dataset.imbalance_ratio", Num(d.imbalance_ratio)},
      {"dataset.mean_radius", Num(d.mean_radius)},
      {"dataset.stddev", Num(d.stddev)},
      {"dataset.seed", std::to_string(d.seed)},
      {"model.hidden", JoinSizes(t.hidden_layers)},
      {"train.objective", ObjectiveName(t.objective)},
      {"train.beta", Num(t.beta)},
      {"train.lr", Num(t.lr)},
      {"train.momentum", Num(t.momentum)},
      {"train.nesterov", t.nesterov ? "true" : "false"},
      {"train.batch_size", std::to_string(t.batch_size)},
      {"train.epochs", std::to_string(t.epochs)},
      {"train.steps", std::to_string(t.steps)},
      {"train.seed", std::to_string(t.seed)},
      {"train.importance_sampling", t.importance_sampling ? "true" : "false"},
      {"train.w_min", Num(t.w_min)},
      {"train.w_max", Num(t.w_max)},
      {"train.with_replacement", t.with_replacement ? "true" : "false"},
      {"train.schedule", LrScheduleName(t.schedule)},
      {"train.store_init", StoreInitName(t.store_init)},
      {"train.loss", LossKindName(t.loss_kind)},
      {"train.log_interval", std::to_string(t.log_interval)},
      {"train.record_wall_time", t.record_wall_time ? "true" : "false"},
      {"experiment.out_dir", cfg.out_dir},
  };
  std::string arms;
  for (const auto& a : cfg.arms) {
    if (!arms.empty()) arms += ",";
    arms += a.objective == Objective::kErm ? std::string("erm") : "dro:" + Num(a.beta);
  }
  kv["experiment.arms"] = arms;
  std::string seeds;
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
    seeds += (i ? "," : "") + std::to_string(cfg.seeds[i]);
  }
  kv["experiment.seeds"] = seeds;

  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

std::string ConfigDigest(const ExperimentConfig& cfg) {
  const std::string text = CanonicalText(cfg);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[md[i] >> 4];
    hex += kHex[md[i] & 0xf];
  }
  return hex;
}

}  // namespace dro
