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

// Flat key-value configuration files.
//
//   # comment
//   section.key = value
//
// Blank lines and lines starting with '#' are ignored, whitespace around keys
// and values is trimmed, and later assignments override earlier ones. Lists
// are comma separated.

#ifndef DRO_CONFIG_H_
#define DRO_CONFIG_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dro/dataset.h"
#include "dro/trainer.h"

namespace dro {

class ConfigMap {
 public:
  static ConfigMap Parse(const std::string& text);
  // IoError when unreadable, ArgumentError on a malformed line.
  static ConfigMap Load(const std::string& path);

  void Set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool Has(const std::string& key) const { return values_.count(key) > 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

struct ArmSpec {
  std::string name;
  Objective objective = Objective::kErm;
  double beta = 1.0;
};

struct ExperimentConfig {
  DatasetSpec dataset;
  TrainConfig train;
  std::vector<ArmSpec> arms;
  std::vector<std::uint64_t> seeds{0};
  std::string out_dir;
};

// "erm" or "dro:<beta>"; the DRO arm is named dro_beta<beta>.
ArmSpec ParseArm(const std::string& token);

// Applies every key of `map` onto `cfg`. Unknown keys and unparsable values
// throw ArgumentError.
void ApplyConfig(const ConfigMap& map, ExperimentConfig& cfg);

// Sorted `key = value` lines covering every field, the digest input.
std::string CanonicalText(const ExperimentConfig& cfg);
// Hex SHA-256 of CanonicalText.
std::string ConfigDigest(const ExperimentConfig& cfg);

bool ParseBool(const std::string& s);

}  // namespace dro

#endif  // DRO_CONFIG_H_
