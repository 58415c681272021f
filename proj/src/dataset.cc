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

#include "dro/dataset.h"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "dro/errors.h"

namespace dro {

std::vector<std::size_t> Dataset::ClassCounts() const {
  std::vector<std::size_t> counts(num_classes, 0);
  for (int y : labels) ++counts[static_cast<std::size_t>(y)];
  return counts;
}

void Dataset::Add(std::span<const double> x, int label) {
  if (x.size() != dim) throw ArgumentError("feature dimension mismatch");
  if (label < 0 || static_cast<std::size_t>(label) >= num_classes) {
    throw ArgumentError("label " + std::to_string(label) + " out of range");
  }
  features.insert(features.end(), x.begin(), x.end());
  labels.push_back(label);
  for (std::size_t k = 0; k < num_classes; ++k) {
    targets.push_back(static_cast<int>(k) == label ? 1.0 : 0.0);
  }
}

void DatasetSpec::Validate() const {
  if (num_classes < 1 || dim < 1) throw ArgumentError("dataset needs >= 1 class and dimension");
  if (train_per_class < 1 || test_per_class < 1) throw ArgumentError("class sizes must be >= 1");
  if (minority_class >= num_classes) throw ArgumentError("minority class out of range");
  if (!(imbalance_ratio > 0.0 && imbalance_ratio <= 1.0)) {
    throw ArgumentError("imbalance ratio must lie in (0, 1]");
  }
  if (!(stddev > 0.0) || !std::isfinite(mean_radius)) {
    throw ArgumentError("stddev must be > 0 and radius finite");
  }
}

std::vector<double> DatasetSpec::ClassMean(std::size_t k) const {
  std::vector<double> mean(dim, 0.0);
  if (dim == 1) {
    mean[0] = mean_radius * static_cast<double>(k);
  } else {
    const double angle =
        2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(num_classes);
    mean[0] = mean_radius * std::cos(angle);
    mean[1] = mean_radius * std::sin(angle);
  }
  return mean;
}

std::size_t DatasetSpec::MinorityTrainCount() const {
  // Guard against 0.01 * 1000 landing a hair above 10.
  const double kept = std::ceil(imbalance_ratio * static_cast<double>(train_per_class) - 1e-9);
  return std::max<std::size_t>(1, static_cast<std::size_t>(kept));
}

SplitDataset GenerateDataset(const DatasetSpec& spec) {
  spec.Validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, spec.stddev);

  SplitDataset out;
  for (Dataset* d : {&out.train, &out.test}) {
    d->dim = spec.dim;
    d->num_classes = spec.num_classes;
  }
  std::vector<double> x(spec.dim);
  auto draw = [&](Dataset& d, std::size_t k, std::size_t count, std::size_t keep) {
    const auto mean = spec.ClassMean(k);
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t j = 0; j < spec.dim; ++j) x[j] = mean[j] + noise(rng);
      if (i < keep) d.Add(x, static_cast<int>(k));
    }
  };
  // The full class is always drawn so the random stream, and therefore every
  // other class, is the same for any imbalance ratio.
  for (std::size_t k = 0; k < spec.num_classes; ++k) {
    const std::size_t keep =
        k == spec.minority_class ? spec.MinorityTrainCount() : spec.train_per_class;
    draw(out.train, k, spec.train_per_class, keep);
  }
  for (std::size_t k = 0; k < spec.num_classes; ++k) {
    draw(out.test, k, spec.test_per_class, spec.test_per_class);
  }
  return out;
}

}  // namespace dro
