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

#ifndef DRO_DATASET_H_
#define DRO_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dro {

// Per-example supervision. Cross-entropy reads `class_index`; squared error
// reads `target`.
struct Label {
  int class_index = -1;
  std::span<const double> target;
};

// Dense labeled dataset. Features are row-major (size() x dim); targets hold
// the one-hot encoding of the class labels (size() x num_classes).
struct Dataset {
  std::size_t dim = 0;
  std::size_t num_classes = 0;
  std::vector<double> features;
  std::vector<int> labels;
  std::vector<double> targets;

  std::size_t size() const { return labels.size(); }
  std::span<const double> Row(std::size_t i) const { return {features.data() + i * dim, dim}; }
  Label LabelAt(std::size_t i) const {
    return {labels[i], {targets.data() + i * num_classes, num_classes}};
  }
  std::vector<std::size_t> ClassCounts() const;

  void Add(std::span<const double> x, int label);
  bool operator==(const Dataset&) const = default;
};

struct DatasetSpec {
  std::size_t num_classes = 3;
  std::size_t dim = 2;
  std::size_t train_per_class = 1000;
  std::size_t test_per_class = 500;
  // Class whose training examples are subsampled.
  std::size_t minority_class = 2;
  // Fraction of the minority class kept in training, in (0, 1].
  double imbalance_ratio = 1.0;
  // Class k is centred at radius * (cos(2 pi k / K), sin(2 pi k / K), 0, ...)
  // in dim >= 2 and at radius * k in dim 1.
  double mean_radius = 2.0;
  double stddev = 1.0;
  std::uint64_t seed = 0;

  void Validate() const;
  std::vector<double> ClassMean(std::size_t k) const;
  std::size_t MinorityTrainCount() const;
};

struct SplitDataset {
  Dataset train;
  Dataset test;
};

// Isotropic Gaussian blobs. The minority class keeps ceil(ratio * size)
// training points; the test split stays balanced. Deterministic per seed.
SplitDataset GenerateDataset(const DatasetSpec& spec);

}  // namespace dro

#endif  // DRO_DATASET_H_
