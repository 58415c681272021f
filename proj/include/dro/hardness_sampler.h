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

// Stale per-example loss store and hardness weighted minibatch sampling.

#ifndef DRO_HARDNESS_SAMPLER_H_
#define DRO_HARDNESS_SAMPLER_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "dro/phi_divergence.h"

namespace dro {

using Rng = std::mt19937_64;

// One stale loss per training example plus the step at which it was last
// refreshed. `last_update[i] == -1` means example i has never been sampled.
struct StaleLossStore {
  std::vector<double> losses;
  std::vector<std::int64_t> last_update;
  std::int64_t step = 0;

  std::size_t size() const { return losses.size(); }
  // Bytes held by the per-example arrays.
  std::size_t loss_bytes() const { return losses.size() * sizeof(double); }
  std::size_t memory_bytes() const {
    return sizeof(StaleLossStore) + losses.size() * sizeof(double) +
           last_update.size() * sizeof(std::int64_t);
  }

  bool operator==(const StaleLossStore&) const = default;
};

struct SamplerConfig {
  RobustnessParam beta{1.0};
  std::size_t batch_size = 1;
  bool with_replacement = true;
  bool importance_sampling = true;
  double w_min = 0.1;
  double w_max = 10.0;

  // Throws ArgumentError unless 1 <= batch_size, w_min > 0 and
  // w_min <= 1 <= w_max; batch_size <= n is required without replacement.
  void Validate(std::size_t n) const;
};

// Zero losses when `init_losses` is absent, which makes the first draw uniform.
StaleLossStore InitStore(std::size_t n, std::optional<std::span<const double>> init_losses = {});

// Draws `count` indices from `probs` by inverse CDF over its cumulative sums.
// Without replacement every draw removes the chosen index and renormalizes.
std::vector<std::size_t> SampleFromDistribution(std::span<const double> probs, std::size_t count,
                                                bool with_replacement, Rng& rng);

// Current sampling distribution softmax(beta * store.losses).
HardnessDistribution SamplingDistribution(const StaleLossStore& store, RobustnessParam beta);

std::vector<std::size_t> SampleBatch(const StaleLossStore& store, const SamplerConfig& cfg, Rng& rng);

// clip(exp(beta (fresh - stale)), [w_min, w_max]) for each batch element.
std::vector<double> ImportanceWeights(const StaleLossStore& store,
                                      std::span<const std::size_t> batch,
                                      std::span<const double> fresh_losses,
                                      const SamplerConfig& cfg);

// Writes the fresh losses into the store. The step counter advances once per
// call and every touched entry is stamped with the new step. Duplicate
// indices resolve by last write.
void UpdateStore(StaleLossStore& store, std::span<const std::size_t> batch,
                 std::span<const double> fresh_losses);

struct StalenessHistogram {
  // lag = step - last_update -> number of examples.
  std::map<std::int64_t, std::size_t> by_lag;
  std::size_t never = 0;
};

StalenessHistogram ComputeStalenessHistogram(const StaleLossStore& store);

}  // namespace dro

#endif  // DRO_HARDNESS_SAMPLER_H_
