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

#include "dro/hardness_sampler.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "dro/errors.h"

namespace dro {
namespace {

std::size_t DrawInverseCdf(std::span<const double> cumulative, Rng& rng) {
  const double total = cumulative.back();
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double u = uniform(rng) * total;
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it == cumulative.end()) {
    // u rounded up to the total; fall back to the last index with mass.
    it = std::lower_bound(cumulative.begin(), cumulative.end(), total);
  }
  return static_cast<std::size_t>(it - cumulative.begin());
}

void Accumulate(std::span<const double> weights, std::vector<double>& cumulative) {
  double running = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    running += weights[i];
    cumulative[i] = running;
  }
}

}  // namespace

void SamplerConfig::Validate(std::size_t n) const {
  if (batch_size < 1) throw ArgumentError("batch size must be >= 1");
  if (!with_replacement && batch_size > n) {
    throw ArgumentError("batch size " + std::to_string(batch_size) +
                        " exceeds n = " + std::to_string(n) + " without replacement");
  }
  if (!(w_min > 0.0) || !(w_min <= 1.0) || !(w_max >= 1.0)) {
    throw ArgumentError("importance weight bounds must satisfy 0 < w_min <= 1 <= w_max");
  }
}

StaleLossStore InitStore(std::size_t n, std::optional<std::span<const double>> init_losses) {
  if (n == 0) throw ArgumentError("store needs n >= 1");
  StaleLossStore store;
  store.last_update.assign(n, -1);
  if (init_losses) {
    if (init_losses->size() != n) {
      throw ArgumentError("initial loss vector has length " + std::to_string(init_losses->size()) +
                          ", expected " + std::to_string(n));
    }
    for (double v : *init_losses) {
      if (!std::isfinite(v)) throw ArgumentError("initial losses must be finite");
    }
    store.losses.assign(init_losses->begin(), init_losses->end());
  } else {
    store.losses.assign(n, 0.0);
  }
  return store;
}

std::vector<std::size_t> SampleFromDistribution(std::span<const double> probs, std::size_t count,
                                                bool with_replacement, Rng& rng) {
  if (probs.empty()) throw ArgumentError("cannot sample from an empty distribution");
  std::vector<std::size_t> out;
  out.reserve(count);
  std::vector<double> cumulative(probs.size());
  if (with_replacement) {
    Accumulate(probs, cumulative);
    if (!(cumulative.back() > 0.0)) throw NumericError("distribution has no mass");
    for (std::size_t k = 0; k < count; ++k) out.push_back(DrawInverseCdf(cumulative, rng));
    return out;
  }
  if (count > probs.size()) {
    throw ArgumentError("cannot draw " + std::to_string(count) + " of " +
                        std::to_string(probs.size()) + " without replacement");
  }
  std::vector<double> remaining(probs.begin(), probs.end());
  std::vector<bool> used(probs.size(), false);
  for (std::size_t k = 0; k < count; ++k) {
    Accumulate(remaining, cumulative);
    std::size_t idx;
    if (cumulative.back() > 0.0) {
      idx = DrawInverseCdf(cumulative, rng);
    } else {
      // All remaining mass underflowed; take the next unused index.
      idx = static_cast<std::size_t>(std::find(used.begin(), used.end(), false) - used.begin());
    }
    out.push_back(idx);
    used[idx] = true;
    remaining[idx] = 0.0;
  }
  return out;
}

HardnessDistribution SamplingDistribution(const StaleLossStore& store, RobustnessParam beta) {
  return HardnessWeightsKl(store.losses, beta);
}

std::vector<std::size_t> SampleBatch(const StaleLossStore& store, const SamplerConfig& cfg, Rng& rng) {
  cfg.Validate(store.size());
  const auto p = SamplingDistribution(store, cfg.beta);
  return SampleFromDistribution(p.probs, cfg.batch_size, cfg.with_replacement, rng);
}

std::vector<double> ImportanceWeights(const StaleLossStore& store,
                                      std::span<const std::size_t> batch,
                                      std::span<const double> fresh_losses,
                                      const SamplerConfig& cfg) {
  if (batch.size() != fresh_losses.size()) {
    throw ArgumentError("batch and fresh loss sizes differ");
  }
  if (!(cfg.w_min > 0.0) || !(cfg.w_min <= cfg.w_max)) {
    throw ArgumentError("importance weight bounds must satisfy 0 < w_min <= w_max");
  }
  std::vector<double> w(batch.size());
  for (std::size_t k = 0; k < batch.size(); ++k) {
    if (batch[k] >= store.size()) throw ArgumentError("batch index out of range");
    if (!std::isfinite(fresh_losses[k])) throw ArgumentError("fresh loss is not finite");
    const double raw = std::exp(cfg.beta.value() * (fresh_losses[k] - store.losses[batch[k]]));
    w[k] = std::clamp(raw, cfg.w_min, cfg.w_max);
  }
  return w;
}

void UpdateStore(StaleLossStore& store, std::span<const std::size_t> batch,
                 std::span<const double> fresh_losses) {
  if (batch.size() != fresh_losses.size()) {
    throw ArgumentError("batch and fresh loss sizes differ");
  }
  for (std::size_t idx : batch) {
    if (idx >= store.size()) {
      throw ArgumentError("batch index " + std::to_string(idx) + " out of range for n = " +
                          std::to_string(store.size()));
    }
  }
  ++store.step;
  for (std::size_t k = 0; k < batch.size(); ++k) {
    store.losses[batch[k]] = fresh_losses[k];
    store.last_update[batch[k]] = store.step;
  }
}

StalenessHistogram ComputeStalenessHistogram(const StaleLossStore& store) {
  StalenessHistogram h;
  for (std::int64_t t : store.last_update) {
    if (t < 0) {
      ++h.never;
    } else {
      ++h.by_lag[store.step - t];
    }
  }
  return h;
}

}  // namespace dro
