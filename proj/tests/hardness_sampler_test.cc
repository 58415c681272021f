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

#include <gtest/gtest.h>

#include <cmath>

#include "dro/errors.h"
#include "test_util.h"

namespace dro {
namespace {

SamplerConfig Config(double beta, std::size_t b) {
  SamplerConfig c;
  c.beta = RobustnessParam(beta);
  c.batch_size = b;
  return c;
}

std::vector<std::size_t> Frequencies(const StaleLossStore& store, const SamplerConfig& cfg,
                                     std::size_t draws, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::size_t> counts(store.size(), 0);
  std::size_t drawn = 0;
  while (drawn < draws) {
    for (std::size_t i : SampleBatch(store, cfg, rng)) {
      ++counts[i];
      ++drawn;
    }
  }
  return counts;
}

TEST(InitStoreTest, DefaultsToZerosAndUniformFirstDraw) {
  const auto s = InitStore(3);
  EXPECT_EQ(s.losses, (std::vector<double>{0, 0, 0}));
  EXPECT_EQ(s.last_update, (std::vector<std::int64_t>{-1, -1, -1}));
  EXPECT_EQ(s.step, 0);
  for (double p : SamplingDistribution(s, RobustnessParam(1.0)).probs) {
    EXPECT_DOUBLE_EQ(p, 1.0 / 3.0);
  }
}

TEST(InitStoreTest, ConstantInitIsUniform) {
  const std::vector<double> init{5.0, 5.0};
  const auto s = InitStore(2, init);
  for (double p : SamplingDistribution(s, RobustnessParam(3.0)).probs) EXPECT_EQ(p, 0.5);
}

TEST(InitStoreTest, SkewedInitMatchesHighPrecisionSoftmax) {
  const std::vector<double> init{10.0, 0.0};
  const auto p = SamplingDistribution(InitStore(2, init), RobustnessParam(1.0)).probs;
  EXPECT_NEAR(p[0], 0.99995460213129756561, 1e-15);
  EXPECT_NEAR(p[1], 0.000045397868702434394505, 1e-15);
}

TEST(InitStoreTest, RejectsBadInit) {
  const std::vector<double> wrong{1.0};
  EXPECT_THROW(InitStore(2, wrong), ArgumentError);
  const std::vector<double> nan{1.0, NAN};
  EXPECT_THROW(InitStore(2, nan), ArgumentError);
  EXPECT_THROW(InitStore(0), ArgumentError);
}

TEST(SampleBatchTest, SingleExampleAlwaysDrawn) {
  const auto s = InitStore(1);
  Rng rng(1);
  for (std::size_t i : SampleBatch(s, Config(1.0, 16), rng)) EXPECT_EQ(i, 0u);
}

TEST(SampleBatchTest, DominantLossIsAlmostAlwaysDrawn) {
  const std::vector<double> init{50.0, 0.0, 0.0};
  const auto counts = Frequencies(InitStore(3, init), Config(1.0, 10), 10000, 2);
  EXPECT_GE(static_cast<double>(counts[0]) / 10000.0, 0.999);
}

TEST(SampleBatchTest, UniformLossesPassChiSquare) {
  const auto s = InitStore(10);
  const auto counts = Frequencies(s, Config(1.0, 100), 100000, 3);
  const std::vector<double> probs(10, 0.1);
  EXPECT_GT(testing::ChiSquarePValue(counts, probs), 0.01);
}

TEST(SampleBatchTest, FrequenciesMatchSoftmax) {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 5; ++trial) {
    const auto init = testing::RandomVector(gen, 8 + trial, 0.0, 2.0);
    const auto s = InitStore(init.size(), init);
    const auto cfg = Config(1.5, 50);
    const auto counts = Frequencies(s, cfg, 100000, 100 + trial);
    EXPECT_GT(testing::ChiSquarePValue(counts, SamplingDistribution(s, cfg.beta).probs), 0.01);
  }
}

TEST(SampleBatchTest, DeterministicPerSeed) {
  std::mt19937_64 gen(5);
  const auto init = testing::RandomVector(gen, 20, 0.0, 1.0);
  const auto s = InitStore(20, init);
  Rng a(99), b(99);
  for (int k = 0; k < 10; ++k) {
    EXPECT_EQ(SampleBatch(s, Config(2.0, 7), a), SampleBatch(s, Config(2.0, 7), b));
  }
}

TEST(SampleBatchTest, TinyBetaIsUniform) {
  std::mt19937_64 gen(6);
  const auto init = testing::RandomVector(gen, 30, 0.0, 5.0);
  const auto p = SamplingDistribution(InitStore(30, init), RobustnessParam(1e-8)).probs;
  for (double v : p) EXPECT_NEAR(v, 1.0 / 30.0, 1e-6);
}

TEST(SampleBatchTest, WithoutReplacementDrawsDistinct) {
  std::mt19937_64 gen(7);
  const auto init = testing::RandomVector(gen, 6, 0.0, 1.0);
  auto cfg = Config(1.0, 6);
  cfg.with_replacement = false;
  Rng rng(8);
  auto batch = SampleBatch(InitStore(6, init), cfg, rng);
  std::sort(batch.begin(), batch.end());
  EXPECT_EQ(batch, (std::vector<std::size_t>{0, 1, 2, 3, 4, 5}));
}

TEST(SampleBatchTest, WithoutReplacementSurvivesUnderflowedMass) {
  // Only the first entry has representable mass at this beta.
  const std::vector<double> init{100.0, 0.0, 0.0};
  auto cfg = Config(10.0, 3);
  cfg.with_replacement = false;
  Rng rng(1);
  auto batch = SampleBatch(InitStore(3, init), cfg, rng);
  EXPECT_EQ(batch[0], 0u);
  std::sort(batch.begin(), batch.end());
  EXPECT_EQ(batch, (std::vector<std::size_t>{0, 1, 2}));
}

TEST(SampleBatchTest, OversizedBatchWithoutReplacementFails) {
  auto cfg = Config(1.0, 4);
  cfg.with_replacement = false;
  Rng rng(1);
  EXPECT_THROW(SampleBatch(InitStore(3), cfg, rng), ArgumentError);
  cfg.with_replacement = true;
  EXPECT_EQ(SampleBatch(InitStore(3), cfg, rng).size(), 4u);
}

TEST(SamplerConfigTest, WeightBoundsMustBracketOne) {
  auto cfg = Config(1.0, 1);
  cfg.w_min = 1.5;
  EXPECT_THROW(cfg.Validate(3), ArgumentError);
  cfg.w_min = 0.1;
  cfg.w_max = 0.5;
  EXPECT_THROW(cfg.Validate(3), ArgumentError);
  cfg.w_max = 1.0;
  EXPECT_NO_THROW(cfg.Validate(3));
}

TEST(ImportanceWeightsTest, UnchangedLossesGiveUnitWeights) {
  const std::vector<double> init{0.3, 1.2, 2.0};
  const auto s = InitStore(3, init);
  const std::vector<std::size_t> batch{2, 0, 1};
  const std::vector<double> fresh{2.0, 0.3, 1.2};
  for (double w : ImportanceWeights(s, batch, fresh, Config(4.0, 3))) EXPECT_EQ(w, 1.0);
}

TEST(ImportanceWeightsTest, ClipsAtUpperBound) {
  const auto s = InitStore(2);
  const std::vector<std::size_t> batch{0};
  const std::vector<double> fresh{5.0};
  EXPECT_EQ(ImportanceWeights(s, batch, fresh, Config(1.0, 1))[0], 10.0);
}

TEST(ImportanceWeightsTest, UnclippedInsideBounds) {
  const std::vector<double> init{1.0, 1.0};
  const auto s = InitStore(2, init);
  const std::vector<std::size_t> batch{1};
  const std::vector<double> fresh{0.5};
  EXPECT_NEAR(ImportanceWeights(s, batch, fresh, Config(2.0, 1))[0], 0.3678794411714423216,
              1e-15);
}

TEST(ImportanceWeightsTest, AlwaysWithinBounds) {
  std::mt19937_64 gen(10);
  const auto init = testing::RandomVector(gen, 40, 0.0, 5.0);
  const auto s = InitStore(40, init);
  auto cfg = Config(3.0, 40);
  cfg.w_min = 0.2;
  cfg.w_max = 4.0;
  std::vector<std::size_t> batch(40);
  for (std::size_t i = 0; i < 40; ++i) batch[i] = i;
  const auto fresh = testing::RandomVector(gen, 40, 0.0, 5.0);
  for (double w : ImportanceWeights(s, batch, fresh, cfg)) {
    EXPECT_GE(w, 0.2);
    EXPECT_LE(w, 4.0);
  }
}

TEST(UpdateStoreTest, EmptyBatchOnlyAdvancesStep) {
  auto s = InitStore(3);
  const auto before = s;
  UpdateStore(s, {}, {});
  EXPECT_EQ(s.losses, before.losses);
  EXPECT_EQ(s.last_update, before.last_update);
  EXPECT_EQ(s.step, 1);
}

TEST(UpdateStoreTest, PointUpdate) {
  auto s = InitStore(3);
  const std::vector<std::size_t> batch{2};
  const std::vector<double> fresh{7.5};
  UpdateStore(s, batch, fresh);
  EXPECT_EQ(s.losses, (std::vector<double>{0.0, 0.0, 7.5}));
  EXPECT_EQ(s.last_update[2], 1);
  EXPECT_EQ(s.last_update[0], -1);
}

TEST(UpdateStoreTest, DuplicatesLastWriteWins) {
  auto s = InitStore(3);
  const std::vector<std::size_t> batch{1, 1};
  const std::vector<double> fresh{3.0, 4.0};
  UpdateStore(s, batch, fresh);
  EXPECT_EQ(s.losses[1], 4.0);
}

TEST(UpdateStoreTest, OutOfRangeLeavesStoreUntouched) {
  auto s = InitStore(3);
  const auto before = s;
  const std::vector<std::size_t> batch{0, 3};
  const std::vector<double> fresh{1.0, 2.0};
  EXPECT_THROW(UpdateStore(s, batch, fresh), ArgumentError);
  EXPECT_EQ(s, before);
}

TEST(UpdateStoreTest, LastUpdateIsMonotoneAndBoundedByStep) {
  auto s = InitStore(8);
  Rng rng(12);
  auto prev = s.last_update;
  for (int t = 0; t < 200; ++t) {
    const auto batch = SampleBatch(s, Config(1.0, 3), rng);
    const std::vector<double> fresh(batch.size(), static_cast<double>(t % 5));
    UpdateStore(s, batch, fresh);
    for (std::size_t i = 0; i < s.size(); ++i) {
      EXPECT_GE(s.last_update[i], prev[i]);
      EXPECT_LE(s.last_update[i], s.step);
    }
    prev = s.last_update;
  }
}

TEST(StalenessHistogramTest, FreshStoreIsAllNever) {
  const auto h = ComputeStalenessHistogram(InitStore(5));
  EXPECT_EQ(h.never, 5u);
  EXPECT_TRUE(h.by_lag.empty());
}

TEST(StalenessHistogramTest, FullBatchUpdateIsLagZero) {
  auto s = InitStore(4);
  const std::vector<std::size_t> batch{0, 1, 2, 3};
  const std::vector<double> fresh(4, 1.0);
  UpdateStore(s, batch, fresh);
  const auto h = ComputeStalenessHistogram(s);
  EXPECT_EQ(h.never, 0u);
  EXPECT_EQ(h.by_lag.at(0), 4u);
}

TEST(StalenessHistogramTest, RepeatedSingleUpdates) {
  auto s = InitStore(2);
  const std::vector<std::size_t> batch{0};
  const std::vector<double> fresh{1.0};
  for (int k = 0; k < 3; ++k) UpdateStore(s, batch, fresh);
  const auto h = ComputeStalenessHistogram(s);
  EXPECT_EQ(h.never, 1u);
  EXPECT_EQ(h.by_lag.size(), 1u);
  EXPECT_EQ(h.by_lag.at(0), 1u);
}

TEST(StoreMemoryTest, LossArrayBytes) {
  EXPECT_EQ(InitStore(268).loss_bytes(), 2144u);
  EXPECT_EQ(InitStore(268).memory_bytes(), 268u * 16u + sizeof(StaleLossStore));
}

}  // namespace
}  // namespace dro
