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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "dro/kernels.h"
#include "test_util.h"

namespace dro::kernels {
namespace {

using dro::testing::MaxAbsDiff;
using dro::testing::RandomVector;

TEST(KernelsTest, SmallInputsMatchSerialBitwise) {
  std::mt19937_64 rng(1);
  for (std::size_t n : {1u, 2u, 17u, 1000u, 4096u}) {
    const auto x = RandomVector(rng, n, -5.0, 5.0);
    EXPECT_EQ(parallel::MaxValue(x), serial::MaxValue(x));
    EXPECT_EQ(parallel::Sum(x), serial::Sum(x));
    EXPECT_EQ(parallel::LogSumExp(x, 3.0), serial::LogSumExp(x, 3.0));
    std::vector<double> a(n), b(n);
    parallel::Softmax(x, 3.0, a);
    serial::Softmax(x, 3.0, b);
    EXPECT_EQ(a, b);
    EXPECT_EQ(parallel::Entropy(a), serial::Entropy(b));
  }
}

TEST(KernelsTest, LargeInputsAgreeClosely) {
  std::mt19937_64 rng(2);
  const auto x = RandomVector(rng, 100003, -5.0, 5.0);
  EXPECT_EQ(parallel::MaxValue(x), serial::MaxValue(x));
  EXPECT_NEAR(parallel::Sum(x), serial::Sum(x), 1e-9);
  EXPECT_NEAR(parallel::LogSumExp(x, 0.7), serial::LogSumExp(x, 0.7), 1e-12);
  std::vector<double> a(x.size()), b(x.size());
  parallel::Softmax(x, 0.7, a);
  serial::Softmax(x, 0.7, b);
  EXPECT_LE(MaxAbsDiff(a, b), 1e-15);
  EXPECT_NEAR(parallel::Entropy(a), serial::Entropy(b), 1e-10);
  EXPECT_NEAR(parallel::Sum(a), 1.0, 1e-12);
}

TEST(KernelsTest, SoftmaxIsStableForLargeScale) {
  const std::vector<double> x{1000.0, 999.0, -1000.0};
  std::vector<double> p(3);
  parallel::Softmax(x, 10.0, p);
  EXPECT_NEAR(p[0], 1.0 / (1.0 + std::exp(-10.0)), 1e-15);
  EXPECT_EQ(p[2], 0.0);
  EXPECT_NEAR(parallel::LogSumExp(x, 10.0), 10000.0 + std::log1p(std::exp(-10.0)), 1e-9);
}

TEST(KernelsTest, SoftmaxMayAlias) {
  std::vector<double> x{0.0, std::log(3.0)};
  serial::Softmax(x, 1.0, x);
  EXPECT_DOUBLE_EQ(x[0], 0.25);
  EXPECT_DOUBLE_EQ(x[1], 0.75);
}

TEST(KernelsTest, EntropyConventions) {
  EXPECT_EQ(serial::Entropy(std::vector<double>{1.0, 0.0}), 0.0);
  EXPECT_NEAR(serial::Entropy(std::vector<double>{0.5, 0.5}), std::log(2.0), 1e-16);
}

}  // namespace
}  // namespace dro::kernels
