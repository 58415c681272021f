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

// Serial reference kernels against their OpenMP counterparts. Run with
// OMP_NUM_THREADS set to compare thread counts.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "dro/dataset.h"
#include "dro/kernels.h"
#include "dro/tinynet.h"
#include "dro/trainer.h"

namespace {

std::vector<double> Losses(std::size_t n) {
  std::mt19937_64 rng(n);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

template <void (*Softmax)(std::span<const double>, double, std::span<double>)>
void BM_Softmax(benchmark::State& state) {
  const auto x = Losses(static_cast<std::size_t>(state.range(0)));
  std::vector<double> out(x.size());
  for (auto _ : state) {
    Softmax(x, 10.0, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Softmax<dro::kernels::serial::Softmax>)->Name("Softmax/serial")->Range(1 << 10, 1 << 20);
BENCHMARK(BM_Softmax<dro::kernels::parallel::Softmax>)->Name("Softmax/parallel")->Range(1 << 10, 1 << 20);

template <double (*Lse)(std::span<const double>, double)>
void BM_LogSumExp(benchmark::State& state) {
  const auto x = Losses(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Lse(x, 10.0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LogSumExp<dro::kernels::serial::LogSumExp>)->Name("LogSumExp/serial")->Range(1 << 10, 1 << 20);
BENCHMARK(BM_LogSumExp<dro::kernels::parallel::LogSumExp>)->Name("LogSumExp/parallel")->Range(1 << 10, 1 << 20);

struct Fixture {
  dro::SplitDataset data;
  dro::MlpModel model;
  std::vector<std::size_t> batch;
  std::vector<double> weights;

  explicit Fixture(std::size_t batch_size) {
    dro::DatasetSpec spec;
    spec.train_per_class = 500;
    spec.test_per_class = 500;
    data = dro::GenerateDataset(spec);
    model = dro::InitModel({2, 64, 64, 3}, 1);
    for (std::size_t k = 0; k < batch_size; ++k) batch.push_back((k * 37) % data.train.size());
    weights.assign(batch_size, 1.0);
  }
};

void BM_BatchGradientSerial(benchmark::State& state) {
  const Fixture f(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(dro::serial::WeightedBatchGradient(
        f.model, f.data.train, f.batch, f.weights, dro::LossKind::kCrossEntropySoftmax));
  }
}
BENCHMARK(BM_BatchGradientSerial)->Name("BatchGradient/serial")->RangeMultiplier(4)->Range(8, 512);

void BM_BatchGradientParallel(benchmark::State& state) {
  const Fixture f(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(dro::WeightedBatchGradient(f.model, f.data.train, f.batch, f.weights,
                                                        dro::LossKind::kCrossEntropySoftmax));
  }
}
BENCHMARK(BM_BatchGradientParallel)->Name("BatchGradient/parallel")->RangeMultiplier(4)->Range(8, 512);

void BM_EvaluateSerial(benchmark::State& state) {
  const Fixture f(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        dro::serial::Evaluate(f.model, f.data.test, dro::LossKind::kCrossEntropySoftmax));
  }
}
BENCHMARK(BM_EvaluateSerial)->Name("Evaluate/serial");

void BM_EvaluateParallel(benchmark::State& state) {
  const Fixture f(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        dro::Evaluate(f.model, f.data.test, dro::LossKind::kCrossEntropySoftmax));
  }
}
BENCHMARK(BM_EvaluateParallel)->Name("Evaluate/parallel");

}  // namespace

BENCHMARK_MAIN();
