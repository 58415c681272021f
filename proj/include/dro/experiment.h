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

// ERM versus DRO comparison on synthetic imbalanced data, plus the sampler
// overhead benchmark.

#ifndef DRO_EXPERIMENT_H_
#define DRO_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "dro/config.h"
#include "dro/trainer.h"

namespace dro {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunResult {
  std::uint64_t seed = 0;
  bool ok = false;
  // Set when training failed, e.g. on numeric divergence.
  std::string error;
  MetricsRecord train;
  MetricsRecord test;
  std::string curve_path;
};

struct ArmResult {
  ArmSpec arm;
  std::vector<RunResult> runs;
  // Median over successful runs; NaN when every run failed.
  double median_worst_test_accuracy = 0.0;
};

struct ExperimentResult {
  std::vector<ArmResult> arms;
  std::vector<std::uint64_t> seeds;
  std::string config_digest;
  std::vector<std::size_t> train_class_counts;
  std::vector<std::size_t> test_class_counts;
};

// Trains every arm for every seed on one shared dataset realization and
// evaluates the final models on the balanced test split. Runs execute
// concurrently. When cfg.out_dir is set, per-run CSV curves
// (<arm>_seed<seed>.csv) and summary.json are written there. A failing run is
// recorded in its RunResult and does not stop the others.
ExperimentResult RunExperiment(const ExperimentConfig& cfg);

nlohmann::json SummaryJson(const ExperimentResult& result);
// IoError when the file cannot be written.
void EmitSummary(const ExperimentResult& result, const std::string& path);

double Median(std::vector<double> values);

struct SamplerBenchRow {
  std::size_t n = 0;
  std::size_t repetitions = 0;
  // Mean wall time of softmax + batch draw + store update per iteration.
  double mean_us_per_iteration = 0.0;
  // Stale loss floats alone, n * 8.
  std::size_t loss_bytes = 0;
  // Losses, update stamps and the store object, n * 16 + constant.
  std::size_t store_bytes = 0;
};

std::vector<SamplerBenchRow> BenchSamplerOverhead(const std::vector<std::size_t>& ns,
                                                  std::size_t repetitions,
                                                  std::size_t batch_size = 2,
                                                  double beta = 1.0);

}  // namespace dro

#endif  // DRO_EXPERIMENT_H_
