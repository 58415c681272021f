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

#include "dro/experiment.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "dro/dataset.h"
#include "dro/errors.h"

namespace dro {
namespace {

nlohmann::json MetricsJson(const MetricsRecord& m) {
  return {
      {"step", m.step},
      {"epoch", m.epoch},
      {"mean_loss", m.mean_train_loss},
      {"robust_loss", m.robust_train_loss},
      {"sampler_entropy", m.sampler_entropy},
      {"per_class_accuracy", m.per_class_accuracy},
      {"worst_class_accuracy", m.worst_class_accuracy},
      {"grad_norm", m.grad_norm},
      {"wall_time_ms", m.wall_time_ms},
  };
}

}  // namespace

double Median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

ExperimentResult RunExperiment(const ExperimentConfig& cfg) {
  if (cfg.arms.empty()) throw ArgumentError("experiment has no arms");
  if (cfg.seeds.empty()) throw ArgumentError("experiment has no seeds");
  const SplitDataset data = GenerateDataset(cfg.dataset);
  cfg.train.Validate(data.train.size());
  if (!cfg.out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) throw IoError("cannot create " + cfg.out_dir + ": " + ec.message());
  }

  ExperimentResult result;
  result.seeds = cfg.seeds;
  result.config_digest = ConfigDigest(cfg);
  result.train_class_counts = data.train.ClassCounts();
  result.test_class_counts = data.test.ClassCounts();
  result.arms.resize(cfg.arms.size());
  for (std::size_t a = 0; a < cfg.arms.size(); ++a) {
    result.arms[a].arm = cfg.arms[a];
    result.arms[a].runs.resize(cfg.seeds.size());
  }

  const auto jobs = static_cast<std::ptrdiff_t>(cfg.arms.size() * cfg.seeds.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t job = 0; job < jobs; ++job) {
    const std::size_t a = static_cast<std::size_t>(job) / cfg.seeds.size();
    const std::size_t s = static_cast<std::size_t>(job) % cfg.seeds.size();
    const ArmSpec& arm = cfg.arms[a];
    RunResult& run = result.arms[a].runs[s];
    run.seed = cfg.seeds[s];

    TrainConfig tc = cfg.train;
    tc.objective = arm.objective;
    if (arm.objective == Objective::kDro) tc.beta = arm.beta;
    tc.seed = run.seed;
    try {
      const TrainResult tr = Train(tc, data.train);
      run.train = Evaluate(tr.state.model, data.train, tc.loss_kind);
      run.test = Evaluate(tr.state.model, data.test, tc.loss_kind);
      run.train.step = run.test.step = tr.state.step;
      if (!cfg.out_dir.empty()) {
        run.curve_path = (std::filesystem::path(cfg.out_dir) /
                          (arm.name + "_seed" + std::to_string(run.seed) + ".csv"))
                             .string();
        std::ofstream out(run.curve_path);
        if (!out) throw IoError("cannot write " + run.curve_path);
        WriteMetricsCsv(out, tr.metrics, data.train.num_classes);
      }
      run.ok = true;
    } catch (const std::exception& e) {
      run.ok = false;
      run.error = e.what();
    }
  }

  for (auto& arm : result.arms) {
    std::vector<double> worst;
    for (const auto& run : arm.runs) {
      if (run.ok) worst.push_back(run.test.worst_class_accuracy);
    }
    arm.median_worst_test_accuracy = Median(worst);
  }
  if (!cfg.out_dir.empty()) {
    EmitSummary(result, (std::filesystem::path(cfg.out_dir) / "summary.json").string());
  }
  return result;
}

nlohmann::json SummaryJson(const ExperimentResult& result) {
  nlohmann::json arms = nlohmann::json::object();
  for (const auto& arm : result.arms) {
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& run : arm.runs) {
      nlohmann::json r = {{"seed", run.seed}, {"ok", run.ok}};
      if (run.ok) {
        r["train"] = MetricsJson(run.train);
        r["test"] = MetricsJson(run.test);
        if (!run.curve_path.empty()) r["curve"] = run.curve_path;
      } else {
        r["error"] = run.error;
      }
      runs.push_back(std::move(r));
    }
    nlohmann::json entry = {
        {"objective", ObjectiveName(arm.arm.objective)},
        {"runs", std::move(runs)},
    };
    if (arm.arm.objective == Objective::kDro) entry["beta"] = arm.arm.beta;
    if (std::isfinite(arm.median_worst_test_accuracy)) {
      entry["median_worst_class_test_accuracy"] = arm.median_worst_test_accuracy;
    } else {
      entry["median_worst_class_test_accuracy"] = nullptr;
    }
    arms[arm.arm.name] = std::move(entry);
  }
  return {
      {"tool_version", kToolVersion},
      {"config_digest", result.config_digest},
      {"seeds", result.seeds},
      {"train_class_counts", result.train_class_counts},
      {"test_class_counts", result.test_class_counts},
      {"arms", std::move(arms)},
  };
}

void EmitSummary(const ExperimentResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write summary " + path);
  out << SummaryJson(result).dump(2) << '\n';
  if (!out) throw IoError("failed writing summary " + path);
}

}  // namespace dro
