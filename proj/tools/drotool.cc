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

// drotool: train, run experiments, benchmark the sampler and inspect
// checkpoints.
//
// Exit codes: 0 success, 1 usage or invalid argument, 2 numeric failure,
// 3 I/O or checkpoint failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dro/checkpoint.h"
#include "dro/config.h"
#include "dro/dataset.h"
#include "dro/errors.h"
#include "dro/experiment.h"
#include "dro/hardness_sampler.h"
#include "dro/trainer.h"

namespace {

using Overrides = std::map<std::string, std::string>;

constexpr int kExitUsage = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitIo = 3;

// Each flag writes the matching config key so that flags and config files
// share one parser and one set of validation rules.
void AddValue(CLI::App* app, Overrides& o, const std::string& flag, const std::string& key,
              const std::string& help) {
  app->add_option_function<std::string>(
      flag, [&o, key](const std::string& v) { o[key] = v; }, help);
}

void AddSwitch(CLI::App* app, Overrides& o, const std::string& flags, const std::string& key,
               const std::string& help) {
  app->add_flag_function(
      flags, [&o, key](std::int64_t count) { o[key] = count > 0 ? "true" : "false"; }, help);
}

void AddDatasetFlags(CLI::App* app, Overrides& o) {
  AddValue(app, o, "--imbalance-ratio", "dataset.imbalance_ratio",
           "fraction of the minority class kept in training");
  AddValue(app, o, "--data-seed", "dataset.seed", "dataset generation seed");
}

void AddTrainFlags(CLI::App* app, Overrides& o) {
  AddValue(app, o, "--beta", "train.beta", "robustness parameter");
  AddValue(app, o, "--lr", "train.lr", "learning rate");
  AddValue(app, o, "--batch-size", "train.batch_size", "minibatch size");
  AddValue(app, o, "--momentum", "train.momentum", "momentum coefficient");
  AddSwitch(app, o, "--nesterov,!--no-nesterov", "train.nesterov", "Nesterov momentum");
  AddSwitch(app, o, "--importance-sampling,!--no-importance-sampling",
            "train.importance_sampling", "importance weight correction");
  AddValue(app, o, "--w-min", "train.w_min", "lower importance weight clip");
  AddValue(app, o, "--w-max", "train.w_max", "upper importance weight clip");
  AddValue(app, o, "--epochs", "train.epochs", "training epochs");
  AddValue(app, o, "--steps", "train.steps", "training steps, overrides --epochs");
  AddValue(app, o, "--seed", "train.seed", "training seed");
  AddValue(app, o, "--schedule", "train.schedule", "constant or poly");
  AddValue(app, o, "--store-init", "train.store_init", "zeros or forward");
  AddDatasetFlags(app, o);
}

dro::ExperimentConfig BuildConfig(const std::string& config_path, const Overrides& o) {
  dro::ConfigMap map;
  if (!config_path.empty()) map = dro::ConfigMap::Load(config_path);
  for (const auto& [k, v] : o) map.Set(k, v);
  dro::ExperimentConfig cfg;
  dro::ApplyConfig(map, cfg);
  return cfg;
}

void PrintMetrics(const char* label, const dro::MetricsRecord& m) {
  std::printf("%s: mean_loss=%.6g worst_class_acc=%.4f per_class=[", label, m.mean_train_loss,
              m.worst_class_accuracy);
  for (std::size_t k = 0; k < m.per_class_accuracy.size(); ++k) {
    std::printf("%s%.4f", k ? ", " : "", m.per_class_accuracy[k]);
  }
  std::printf("]\n");
}

void WriteCsvFile(const std::string& path, const std::vector<dro::MetricsRecord>& records,
                  std::size_t num_classes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw dro::IoError("cannot open " + path + " for writing");
  dro::WriteMetricsCsv(out, records, num_classes);
  if (!out) throw dro::IoError("failed writing " + path);
}

int RunTrain(const dro::ExperimentConfig& cfg, const std::string& resume) {
  const auto data = dro::GenerateDataset(cfg.dataset);
  dro::TrainState state =
      resume.empty() ? dro::InitState(cfg.train, data.train) : dro::LoadCheckpoint(resume);
  const auto result = dro::TrainFrom(std::move(state), cfg.train, data.train);
  std::printf("objective=%s steps=%lld train_examples=%zu\n", dro::ObjectiveName(cfg.train.objective),
              static_cast<long long>(result.state.step), data.train.size());
  PrintMetrics("train", dro::Evaluate(result.state.model, data.train, cfg.train.loss_kind));
  PrintMetrics("test", dro::Evaluate(result.state.model, data.test, cfg.train.loss_kind));
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    const auto dir = std::filesystem::path(cfg.out_dir);
    WriteCsvFile((dir / "metrics.csv").string(), result.metrics, data.train.num_classes);
    dro::SaveCheckpoint(result.state, (dir / "checkpoint.bin").string());
    std::printf("wrote %s and %s\n", (dir / "metrics.csv").c_str(),
                (dir / "checkpoint.bin").c_str());
  }
  return 0;
}

int RunExperimentVerb(const dro::ExperimentConfig& cfg) {
  if (cfg.arms.empty()) throw dro::ArgumentError("experiment.arms is empty");
  const auto result = dro::RunExperiment(cfg);
  std::printf("config_digest=%s\n", result.config_digest.c_str());
  int failures = 0;
  for (const auto& arm : result.arms) {
    std::printf("%-16s median_worst_class_test_accuracy=%.4f runs:", arm.arm.name.c_str(),
                arm.median_worst_test_accuracy);
    for (const auto& run : arm.runs) {
      if (run.ok) {
        std::printf(" %.4f", run.test.worst_class_accuracy);
      } else {
        std::printf(" failed");
        ++failures;
      }
    }
    std::printf("\n");
    for (const auto& run : arm.runs) {
      if (!run.ok) std::fprintf(stderr, "%s seed %llu: %s\n", arm.arm.name.c_str(),
                                static_cast<unsigned long long>(run.seed), run.error.c_str());
    }
  }
  if (!cfg.out_dir.empty()) std::printf("wrote %s/summary.json\n", cfg.out_dir.c_str());
  return failures == 0 ? 0 : kExitNumeric;
}

int RunBench(const std::vector<std::size_t>& ns, std::size_t reps, std::size_t batch,
             double beta) {
  std::printf("%10s %12s %14s %12s %12s\n", "n", "repetitions", "us_per_iter", "loss_bytes",
              "store_bytes");
  for (const auto& row : dro::BenchSamplerOverhead(ns, reps, batch, beta)) {
    std::printf("%10zu %12zu %14.3f %12zu %12zu\n", row.n, row.repetitions,
                row.mean_us_per_iteration, row.loss_bytes, row.store_bytes);
  }
  return 0;
}

int RunEval(const dro::ExperimentConfig& cfg, const std::string& checkpoint) {
  const auto data = dro::GenerateDataset(cfg.dataset);
  const auto state = dro::LoadCheckpoint(checkpoint);
  PrintMetrics("train", dro::Evaluate(state.model, data.train, cfg.train.loss_kind));
  PrintMetrics("test", dro::Evaluate(state.model, data.test, cfg.train.loss_kind));
  return 0;
}

int RunInspect(const std::string& path) {
  const auto state = dro::LoadCheckpoint(path);
  std::printf("layer_dims=[");
  for (std::size_t i = 0; i < state.model.layer_dims.size(); ++i) {
    std::printf("%s%zu", i ? ", " : "", state.model.layer_dims[i]);
  }
  std::printf("]\nparams=%zu\nstep=%lld\nstore_size=%zu\nstore_step=%lld\n",
              state.model.params.size(), static_cast<long long>(state.step), state.store.size(),
              static_cast<long long>(state.store.step));
  std::printf("store_loss_bytes=%zu\nvelocity=%zu\n", state.store.loss_bytes(),
              state.velocity.size());
  const auto hist = dro::ComputeStalenessHistogram(state.store);
  std::printf("never_updated=%zu\n", hist.never);
  for (const auto& [lag, count] : hist.by_lag) {
    std::printf("lag %lld: %zu\n", static_cast<long long>(lag), count);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributionally robust training with hardness-weighted sampling"};
  app.require_subcommand(1);
  app.set_version_flag("--version", dro::kToolVersion);

  Overrides train_o;
  std::string train_config;
  std::string resume;
  auto* train = app.add_subcommand("train", "train one model and report train/test metrics");
  train->add_option("--config", train_config, "config file");
  AddTrainFlags(train, train_o);
  AddValue(train, train_o, "--objective", "train.objective", "erm or dro");
  AddValue(train, train_o, "--out-dir", "experiment.out_dir",
           "directory for metrics.csv and checkpoint.bin");
  train->add_option("--resume", resume, "continue from a checkpoint");

  Overrides exp_o;
  std::string exp_config;
  auto* experiment = app.add_subcommand("experiment", "run every arm over every seed");
  experiment->add_option("--config", exp_config, "config file");
  AddTrainFlags(experiment, exp_o);
  AddValue(experiment, exp_o, "--arms", "experiment.arms", "comma list: erm, dro:<beta>");
  AddValue(experiment, exp_o, "--seeds", "experiment.seeds", "comma list of training seeds");
  AddValue(experiment, exp_o, "--out-dir", "experiment.out_dir",
           "directory for curves and summary.json");

  std::vector<std::size_t> bench_ns{268, 1000, 10000, 100000};
  std::size_t bench_reps = 1000;
  std::size_t bench_batch = 2;
  double bench_beta = 1.0;
  auto* bench = app.add_subcommand("bench", "time softmax + sampling + store update");
  bench->add_option("--n", bench_ns, "dataset sizes")->delimiter(',');
  bench->add_option("--reps", bench_reps, "iterations per size");
  bench->add_option("--batch-size", bench_batch, "examples drawn per iteration");
  bench->add_option("--beta", bench_beta, "robustness parameter");

  Overrides eval_o;
  std::string eval_config;
  std::string eval_checkpoint;
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on the configured dataset");
  eval->add_option("--config", eval_config, "config file");
  eval->add_option("--checkpoint", eval_checkpoint, "checkpoint file")->required();
  AddDatasetFlags(eval, eval_o);

  std::string inspect_path;
  auto* inspect = app.add_subcommand("inspect-checkpoint", "print checkpoint contents");
  inspect->add_option("path", inspect_path, "checkpoint file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*train) return RunTrain(BuildConfig(train_config, train_o), resume);
    if (*experiment) return RunExperimentVerb(BuildConfig(exp_config, exp_o));
    if (*bench) return RunBench(bench_ns, bench_reps, bench_batch, bench_beta);
    if (*eval) return RunEval(BuildConfig(eval_config, eval_o), eval_checkpoint);
    if (*inspect) return RunInspect(inspect_path);
  } catch (const dro::NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return kExitNumeric;
  } catch (const dro::IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kExitIo;
  } catch (const dro::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
