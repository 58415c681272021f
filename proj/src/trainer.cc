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

#include "dro/trainer.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "dro/errors.h"
#include "dro/kernels.h"
#include "dro/phi_divergence.h"

namespace dro {
namespace {

constexpr std::uint64_t kSamplerStreamSalt = 0x9e3779b97f4a7c15ULL;

struct ExampleOutcome {
  double loss = 0.0;
  int predicted = 0;
};

ExampleOutcome Score(const MlpModel& model, const Dataset& data, std::size_t i, LossKind kind) {
  const auto logits = Forward(model, data.Row(i));
  const auto label = data.LabelAt(i);
  ExampleOutcome r;
  r.predicted =
      static_cast<int>(std::max_element(logits.begin(), logits.end()) - logits.begin());
  r.loss = PerExampleLoss(model, data.Row(i), label, kind);
  return r;
}

MetricsRecord Summarize(const Dataset& data, std::span<const ExampleOutcome> outcomes) {
  MetricsRecord m;
  std::vector<std::size_t> total(data.num_classes, 0);
  std::vector<std::size_t> correct(data.num_classes, 0);
  double loss_sum = 0.0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    loss_sum += outcomes[i].loss;
    const auto y = static_cast<std::size_t>(data.labels[i]);
    ++total[y];
    if (outcomes[i].predicted == data.labels[i]) ++correct[y];
  }
  m.mean_train_loss = outcomes.empty() ? 0.0 : loss_sum / static_cast<double>(outcomes.size());
  m.per_class_accuracy.resize(data.num_classes);
  for (std::size_t k = 0; k < data.num_classes; ++k) {
    m.per_class_accuracy[k] =
        total[k] == 0 ? 1.0 : static_cast<double>(correct[k]) / static_cast<double>(total[k]);
  }
  m.worst_class_accuracy =
      m.per_class_accuracy.empty()
          ? 0.0
          : *std::min_element(m.per_class_accuracy.begin(), m.per_class_accuracy.end());
  return m;
}

double Norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

const char* ObjectiveName(Objective o) { return o == Objective::kErm ? "erm" : "dro"; }

const char* LrScheduleName(LrSchedule s) {
  return s == LrSchedule::kConstant ? "constant" : "poly";
}

const char* StoreInitName(StoreInit s) { return s == StoreInit::kZeros ? "zeros" : "forward"; }

void TrainConfig::Validate(std::size_t n) const {
  if (n == 0) throw ArgumentError("training set is empty");
  RobustnessParam{beta};
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ArgumentError("learning rate must be > 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ArgumentError("momentum must lie in [0, 1)");
  if (batch_size < 1) throw ArgumentError("batch size must be >= 1");
  for (std::size_t h : hidden_layers) {
    if (h == 0) throw ArgumentError("hidden layer widths must be positive");
  }
  Sampler().Validate(n);
}

std::size_t TrainConfig::StepsPerEpoch(std::size_t n) const {
  return (n + batch_size - 1) / batch_size;
}

std::size_t TrainConfig::TotalSteps(std::size_t n) const {
  return steps > 0 ? steps : epochs * StepsPerEpoch(n);
}

std::size_t TrainConfig::LogInterval(std::size_t n) const {
  return log_interval > 0 ? log_interval : StepsPerEpoch(n);
}

SamplerConfig TrainConfig::Sampler() const {
  SamplerConfig s;
  s.beta = RobustnessParam(beta);
  s.batch_size = batch_size;
  s.with_replacement = with_replacement;
  s.importance_sampling = importance_sampling;
  s.w_min = w_min;
  s.w_max = w_max;
  return s;
}

std::vector<std::size_t> TrainConfig::LayerDims(const Dataset& data) const {
  std::vector<std::size_t> dims{data.dim};
  dims.insert(dims.end(), hidden_layers.begin(), hidden_layers.end());
  dims.push_back(data.num_classes);
  return dims;
}

TrainState InitState(const TrainConfig& config, const Dataset& data) {
  TrainState s;
  s.model = InitModel(config.LayerDims(data), config.seed);
  if (config.store_init == StoreInit::kForwardPass) {
    const auto n = static_cast<std::ptrdiff_t>(data.size());
    std::vector<double> losses(data.size());
#pragma omp parallel for schedule(static) if (n > 256)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      losses[k] = PerExampleLoss(s.model, data.Row(k), data.LabelAt(k), config.loss_kind);
    }
    s.store = InitStore(data.size(), losses);
  } else {
    s.store = InitStore(data.size());
  }
  s.velocity.assign(s.model.params.size(), 0.0);
  return s;
}

void SgdStep(TrainState& state, std::span<const double> gradient, double lr, double momentum,
             bool nesterov) {
  auto& theta = state.model.params;
  if (gradient.size() != theta.size()) {
    throw ArgumentError("gradient length " + std::to_string(gradient.size()) +
                        " does not match parameter count " + std::to_string(theta.size()));
  }
  for (std::size_t j = 0; j < gradient.size(); ++j) {
    if (!std::isfinite(gradient[j])) {
      throw NumericError("non-finite gradient entry " + std::to_string(j) + " at step " +
                         std::to_string(state.step));
    }
  }
  if (state.velocity.size() != theta.size()) state.velocity.assign(theta.size(), 0.0);
  if (momentum == 0.0) {
    for (std::size_t j = 0; j < theta.size(); ++j) theta[j] -= lr * gradient[j];
  } else {
    auto& v = state.velocity;
    for (std::size_t j = 0; j < theta.size(); ++j) {
      v[j] = momentum * v[j] - lr * gradient[j];
      theta[j] += nesterov ? momentum * v[j] - lr * gradient[j] : v[j];
    }
  }
  ++state.step;
}

double LrAt(LrSchedule schedule, double lr, std::size_t step, std::size_t total) {
  if (schedule == LrSchedule::kConstant || total == 0) return lr;
  const double frac = std::min(1.0, static_cast<double>(step) / static_cast<double>(total));
  return lr * std::pow(1.0 - frac, kPolyDecayPower);
}

MetricsRecord Evaluate(const MlpModel& model, const Dataset& data, LossKind kind) {
  std::vector<ExampleOutcome> outcomes(data.size());
  const auto n = static_cast<std::ptrdiff_t>(data.size());
#pragma omp parallel for schedule(static) if (n > 256)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    outcomes[static_cast<std::size_t>(i)] = Score(model, data, static_cast<std::size_t>(i), kind);
  }
  return Summarize(data, outcomes);
}

namespace serial {

MetricsRecord Evaluate(const MlpModel& model, const Dataset& data, LossKind kind) {
  std::vector<ExampleOutcome> outcomes;
  outcomes.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) outcomes.push_back(Score(model, data, i, kind));
  return Summarize(data, outcomes);
}

}  // namespace serial

TrainResult Train(const TrainConfig& config, const Dataset& data) {
  config.Validate(data.size());
  return TrainFrom(InitState(config, data), config, data);
}

TrainResult TrainFrom(TrainState state, const TrainConfig& config, const Dataset& data) {
  const std::size_t n = data.size();
  config.Validate(n);
  if (state.store.size() != n) throw ArgumentError("state does not match the dataset size");
  if (state.model.input_dim() != data.dim || state.model.output_dim() != data.num_classes) {
    throw ArgumentError("model dimensions do not match the dataset");
  }

  const std::size_t total = config.TotalSteps(n);
  const std::size_t interval = config.LogInterval(n);
  const SamplerConfig sampler = config.Sampler();
  const RobustnessParam beta(config.beta);
  const auto kl = PhiDivergence::Kl(n);
  const bool dro = config.objective == Objective::kDro;
  const std::vector<double> uniform(n, 1.0 / static_cast<double>(n));
  Rng rng(config.seed ^ kSamplerStreamSalt);
  const auto start = std::chrono::steady_clock::now();

  TrainResult result;
  double grad_norm = 0.0;
  while (static_cast<std::size_t>(state.step) < total) {
    const auto t = static_cast<std::size_t>(state.step);
    // ERM draws through the same inverse-CDF path with uniform probabilities,
    // so a DRO run with beta -> 0 consumes the random stream identically.
    const auto batch =
        dro ? SampleBatch(state.store, sampler, rng)
            : SampleFromDistribution(uniform, config.batch_size, config.with_replacement, rng);

    const BatchGradients fresh = ComputeBatchGradients(state.model, data, batch, config.loss_kind);
    for (std::size_t k = 0; k < fresh.losses.size(); ++k) {
      if (!std::isfinite(fresh.losses[k])) {
        throw NumericError("non-finite loss for example " + std::to_string(batch[k]) +
                           " at step " + std::to_string(t));
      }
    }
    const std::vector<double> weights =
        dro && config.importance_sampling
            ? ImportanceWeights(state.store, batch, fresh.losses, sampler)
            : std::vector<double>(batch.size(), 1.0);
    UpdateStore(state.store, batch, fresh.losses);

    const std::vector<double> g = ReduceWeighted(fresh, weights);
    grad_norm = Norm2(g);
    SgdStep(state, g, LrAt(config.schedule, config.lr, t, total), config.momentum,
            config.nesterov);

    const auto done = static_cast<std::size_t>(state.step);
    if (done % interval == 0 || done == total) {
      MetricsRecord m = Evaluate(state.model, data, config.loss_kind);
      m.step = state.step;
      m.epoch = static_cast<double>(done * config.batch_size) / static_cast<double>(n);
      m.mean_train_loss = kernels::parallel::Sum(state.store.losses) / static_cast<double>(n);
      m.robust_train_loss = RobustLoss(state.store.losses, beta, kl);
      m.sampler_entropy =
          kernels::parallel::Entropy(SamplingDistribution(state.store, beta).probs);
      m.grad_norm = grad_norm;
      if (config.record_wall_time) {
        m.wall_time_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - start)
                             .count();
      }
      result.metrics.push_back(std::move(m));
    }
  }
  result.state = std::move(state);
  return result;
}

std::string MetricsCsvHeader(std::size_t num_classes) {
  std::string h = kMetricsCsvColumns;
  for (std::size_t k = 0; k < num_classes; ++k) h += ",class_acc_" + std::to_string(k);
  return h;
}

void WriteMetricsCsv(std::ostream& out, std::span<const MetricsRecord> records,
                     std::size_t num_classes) {
  out << MetricsCsvHeader(num_classes) << '\n';
  for (const auto& r : records) {
    out << r.step << ',' << FormatDouble(r.epoch) << ',' << FormatDouble(r.mean_train_loss) << ','
        << FormatDouble(r.robust_train_loss) << ',' << FormatDouble(r.sampler_entropy) << ','
        << FormatDouble(r.worst_class_accuracy) << ',' << FormatDouble(r.grad_norm) << ','
        << FormatDouble(r.wall_time_ms);
    for (std::size_t k = 0; k < num_classes; ++k) {
      out << ',' << FormatDouble(k < r.per_class_accuracy.size() ? r.per_class_accuracy[k] : 0.0);
    }
    out << '\n';
  }
}

}  // namespace dro
