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

// Training loop for hardness weighted sampling (DRO) and the uniform
// sampling baseline (ERM).

#ifndef DRO_TRAINER_H_
#define DRO_TRAINER_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dro/dataset.h"
#include "dro/hardness_sampler.h"
#include "dro/tinynet.h"

namespace dro {

enum class Objective { kErm, kDro };
enum class LrSchedule { kConstant, kPolyDecay };
// Initial stale losses: all zeros, or one forward pass over the training set
// at the initial parameters.
enum class StoreInit { kZeros, kForwardPass };

inline constexpr double kPolyDecayPower = 0.9;

const char* ObjectiveName(Objective o);
const char* LrScheduleName(LrSchedule s);
const char* StoreInitName(StoreInit s);

struct TrainConfig {
  Objective objective = Objective::kDro;
  // Robustness parameter. ERM ignores it for sampling but still uses it for
  // the robust_train_loss and sampler_entropy diagnostics.
  double beta = 1.0;
  double lr = 0.01;
  double momentum = 0.0;
  bool nesterov = false;
  std::size_t batch_size = 32;
  std::size_t epochs = 1;
  // Overrides `epochs` when nonzero.
  std::size_t steps = 0;
  std::uint64_t seed = 0;
  bool importance_sampling = true;
  double w_min = 0.1;
  double w_max = 10.0;
  bool with_replacement = true;
  LrSchedule schedule = LrSchedule::kConstant;
  // With zeros and a large beta, examples never drawn keep a near-zero
  // sampling probability once others report positive losses.
  StoreInit store_init = StoreInit::kZeros;
  LossKind loss_kind = LossKind::kCrossEntropySoftmax;
  std::vector<std::size_t> hidden_layers{64, 64};
  // Steps between metrics records; 0 means ceil(n / batch_size).
  std::size_t log_interval = 0;
  // When false wall_time_ms is recorded as 0, making the metrics stream a
  // pure function of (config, dataset).
  bool record_wall_time = true;

  void Validate(std::size_t n) const;
  std::size_t StepsPerEpoch(std::size_t n) const;
  std::size_t TotalSteps(std::size_t n) const;
  std::size_t LogInterval(std::size_t n) const;
  SamplerConfig Sampler() const;
  std::vector<std::size_t> LayerDims(const Dataset& data) const;
};

struct TrainState {
  MlpModel model;
  StaleLossStore store;
  std::vector<double> velocity;
  std::int64_t step = 0;

  bool operator==(const TrainState&) const = default;
};

struct MetricsRecord {
  std::int64_t step = 0;
  double epoch = 0.0;
  double mean_train_loss = 0.0;
  double robust_train_loss = 0.0;
  double sampler_entropy = 0.0;
  std::vector<double> per_class_accuracy;
  double worst_class_accuracy = 0.0;
  double grad_norm = 0.0;
  double wall_time_ms = 0.0;
};

struct TrainResult {
  TrainState state;
  std::vector<MetricsRecord> metrics;
};

// Fresh state: model from InitModel(config.LayerDims(data), seed), zero
// stale losses, zero velocity.
TrainState InitState(const TrainConfig& config, const Dataset& data);

// Momentum 0: theta -= lr g. Heavy ball: v = mu v - lr g, theta += v.
// Nesterov: v = mu v - lr g, theta += mu v - lr g.
// Throws NumericError when the gradient has a non-finite entry.
void SgdStep(TrainState& state, std::span<const double> gradient, double lr, double momentum,
             bool nesterov);

// Constant: lr. PolyDecay: lr (1 - step / total)^0.9.
double LrAt(LrSchedule schedule, double lr, std::size_t step, std::size_t total);

// Mean loss and per-class accuracy under the argmax rule (ties go to the
// lowest class). A class with no examples reports accuracy 1.
MetricsRecord Evaluate(const MlpModel& model, const Dataset& data, LossKind kind);

TrainResult Train(const TrainConfig& config, const Dataset& data);

// Continues from `state` until config.TotalSteps(n) steps have been taken.
// Throws NumericError naming the step when a loss becomes non-finite.
TrainResult TrainFrom(TrainState state, const TrainConfig& config, const Dataset& data);

namespace serial {

MetricsRecord Evaluate(const MlpModel& model, const Dataset& data, LossKind kind);

}  // namespace serial

// Column list of the metrics CSV, without the per-class columns.
inline constexpr const char* kMetricsCsvColumns =
    "step,epoch,mean_train_loss,robust_train_loss,sampler_entropy,worst_class_acc,grad_norm,"
    "wall_time_ms";

std::string MetricsCsvHeader(std::size_t num_classes);
void WriteMetricsCsv(std::ostream& out, std::span<const MetricsRecord> records,
                     std::size_t num_classes);

}  // namespace dro

#endif  // DRO_TRAINER_H_
