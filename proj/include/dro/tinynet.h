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

// Fully connected ReLU network with hand-written backpropagation.

#ifndef DRO_TINYNET_H_
#define DRO_TINYNET_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dro/dataset.h"

namespace dro {

enum class LossKind { kCrossEntropySoftmax, kSquaredError };

const char* LossKindName(LossKind kind);

// Parameters live in one flat vector. Layer l (mapping layer_dims[l] to
// layer_dims[l + 1]) stores its weight matrix row-major (out x in) followed
// by its bias vector. Hidden layers use ReLU, the output layer is affine.
struct MlpModel {
  std::vector<std::size_t> layer_dims;
  std::vector<double> params;

  std::size_t num_layers() const { return layer_dims.size() - 1; }
  std::size_t input_dim() const { return layer_dims.front(); }
  std::size_t output_dim() const { return layer_dims.back(); }
  std::size_t WeightOffset(std::size_t layer) const;
  std::size_t BiasOffset(std::size_t layer) const;

  bool operator==(const MlpModel&) const = default;
};

std::size_t ParameterCount(std::span<const std::size_t> layer_dims);

// Throws ArgumentError on fewer than two dims, a zero dim, a parameter vector
// of the wrong size, or non-finite parameters.
void ValidateModel(const MlpModel& model);

// All-zero parameters.
MlpModel ZeroModel(std::vector<std::size_t> layer_dims);

// Hidden weights ~ N(0, 2 / fan_in), output weights ~ N(0, 1 / d_out),
// biases zero. Bit-identical for a given seed.
MlpModel InitModel(std::vector<std::size_t> layer_dims, std::uint64_t seed);

std::vector<double> Forward(const MlpModel& model, std::span<const double> x);

double PerExampleLoss(const MlpModel& model, std::span<const double> x, const Label& y,
                      LossKind kind);

struct PerExampleGrad {
  std::vector<double> values;
  std::size_t example_index = 0;
};

// Exact reverse-mode gradient; the ReLU derivative at 0 is taken as 0.
PerExampleGrad PerExampleGradient(const MlpModel& model, std::span<const double> x, const Label& y,
                                  LossKind kind, std::size_t example_index = 0);

// Loss and gradient from a single forward/backward pass. `grad` must have
// ParameterCount entries and is overwritten.
double LossAndGradient(const MlpModel& model, std::span<const double> x, const Label& y,
                       LossKind kind, std::span<double> grad);

// Per-example losses and gradients of a batch, gradients row-major
// (batch.size() x num_params).
struct BatchGradients {
  std::vector<double> losses;
  std::vector<double> grads;
  std::size_t num_params = 0;

  std::span<const double> Row(std::size_t k) const {
    return {grads.data() + k * num_params, num_params};
  }
};

// Examples are processed in parallel; results are stored by batch position.
BatchGradients ComputeBatchGradients(const MlpModel& model, const Dataset& data,
                                     std::span<const std::size_t> batch, LossKind kind);

// (1/b) sum_k w_k g_k, accumulated in batch order.
std::vector<double> ReduceWeighted(const BatchGradients& batch_grads, std::span<const double> weights);

std::vector<double> WeightedBatchGradient(const MlpModel& model, const Dataset& data,
                                          std::span<const std::size_t> batch,
                                          std::span<const double> weights, LossKind kind);

namespace serial {

// Single-threaded reference for WeightedBatchGradient.
std::vector<double> WeightedBatchGradient(const MlpModel& model, const Dataset& data,
                                          std::span<const std::size_t> batch,
                                          std::span<const double> weights, LossKind kind);

}  // namespace serial

}  // namespace dro

#endif  // DRO_TINYNET_H_
