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

#include "dro/tinynet.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>
#include <string>

#include "dro/errors.h"

namespace dro {
namespace {

// Pre-activations of every layer and post-activations of every layer input.
struct ForwardTrace {
  std::vector<std::vector<double>> inputs;  // inputs[l] feeds layer l
  std::vector<std::vector<double>> pre;     // pre[l] = W_l inputs[l] + b_l
};

void CheckInput(const MlpModel& model, std::span<const double> x) {
  if (x.size() != model.input_dim()) {
    throw ArgumentError("input has dimension " + std::to_string(x.size()) + ", model expects " +
                        std::to_string(model.input_dim()));
  }
}

void CheckLabel(const MlpModel& model, const Label& y, LossKind kind) {
  if (kind == LossKind::kCrossEntropySoftmax) {
    if (y.class_index < 0 || static_cast<std::size_t>(y.class_index) >= model.output_dim()) {
      throw ArgumentError("class index " + std::to_string(y.class_index) + " out of range");
    }
  } else {
    if (y.target.size() != model.output_dim()) {
      throw ArgumentError("regression target has wrong dimension");
    }
    for (double v : y.target) {
      if (!std::isfinite(v)) throw ArgumentError("regression target is not finite");
    }
  }
}

ForwardTrace Trace(const MlpModel& model, std::span<const double> x) {
  const std::size_t layers = model.num_layers();
  ForwardTrace t;
  t.inputs.resize(layers);
  t.pre.resize(layers);
  t.inputs[0].assign(x.begin(), x.end());
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = model.layer_dims[l];
    const std::size_t out = model.layer_dims[l + 1];
    const double* w = model.params.data() + model.WeightOffset(l);
    const double* b = model.params.data() + model.BiasOffset(l);
    const auto& a = t.inputs[l];
    auto& z = t.pre[l];
    z.resize(out);
    for (std::size_t o = 0; o < out; ++o) {
      double s = b[o];
      const double* row = w + o * in;
      for (std::size_t i = 0; i < in; ++i) s += row[i] * a[i];
      z[o] = s;
    }
    if (l + 1 < layers) {
      auto& next = t.inputs[l + 1];
      next.resize(out);
      for (std::size_t o = 0; o < out; ++o) next[o] = z[o] > 0.0 ? z[o] : 0.0;
    }
  }
  return t;
}

// Loss value and dL/dlogits.
double OutputLoss(std::span<const double> logits, const Label& y, LossKind kind,
                  std::vector<double>* dlogits) {
  if (dlogits) dlogits->resize(logits.size());
  if (kind == LossKind::kSquaredError) {
    double loss = 0.0;
    for (std::size_t k = 0; k < logits.size(); ++k) {
      const double r = logits[k] - y.target[k];
      loss += 0.5 * r * r;
      if (dlogits) (*dlogits)[k] = r;
    }
    return loss;
  }
  const double shift = *std::max_element(logits.begin(), logits.end());
  double s = 0.0;
  for (double z : logits) s += std::exp(z - shift);
  const double lse = shift + std::log(s);
  const auto label = static_cast<std::size_t>(y.class_index);
  if (dlogits) {
    for (std::size_t k = 0; k < logits.size(); ++k) {
      (*dlogits)[k] = std::exp(logits[k] - lse) - (k == label ? 1.0 : 0.0);
    }
  }
  return std::max(0.0, lse - logits[label]);
}

}  // namespace

const char* LossKindName(LossKind kind) {
  return kind == LossKind::kCrossEntropySoftmax ? "cross_entropy" : "squared_error";
}

std::size_t MlpModel::WeightOffset(std::size_t layer) const {
  std::size_t off = 0;
  for (std::size_t l = 0; l < layer; ++l) {
    off += (layer_dims[l] + 1) * layer_dims[l + 1];
  }
  return off;
}

std::size_t MlpModel::BiasOffset(std::size_t layer) const {
  return WeightOffset(layer) + layer_dims[layer] * layer_dims[layer + 1];
}

std::size_t ParameterCount(std::span<const std::size_t> layer_dims) {
  std::size_t count = 0;
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    count += (layer_dims[l] + 1) * layer_dims[l + 1];
  }
  return count;
}

void ValidateModel(const MlpModel& model) {
  if (model.layer_dims.size() < 2) throw ArgumentError("a model needs at least two layer dims");
  for (std::size_t d : model.layer_dims) {
    if (d == 0) throw ArgumentError("layer dims must be positive");
  }
  if (model.params.size() != ParameterCount(model.layer_dims)) {
    throw ArgumentError("parameter vector does not match layer dims");
  }
  for (double v : model.params) {
    if (!std::isfinite(v)) throw ArgumentError("model has non-finite parameters");
  }
}

MlpModel ZeroModel(std::vector<std::size_t> layer_dims) {
  MlpModel m;
  m.layer_dims = std::move(layer_dims);
  if (m.layer_dims.size() < 2) throw ArgumentError("a model needs at least two layer dims");
  for (std::size_t d : m.layer_dims) {
    if (d == 0) throw ArgumentError("layer dims must be positive");
  }
  m.params.assign(ParameterCount(m.layer_dims), 0.0);
  return m;
}

MlpModel InitModel(std::vector<std::size_t> layer_dims, std::uint64_t seed) {
  MlpModel m = ZeroModel(std::move(layer_dims));
  std::mt19937_64 rng(seed);
  const std::size_t layers = m.num_layers();
  for (std::size_t l = 0; l < layers; ++l) {
    const bool output = l + 1 == layers;
    const double variance = output ? 1.0 / static_cast<double>(m.output_dim())
                                   : 2.0 / static_cast<double>(m.layer_dims[l]);
    std::normal_distribution<double> dist(0.0, std::sqrt(variance));
    const std::size_t begin = m.WeightOffset(l);
    const std::size_t end = m.BiasOffset(l);
    for (std::size_t i = begin; i < end; ++i) m.params[i] = dist(rng);
  }
  return m;
}

std::vector<double> Forward(const MlpModel& model, std::span<const double> x) {
  CheckInput(model, x);
  return std::move(Trace(model, x).pre.back());
}

double PerExampleLoss(const MlpModel& model, std::span<const double> x, const Label& y,
                      LossKind kind) {
  CheckInput(model, x);
  CheckLabel(model, y, kind);
  const auto logits = Forward(model, x);
  return OutputLoss(logits, y, kind, nullptr);
}

double LossAndGradient(const MlpModel& model, std::span<const double> x, const Label& y,
                       LossKind kind, std::span<double> grad) {
  CheckInput(model, x);
  CheckLabel(model, y, kind);
  if (grad.size() != model.params.size()) throw ArgumentError("gradient buffer has wrong size");
  const ForwardTrace t = Trace(model, x);
  std::vector<double> delta;
  const double loss = OutputLoss(t.pre.back(), y, kind, &delta);

  std::vector<double> prev;
  for (std::size_t l = model.num_layers(); l-- > 0;) {
    const std::size_t in = model.layer_dims[l];
    const std::size_t out = model.layer_dims[l + 1];
    const auto& a = t.inputs[l];
    double* gw = grad.data() + model.WeightOffset(l);
    double* gb = grad.data() + model.BiasOffset(l);
    for (std::size_t o = 0; o < out; ++o) {
      for (std::size_t i = 0; i < in; ++i) gw[o * in + i] = delta[o] * a[i];
      gb[o] = delta[o];
    }
    if (l == 0) break;
    const double* w = model.params.data() + model.WeightOffset(l);
    const auto& z_below = t.pre[l - 1];
    prev.assign(in, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      const double d = delta[o];
      const double* row = w + o * in;
      for (std::size_t i = 0; i < in; ++i) prev[i] += row[i] * d;
    }
    for (std::size_t i = 0; i < in; ++i) {
      if (!(z_below[i] > 0.0)) prev[i] = 0.0;
    }
    delta.swap(prev);
  }
  return loss;
}

PerExampleGrad PerExampleGradient(const MlpModel& model, std::span<const double> x, const Label& y,
                                  LossKind kind, std::size_t example_index) {
  PerExampleGrad g{std::vector<double>(model.params.size()), example_index};
  LossAndGradient(model, x, y, kind, g.values);
  return g;
}

BatchGradients ComputeBatchGradients(const MlpModel& model, const Dataset& data,
                                     std::span<const std::size_t> batch, LossKind kind) {
  for (std::size_t idx : batch) {
    if (idx >= data.size()) throw ArgumentError("batch index out of range");
  }
  BatchGradients out;
  out.num_params = model.params.size();
  out.losses.resize(batch.size());
  out.grads.resize(batch.size() * out.num_params);
  const auto b = static_cast<std::ptrdiff_t>(batch.size());
  // Exceptions must not escape the parallel region; capture the first one.
  std::exception_ptr error;
#pragma omp parallel for schedule(static) if (b > 1)
  for (std::ptrdiff_t k = 0; k < b; ++k) {
    const auto row = static_cast<std::size_t>(k);
    try {
      const std::size_t idx = batch[row];
      out.losses[row] = LossAndGradient(
          model, data.Row(idx), data.LabelAt(idx), kind,
          std::span<double>(out.grads.data() + row * out.num_params, out.num_params));
    } catch (...) {
#pragma omp critical(dro_batch_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

std::vector<double> ReduceWeighted(const BatchGradients& batch_grads, std::span<const double> weights) {
  if (weights.size() != batch_grads.losses.size()) {
    throw ArgumentError("weight vector length " + std::to_string(weights.size()) +
                        " does not match batch size " + std::to_string(batch_grads.losses.size()));
  }
  std::vector<double> g(batch_grads.num_params, 0.0);
  if (weights.empty()) return g;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const auto row = batch_grads.Row(k);
    const double w = weights[k];
    for (std::size_t j = 0; j < g.size(); ++j) g[j] += w * row[j];
  }
  const double inv_b = 1.0 / static_cast<double>(weights.size());
  for (double& v : g) v *= inv_b;
  return g;
}

std::vector<double> WeightedBatchGradient(const MlpModel& model, const Dataset& data,
                                          std::span<const std::size_t> batch,
                                          std::span<const double> weights, LossKind kind) {
  if (weights.size() != batch.size()) throw ArgumentError("weights and batch lengths differ");
  return ReduceWeighted(ComputeBatchGradients(model, data, batch, kind), weights);
}

namespace serial {

std::vector<double> WeightedBatchGradient(const MlpModel& model, const Dataset& data,
                                          std::span<const std::size_t> batch,
                                          std::span<const double> weights, LossKind kind) {
  if (weights.size() != batch.size()) throw ArgumentError("weights and batch lengths differ");
  std::vector<double> g(model.params.size(), 0.0);
  std::vector<double> scratch(model.params.size());
  for (std::size_t k = 0; k < batch.size(); ++k) {
    if (batch[k] >= data.size()) throw ArgumentError("batch index out of range");
    LossAndGradient(model, data.Row(batch[k]), data.LabelAt(batch[k]), kind, scratch);
    for (std::size_t j = 0; j < g.size(); ++j) g[j] += weights[k] * scratch[j];
  }
  if (batch.empty()) return g;
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  for (double& v : g) v *= inv_b;
  return g;
}

}  // namespace serial

}  // namespace dro
