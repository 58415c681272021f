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

#include "dro/kernels.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "dro/errors.h"

namespace dro::kernels {

namespace serial {

double MaxValue(std::span<const double> x) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : x) m = std::max(m, v);
  return m;
}

double Sum(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s;
}

double LogSumExp(std::span<const double> x, double scale) {
  if (x.empty()) throw ArgumentError("LogSumExp of an empty vector");
  double shift = -std::numeric_limits<double>::infinity();
  for (double v : x) shift = std::max(shift, scale * v);
  double s = 0.0;
  for (double v : x) s += std::exp(scale * v - shift);
  return shift + std::log(s);
}

void Softmax(std::span<const double> x, double scale, std::span<double> out) {
  if (x.empty()) throw ArgumentError("Softmax of an empty vector");
  if (out.size() != x.size()) throw ArgumentError("Softmax output size mismatch");
  double shift = -std::numeric_limits<double>::infinity();
  for (double v : x) shift = std::max(shift, scale * v);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = std::exp(scale * x[i] - shift);
    s += out[i];
  }
  for (double& v : out) v /= s;
}

double Entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

}  // namespace serial

namespace parallel {
namespace {

std::size_t NumChunks(std::size_t n) { return (n + kChunkSize - 1) / kChunkSize; }

// Applies `partial(begin, end)` to every chunk in parallel and returns the
// per-chunk results in chunk order.
template <typename Fn>
std::vector<double> ChunkPartials(std::size_t n, Fn partial) {
  const std::size_t chunks = NumChunks(n);
  std::vector<double> partials(chunks);
  const auto num_chunks = static_cast<std::ptrdiff_t>(chunks);
#pragma omp parallel for schedule(static) if (num_chunks > 1)
  for (std::ptrdiff_t c = 0; c < num_chunks; ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kChunkSize;
    const std::size_t end = std::min(n, begin + kChunkSize);
    partials[static_cast<std::size_t>(c)] = partial(begin, end);
  }
  return partials;
}

double ScaledMax(std::span<const double> x, double scale) {
  const auto partials = ChunkPartials(x.size(), [&](std::size_t b, std::size_t e) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = b; i < e; ++i) m = std::max(m, scale * x[i]);
    return m;
  });
  return serial::MaxValue(partials);
}

}  // namespace

double MaxValue(std::span<const double> x) { return ScaledMax(x, 1.0); }

double Sum(std::span<const double> x) {
  return serial::Sum(ChunkPartials(x.size(), [&](std::size_t b, std::size_t e) {
    return serial::Sum(x.subspan(b, e - b));
  }));
}

double LogSumExp(std::span<const double> x, double scale) {
  if (x.empty()) throw ArgumentError("LogSumExp of an empty vector");
  const double shift = ScaledMax(x, scale);
  const auto partials = ChunkPartials(x.size(), [&](std::size_t b, std::size_t e) {
    double s = 0.0;
    for (std::size_t i = b; i < e; ++i) s += std::exp(scale * x[i] - shift);
    return s;
  });
  return shift + std::log(serial::Sum(partials));
}

void Softmax(std::span<const double> x, double scale, std::span<double> out) {
  if (x.empty()) throw ArgumentError("Softmax of an empty vector");
  if (out.size() != x.size()) throw ArgumentError("Softmax output size mismatch");
  const double shift = ScaledMax(x, scale);
  const auto partials = ChunkPartials(x.size(), [&](std::size_t b, std::size_t e) {
    double s = 0.0;
    for (std::size_t i = b; i < e; ++i) {
      out[i] = std::exp(scale * x[i] - shift);
      s += out[i];
    }
    return s;
  });
  const double total = serial::Sum(partials);
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static) if (n > static_cast<std::ptrdiff_t>(kChunkSize))
  for (std::ptrdiff_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] /= total;
}

double Entropy(std::span<const double> p) {
  return serial::Sum(ChunkPartials(p.size(), [&](std::size_t b, std::size_t e) {
    return serial::Entropy(p.subspan(b, e - b));
  }));
}

}  // namespace parallel

}  // namespace dro::kernels
