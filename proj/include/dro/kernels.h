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

// Data-parallel vector kernels used by the sampler and the metrics.
//
// Every kernel exists twice: `serial::` is the straightforward loop kept as
// the reference for tests, `parallel::` splits the range into fixed-size
// chunks processed by OpenMP threads. Reductions combine chunk partials in
// chunk order, so the parallel result does not depend on the thread count
// and is bit-identical to the serial one whenever n fits in a single chunk.

#ifndef DRO_KERNELS_H_
#define DRO_KERNELS_H_

#include <cstddef>
#include <span>

namespace dro::kernels {

inline constexpr std::size_t kChunkSize = 4096;

namespace serial {

double MaxValue(std::span<const double> x);
double Sum(std::span<const double> x);
// log(sum_i exp(scale * x_i)), shifted by the maximum.
double LogSumExp(std::span<const double> x, double scale);
// out_i = exp(scale * x_i) / sum_j exp(scale * x_j). `out` may alias `x`.
void Softmax(std::span<const double> x, double scale, std::span<double> out);
// -sum_i p_i log p_i with 0 log 0 = 0.
double Entropy(std::span<const double> p);

}  // namespace serial

namespace parallel {

double MaxValue(std::span<const double> x);
double Sum(std::span<const double> x);
double LogSumExp(std::span<const double> x, double scale);
void Softmax(std::span<const double> x, double scale, std::span<double> out);
double Entropy(std::span<const double> p);

}  // namespace parallel

}  // namespace dro::kernels

#endif  // DRO_KERNELS_H_
