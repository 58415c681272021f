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

#ifndef DRO_TESTS_TEST_UTIL_H_
#define DRO_TESTS_TEST_UTIL_H_

#include <boost/math/distributions/chi_squared.hpp>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "dro/dataset.h"
#include "dro/tinynet.h"

namespace dro::testing {

inline std::vector<double> RandomVector(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

inline double MaxAbsDiff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double Norm2(std::span<const double> a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return std::sqrt(s);
}

// Pearson chi-square goodness of fit of observed counts against expected
// probabilities. Cells with zero expected mass must have zero counts and are
// dropped; returns the upper-tail p-value.
inline double ChiSquarePValue(std::span<const std::size_t> counts, std::span<const double> probs) {
  std::size_t total = 0;
  for (std::size_t c : counts) total += c;
  double stat = 0.0;
  int cells = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double expected = probs[i] * static_cast<double>(total);
    if (expected <= 0.0) {
      if (counts[i] != 0) return 0.0;
      continue;
    }
    const double d = static_cast<double>(counts[i]) - expected;
    stat += d * d / expected;
    ++cells;
  }
  if (cells < 2) return 1.0;
  boost::math::chi_squared dist(cells - 1);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

// Small random classification set for gradient and trainer tests.
inline Dataset RandomClassification(std::mt19937_64& rng, std::size_t n, std::size_t dim,
                                    std::size_t classes) {
  Dataset d;
  d.dim = dim;
  d.num_classes = classes;
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> x(dim);
  for (std::size_t i = 0; i < n; ++i) {
    const int y = static_cast<int>(i % classes);
    for (std::size_t j = 0; j < dim; ++j) x[j] = g(rng) + (j == static_cast<std::size_t>(y) ? 2.0 : 0.0);
    d.Add(x, y);
  }
  return d;
}

// Largest per-coordinate relative error between the analytic gradient and
// central finite differences of the loss, |fd - g| / max(|fd|, |g|, floor).
inline double GradientCheckError(const MlpModel& model, std::span<const double> x, const Label& y,
                                 LossKind kind, double step = 1e-6, double floor = 1e-4) {
  const auto g = PerExampleGradient(model, x, y, kind).values;
  MlpModel probe = model;
  double worst = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double saved = probe.params[j];
    probe.params[j] = saved + step;
    const double up = PerExampleLoss(probe, x, y, kind);
    probe.params[j] = saved - step;
    const double down = PerExampleLoss(probe, x, y, kind);
    probe.params[j] = saved;
    const double fd = (up - down) / (2.0 * step);
    const double scale = std::max({std::abs(fd), std::abs(g[j]), floor});
    worst = std::max(worst, std::abs(fd - g[j]) / scale);
  }
  return worst;
}

// He-initialised net with N(0, 0.1^2) biases. Zero biases can leave a hidden
// unit exactly on the ReLU kink, where finite differences see half a slope.
inline MlpModel RandomNet(std::mt19937_64& rng, std::vector<std::size_t> dims) {
  MlpModel m = InitModel(dims, rng());
  std::normal_distribution<double> bias(0.0, 0.1);
  for (std::size_t l = 0; l < m.num_layers(); ++l) {
    for (std::size_t o = 0; o < dims[l + 1]; ++o) m.params[m.BiasOffset(l) + o] = bias(rng);
  }
  return m;
}

// Random architecture with 0 to 2 hidden layers of width 2 to 8.
inline std::vector<std::size_t> RandomDims(std::mt19937_64& rng, std::size_t d_in,
                                           std::size_t d_out) {
  std::vector<std::size_t> dims{d_in};
  const std::size_t hidden = rng() % 3;
  for (std::size_t h = 0; h < hidden; ++h) dims.push_back(2 + rng() % 7);
  dims.push_back(d_out);
  return dims;
}

}  // namespace dro::testing

#endif  // DRO_TESTS_TEST_UTIL_H_
