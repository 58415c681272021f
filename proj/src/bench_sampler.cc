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

#include <chrono>
#include <random>

#include "dro/errors.h"
#include "dro/experiment.h"
#include "dro/hardness_sampler.h"

namespace dro {

std::vector<SamplerBenchRow> BenchSamplerOverhead(const std::vector<std::size_t>& ns,
                                                  std::size_t repetitions,
                                                  std::size_t batch_size, double beta) {
  if (repetitions == 0) throw ArgumentError("repetitions must be >= 1");
  std::vector<SamplerBenchRow> rows;
  SamplerConfig cfg;
  cfg.beta = RobustnessParam(beta);
  cfg.batch_size = batch_size;
  for (std::size_t n : ns) {
    if (n == 0) throw ArgumentError("n must be >= 1");
    Rng rng(n);
    std::uniform_real_distribution<double> loss(0.0, 3.0);
    std::vector<double> init(n);
    for (double& v : init) v = loss(rng);
    StaleLossStore store = InitStore(n, init);
    std::vector<double> fresh(batch_size);
    for (double& v : fresh) v = loss(rng);

    const auto start = std::chrono::steady_clock::now();
    for (std::size_t r = 0; r < repetitions; ++r) {
      const auto batch = SampleBatch(store, cfg, rng);
      UpdateStore(store, batch, fresh);
    }
    const double us =
        std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - start).count();

    SamplerBenchRow row;
    row.n = n;
    row.repetitions = repetitions;
    row.mean_us_per_iteration = us / static_cast<double>(repetitions);
    row.loss_bytes = store.loss_bytes();
    row.store_bytes = store.memory_bytes();
    rows.push_back(row);
  }
  return rows;
}

}  // namespace dro
