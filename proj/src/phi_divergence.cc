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

#include "dro/phi_divergence.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dro/errors.h"
#include "dro/kernels.h"

namespace dro {
namespace {

double KlPhi(double z) {
  if (z == 0.0) return 1.0;
  return z * std::log(z) - z + 1.0;
}
double KlPhiPrime(double z) { return std::log(z); }
double KlPhiStarPrime(double y) { return std::exp(y); }

double Chi2Phi(double z) { return (z - 1.0) * (z - 1.0); }
double Chi2PhiPrime(double z) { return 2.0 * (z - 1.0); }
double Chi2PhiStarPrime(double y) { return 0.5 * y + 1.0; }

void CheckLosses(std::span<const double> losses) {
  if (losses.empty()) throw ArgumentError("loss vector is empty");
  for (std::size_t i = 0; i < losses.size(); ++i) {
    if (!std::isfinite(losses[i])) {
      throw ArgumentError("loss " + std::to_string(i) + " is not finite");
    }
  }
}

// F(lambda) + 1, i.e. the total mass (1/n) sum_i ReLU((phi*)'(beta (v_i + lambda))).
double DualMass(std::span<const double> v, double beta, double lambda, const PhiDivergence& div) {
  double s = 0.0;
  for (double vi : v) s += std::max(0.0, div.phi_star_prime(beta * (vi + lambda)));
  s /= static_cast<double>(v.size());
  if (std::isnan(s)) throw NumericError("dual solver produced NaN");
  return s;
}

}  // namespace

const char* DivergenceName(DivergenceKind kind) {
  switch (kind) {
    case DivergenceKind::kKl:
      return "kl";
    case DivergenceKind::kPearsonChi2:
      return "chi2";
  }
  return "unknown";
}

PhiDivergence PhiDivergence::Kl(std::size_t n) {
  if (n == 0) throw ArgumentError("KL divergence needs n >= 1");
  return {DivergenceKind::kKl, 1.0 / static_cast<double>(n), &KlPhi, &KlPhiPrime,
          &KlPhiStarPrime};
}

PhiDivergence PhiDivergence::PearsonChi2() {
  return {DivergenceKind::kPearsonChi2, 2.0, &Chi2Phi, &Chi2PhiPrime, &Chi2PhiStarPrime};
}

PhiDivergence PhiDivergence::Make(DivergenceKind kind, std::size_t n) {
  return kind == DivergenceKind::kKl ? Kl(n) : PearsonChi2();
}

RobustnessParam::RobustnessParam(double beta) : beta_(beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw ArgumentError("beta must be finite and > 0, got " + std::to_string(beta));
  }
}

HardnessDistribution HardnessWeightsKl(std::span<const double> losses, RobustnessParam beta) {
  CheckLosses(losses);
  HardnessDistribution out{std::vector<double>(losses.size())};
  kernels::parallel::Softmax(losses, beta.value(), out.probs);
  return out;
}

DualSolution HardnessWeightsGeneric(std::span<const double> losses, RobustnessParam beta,
                                    const PhiDivergence& div) {
  CheckLosses(losses);
  const double b = beta.value();
  const auto [min_it, max_it] = std::minmax_element(losses.begin(), losses.end());
  const double spread = *max_it - *min_it;
  double mean = 0.0;
  for (double v : losses) mean += v;
  mean /= static_cast<double>(losses.size());

  DualSolution sol;
  double lambda0 = -mean;
  double mass0 = DualMass(losses, b, lambda0, div);

  double lo = lambda0;
  double hi = lambda0;
  if (mass0 != 1.0) {
    // Geometric expansion away from lambda0 until F changes sign.
    const bool go_up = mass0 < 1.0;
    double step = std::max({spread, std::abs(lambda0) * 1e-12, 1e-12});
    bool bracketed = false;
    for (int k = 0; k < kMaxBracketDoublings; ++k, step *= 2.0) {
      ++sol.iterations;
      const double probe = go_up ? lambda0 + step : lambda0 - step;
      const double mass = DualMass(losses, b, probe, div);
      if (go_up ? mass >= 1.0 : mass <= 1.0) {
        (go_up ? hi : lo) = probe;
        bracketed = true;
        break;
      }
      (go_up ? lo : hi) = probe;
    }
    if (!bracketed) {
      throw ConvergenceError("dual solver: no bracket after " +
                             std::to_string(kMaxBracketDoublings) + " doublings");
    }
  }

  double lambda = lo;
  double mass = DualMass(losses, b, lambda, div);
  if (mass != 1.0) {
    const double mass_hi = DualMass(losses, b, hi, div);
    lambda = hi;
    mass = mass_hi;
    // Bisection on the monotone mass function, run down to adjacent doubles
    // so the weights are accurate well past the acceptance tolerance.
    while (mass != 1.0) {
      const double mid = lo + 0.5 * (hi - lo);
      if (mid <= lo || mid >= hi) break;
      ++sol.iterations;
      const double m = DualMass(losses, b, mid, div);
      if (m < 1.0) {
        lo = mid;
      } else {
        hi = mid;
      }
      lambda = mid;
      mass = m;
    }
  }
  sol.residual = std::abs(mass - 1.0);
  if (!(sol.residual <= kDualTolerance)) {
    throw ConvergenceError("dual solver stalled with residual " + std::to_string(sol.residual));
  }
  sol.lambda = lambda;

  auto& p = sol.probs.probs;
  p.resize(losses.size());
  const double inv_n = 1.0 / static_cast<double>(losses.size());
  double total = 0.0;
  for (std::size_t i = 0; i < losses.size(); ++i) {
    p[i] = inv_n * std::max(0.0, div.phi_star_prime(b * (losses[i] + lambda)));
    total += p[i];
  }
  for (double& v : p) v /= total;
  return sol;
}

HardnessDistribution HardnessWeights(std::span<const double> losses, RobustnessParam beta,
                                     const PhiDivergence& div) {
  if (div.kind == DivergenceKind::kKl) return HardnessWeightsKl(losses, beta);
  return std::move(HardnessWeightsGeneric(losses, beta, div).probs);
}

double PenalizedObjective(std::span<const double> losses, std::span<const double> q,
                          RobustnessParam beta, const PhiDivergence& div) {
  CheckLosses(losses);
  if (q.size() != losses.size()) throw ArgumentError("distribution and loss sizes differ");
  const double n = static_cast<double>(losses.size());
  double linear = 0.0;
  double divergence = 0.0;
  for (std::size_t i = 0; i < losses.size(); ++i) {
    linear += q[i] * losses[i];
    divergence += div.phi(n * q[i]);
  }
  return linear - divergence / (n * beta.value());
}

double LogMeanExp(std::span<const double> losses, RobustnessParam beta) {
  CheckLosses(losses);
  const double lse = kernels::parallel::LogSumExp(losses, beta.value());
  return (lse - std::log(static_cast<double>(losses.size()))) / beta.value();
}

double RobustLoss(std::span<const double> losses, RobustnessParam beta, const PhiDivergence& div) {
  CheckLosses(losses);
  // Constant input: the maximizer is uniform with zero divergence.
  if (std::all_of(losses.begin(), losses.end(), [&](double v) { return v == losses[0]; })) {
    return losses[0];
  }
  if (div.kind == DivergenceKind::kKl) return LogMeanExp(losses, beta);
  const auto p = HardnessWeights(losses, beta, div);
  return PenalizedObjective(losses, p.probs, beta, div);
}

std::vector<double> RobustLossGradient(std::span<const double> losses, RobustnessParam beta,
                                       const PhiDivergence& div) {
  return HardnessWeights(losses, beta, div).probs;
}

double KlDivergence(const HardnessDistribution& q, const HardnessDistribution& p) {
  if (q.probs.size() != p.probs.size()) throw ArgumentError("distribution sizes differ");
  double d = 0.0;
  for (std::size_t i = 0; i < q.probs.size(); ++i) {
    const double qi = q.probs[i];
    const double pi = p.probs[i];
    if (qi < 0.0 || pi < 0.0) throw DomainError("negative probability");
    if (qi == 0.0) continue;
    if (pi == 0.0) {
      throw DomainError("q has mass at index " + std::to_string(i) + " where p has none");
    }
    d += qi * std::log(qi / pi);
  }
  return std::max(0.0, d);
}

}  // namespace dro
