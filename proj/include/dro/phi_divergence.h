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

// phi-divergences and the distributionally robust inner maximization.
//
// For a loss vector L on n examples and a robustness parameter beta > 0 the
// robust loss is
//
//   R(L) = max_{q in simplex} <q, L> - (1/beta) D_phi(q || uniform),
//   D_phi(q || uniform) = (1/n) sum_i phi(n q_i).
//
// The maximizer (the hardness distribution) is softmax(beta L) for KL. For a
// general phi it is p_i = (1/n) ReLU((phi*)'(beta (L_i + lambda))) where the
// multiplier lambda makes the entries sum to one; HardnessWeightsGeneric
// finds lambda by bisection. The gradient of R with respect to L is the
// maximizer itself.

#ifndef DRO_PHI_DIVERGENCE_H_
#define DRO_PHI_DIVERGENCE_H_

#include <cstddef>
#include <span>
#include <vector>

namespace dro {

enum class DivergenceKind { kKl, kPearsonChi2 };

const char* DivergenceName(DivergenceKind kind);

struct PhiDivergence {
  using ScalarFn = double (*)(double);

  DivergenceKind kind;
  // Strong convexity constant of phi on [0, n].
  double rho;
  ScalarFn phi;
  ScalarFn phi_prime;
  // Derivative of the Fenchel conjugate, i.e. the inverse of phi_prime.
  // Defined on all of R: phi is extended analytically beyond [0, n].
  ScalarFn phi_star_prime;

  // phi(z) = z log z - z + 1, rho = 1/n.
  static PhiDivergence Kl(std::size_t n);
  // phi(z) = (z - 1)^2, rho = 2.
  static PhiDivergence PearsonChi2();
  static PhiDivergence Make(DivergenceKind kind, std::size_t n);
};

// Strictly positive, finite robustness parameter.
class RobustnessParam {
 public:
  explicit RobustnessParam(double beta);
  double value() const { return beta_; }

 private:
  double beta_;
};

struct HardnessDistribution {
  std::vector<double> probs;
};

struct DualSolution {
  double lambda = 0.0;
  HardnessDistribution probs;
  // |F(lambda) - 1| before the final renormalization.
  double residual = 0.0;
  int iterations = 0;
};

inline constexpr double kDualTolerance = 1e-10;
inline constexpr int kMaxBracketDoublings = 200;

// softmax(beta * losses) with max subtraction.
HardnessDistribution HardnessWeightsKl(std::span<const double> losses, RobustnessParam beta);

// Solves (1/n) sum_i ReLU(phi_star_prime(beta (v_i + lambda))) = 1 for lambda.
// Throws ConvergenceError if no bracket is found within kMaxBracketDoublings
// expansions or bisection stalls above kDualTolerance, NumericError on NaN.
DualSolution HardnessWeightsGeneric(std::span<const double> losses, RobustnessParam beta,
                                    const PhiDivergence& div);

// Closed form for KL, dual solver otherwise.
HardnessDistribution HardnessWeights(std::span<const double> losses, RobustnessParam beta,
                                     const PhiDivergence& div);

// <q, L> - (1/beta) D_phi(q || uniform) for an arbitrary q in the simplex.
double PenalizedObjective(std::span<const double> losses, std::span<const double> q,
                          RobustnessParam beta, const PhiDivergence& div);

// (1/beta) log((1/n) sum_i exp(beta L_i)), the KL robust loss.
double LogMeanExp(std::span<const double> losses, RobustnessParam beta);

double RobustLoss(std::span<const double> losses, RobustnessParam beta, const PhiDivergence& div);

// Gradient of RobustLoss with respect to the loss vector; equal to
// HardnessWeights(losses, beta, div).probs.
std::vector<double> RobustLossGradient(std::span<const double> losses, RobustnessParam beta,
                                       const PhiDivergence& div);

// sum_i q_i log(q_i / p_i), 0 log 0 = 0. DomainError when q_i > 0 = p_i.
double KlDivergence(const HardnessDistribution& q, const HardnessDistribution& p);

}  // namespace dro

#endif  // DRO_PHI_DIVERGENCE_H_
