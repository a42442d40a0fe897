#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "colearn/arms.hpp"
#include "colearn/graph.hpp"

namespace colearn {

// Population fractions Q_0..Q_K (Q_0 is the null arm) for N agents.
struct PopularityState {
  std::vector<double> q;
  std::size_t agents = 0;

  static PopularityState all_null(std::size_t agents, std::size_t arm_count);
  static PopularityState from_counts(std::span<const std::size_t> counts);

  std::size_t arm_count() const noexcept { return q.size() - 1; }

  // Throws ParameterError unless fractions are nonnegative and sum to 1 within 1e-12.
  void validate() const;
};

// Expected one-round flows into and out of arm 1, in agents.
struct Drift {
  double gain = 0.0;
  double loss = 0.0;
  double net() const noexcept { return gain - loss; }
};

// gain = N Q0 (mu/K + (1-mu) Q1) p1 + N (1 - Q0 - Q1) Q1 p1
// loss = N Q1 sum_{k>=2} Qk pk
Drift meanfield_drift_arm1(const PopularityState& state, double mu, const ArmModel& model);

// Expected next popularity vector, applying the arm-1 case analysis to every
// arm:
//   Qk' = Qk + Q0 (mu/K + (1-mu) Qk) pk + (1 - Q0 - Qk) Qk pk - Qk sum_{j!=k} Qj pj
// and Q0' = 1 - sum_k Qk'.
PopularityState meanfield_step(const PopularityState& state, double mu, const ArmModel& model);

// Q1 after each of `rounds` iterations of meanfield_step.
std::vector<double> meanfield_q1_trajectory(PopularityState state, double mu, const ArmModel& model,
                                            std::size_t rounds);

// Largest corruption fraction keeping arm-1 drift nonnegative while Q1 <= alpha:
//   (1-alpha)(p1-p2) / ((1-alpha) p1 + alpha p2).
double reliability_threshold(double alpha, double p1, double p2);

// Stationary upper bound on E[Q1] under corruption fraction tau:
//   1 - (tau/K) sum_{k>=2} pk, with means[0] = p1 and K = means.size().
double stationary_popularity_upper(double tau, std::span<const double> means);
inline double stationary_popularity_upper(double tau, const ArmModel& model) {
  return stationary_popularity_upper(tau, model.means());
}

struct LearnabilityBound {
  double value = 0.0;
  bool domain_warning = false;  // q < 1/2, where the bound was not derived
};

// Gambler's-ruin success bound (1 - rho^zeta) / (1 - rho^N), rho = (1-q)/q,
// with the limit zeta/N at q = 1/2.
LearnabilityBound learnability_bound(double q, std::size_t zeta, std::size_t agents);

// 1 - exp(-N mu p1 delta1^2 / (2K)).
double init_success_bound(std::size_t agents, double mu, double p1, std::size_t arm_count, double delta1);

struct MixingOptions {
  std::optional<AgentId> start;  // default: max-degree agent, lowest id on ties
  std::size_t step_cap = 1'000'000;
};

// Number of kernel steps until a point mass at the start agent is within
// epsilon of uniform in every coordinate. Exact power iteration. Throws
// DiagnosticError when the cap is hit.
std::size_t mixing_profile(const TransitionKernel& kernel, double epsilon, MixingOptions options = {});

// max_v |(pi Psi)(v) - pi(v)| for the uniform distribution pi.
double stationarity_residual(const TransitionKernel& kernel);

}  // namespace colearn
