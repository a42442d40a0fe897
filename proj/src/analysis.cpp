#include "colearn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "colearn/error.hpp"

namespace colearn {

PopularityState PopularityState::all_null(std::size_t agents, std::size_t arm_count) {
  PopularityState s;
  s.agents = agents;
  s.q.assign(arm_count + 1, 0.0);
  s.q[0] = 1.0;
  return s;
}

PopularityState PopularityState::from_counts(std::span<const std::size_t> counts) {
  PopularityState s;
  s.agents = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  if (s.agents == 0) throw ParameterError("counts sum to zero");
  s.q.reserve(counts.size());
  for (std::size_t c : counts) s.q.push_back(static_cast<double>(c) / static_cast<double>(s.agents));
  return s;
}

void PopularityState::validate() const {
  if (q.size() < 2) throw ParameterError("popularity needs Q0 and at least one arm");
  if (agents == 0) throw ParameterError("popularity needs a positive agent count");
  double sum = 0.0;
  for (double v : q) {
    if (!(v >= 0.0)) throw ParameterError("negative popularity");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw ParameterError("popularity sums to " + std::to_string(sum));
}

namespace {

void require_matching(const PopularityState& state, const ArmModel& model) {
  state.validate();
  if (state.arm_count() != model.arm_count()) throw ParameterError("popularity and arm model disagree on K");
}

}  // namespace

Drift meanfield_drift_arm1(const PopularityState& state, double mu, const ArmModel& model) {
  require_matching(state, model);
  const double n = static_cast<double>(state.agents);
  const double k = static_cast<double>(model.arm_count());
  const double q0 = state.q[0];
  const double q1 = state.q[1];
  const double p1 = model.mean(1);
  double others = 0.0;
  for (ArmId a = 2; a <= model.arm_count(); ++a) others += state.q[a] * model.mean(a);
  return Drift{
      .gain = n * q0 * (mu / k + (1.0 - mu) * q1) * p1 + n * (1.0 - q0 - q1) * q1 * p1,
      .loss = n * q1 * others,
  };
}

PopularityState meanfield_step(const PopularityState& state, double mu, const ArmModel& model) {
  require_matching(state, model);
  const std::size_t arms = model.arm_count();
  const double k = static_cast<double>(arms);
  const double q0 = state.q[0];
  double weighted = 0.0;
  for (ArmId a = 1; a <= arms; ++a) weighted += state.q[a] * model.mean(a);

  PopularityState next;
  next.agents = state.agents;
  next.q.assign(arms + 1, 0.0);
  double adopted = 0.0;
  for (ArmId a = 1; a <= arms; ++a) {
    const double qa = state.q[a];
    const double pa = model.mean(a);
    const double v = qa + q0 * (mu / k + (1.0 - mu) * qa) * pa + (1.0 - q0 - qa) * qa * pa - qa * (weighted - qa * pa);
    next.q[a] = std::max(v, 0.0);
    adopted += next.q[a];
  }
  next.q[0] = std::max(1.0 - adopted, 0.0);
  const double total = std::accumulate(next.q.begin(), next.q.end(), 0.0);
  if (std::abs(total - 1.0) > 0.0) {
    for (double& v : next.q) v /= total;
  }
  return next;
}

std::vector<double> meanfield_q1_trajectory(PopularityState state, double mu, const ArmModel& model,
                                            std::size_t rounds) {
  std::vector<double> out;
  out.reserve(rounds);
  for (std::size_t r = 0; r < rounds; ++r) {
    state = meanfield_step(state, mu, model);
    out.push_back(state.q[1]);
  }
  return out;
}

double reliability_threshold(double alpha, double p1, double p2) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha must lie in (0, 1)");
  if (!(p1 >= 0.0 && p1 <= 1.0 && p2 >= 0.0 && p2 <= 1.0)) throw ParameterError("p1 and p2 must lie in [0, 1]");
  if (!(p2 < p1)) throw ParameterError("p2 must be strictly below p1");
  return (1.0 - alpha) * (p1 - p2) / ((1.0 - alpha) * p1 + alpha * p2);
}

double stationary_popularity_upper(double tau, std::span<const double> means) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw ParameterError("tau must lie in [0, 1]");
  if (means.empty()) throw ParameterError("need at least one arm");
  const double rest = std::accumulate(means.begin() + 1, means.end(), 0.0);
  return 1.0 - tau / static_cast<double>(means.size()) * rest;
}

LearnabilityBound learnability_bound(double q, std::size_t zeta, std::size_t agents) {
  if (!(q > 0.0 && q <= 1.0)) throw ParameterError("q must lie in (0, 1]");
  if (zeta < 1) throw ParameterError("zeta must be positive");
  if (zeta > agents) throw ParameterError("zeta must not exceed N");
  LearnabilityBound b;
  b.domain_warning = q < 0.5;
  const double rho = (1.0 - q) / q;
  const double z = static_cast<double>(zeta);
  const double n = static_cast<double>(agents);
  if (std::abs(rho - 1.0) < 1e-12) {
    b.value = z / n;
  } else if (rho < 1.0) {
    b.value = (1.0 - std::pow(rho, z)) / (1.0 - std::pow(rho, n));
  } else {
    // Divide through by rho^N so large N does not overflow.
    const double inv = 1.0 / rho;
    b.value = std::pow(inv, n - z) * (1.0 - std::pow(inv, z)) / (1.0 - std::pow(inv, n));
  }
  return b;
}

double init_success_bound(std::size_t agents, double mu, double p1, std::size_t arm_count, double delta1) {
  if (agents < 1) throw ParameterError("N must be positive");
  if (arm_count < 1) throw ParameterError("K must be positive");
  if (!(mu >= 0.0 && mu <= 1.0)) throw ParameterError("mu must lie in [0, 1]");
  if (!(p1 >= 0.0 && p1 <= 1.0)) throw ParameterError("p1 must lie in [0, 1]");
  if (!(delta1 > 0.0 && delta1 < 1.0)) throw ParameterError("delta1 must lie in (0, 1)");
  const double exponent =
      static_cast<double>(agents) * mu * p1 * delta1 * delta1 / (2.0 * static_cast<double>(arm_count));
  return -std::expm1(-exponent);
}

std::size_t mixing_profile(const TransitionKernel& kernel, double epsilon, MixingOptions options) {
  if (!(epsilon > 0.0)) throw ParameterError("epsilon must be positive");
  const std::size_t n = kernel.size();
  AgentId start = 1;
  if (options.start) {
    start = *options.start;
    if (start < 1 || start > n) throw ParameterError("start agent out of range");
  } else {
    for (AgentId i = 2; i <= n; ++i) {
      if (kernel.degree(i) > kernel.degree(start)) start = i;
    }
  }
  const double uniform = 1.0 / static_cast<double>(n);
  auto deviation = [&](const std::vector<double>& pi) {
    double worst = 0.0;
    for (double v : pi) worst = std::max(worst, std::abs(v - uniform));
    return worst;
  };
  std::vector<double> pi(n, 0.0);
  pi[start - 1] = 1.0;
  for (std::size_t t = 0; t <= options.step_cap; ++t) {
    if (deviation(pi) <= epsilon) return t;
    if (t == options.step_cap) break;
    pi = kernel.step(pi);
  }
  throw DiagnosticError("walk did not reach epsilon = " + std::to_string(epsilon) + " of uniform within " +
                        std::to_string(options.step_cap) + " steps; graph may be bipartite or disconnected");
}

double stationarity_residual(const TransitionKernel& kernel) {
  const std::size_t n = kernel.size();
  std::vector<double> pi(n, 1.0 / static_cast<double>(n));
  const auto next = kernel.step(pi);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(next[i] - pi[i]));
  return worst;
}

}  // namespace colearn
