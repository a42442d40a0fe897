#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>

#include "colearn/analysis.hpp"
#include "colearn/error.hpp"
#include "test_support.hpp"

using namespace colearn;
using namespace colearn::testing;

namespace {

// Arm-1 flows written out term by term, independent of the library.
Drift hand_drift(std::size_t n, const std::vector<double>& q, double mu, const std::vector<double>& p) {
  const double k = static_cast<double>(p.size());
  Drift d;
  d.gain = n * q[0] * (mu / k + (1 - mu) * q[1]) * p[0] + n * (1 - q[0] - q[1]) * q[1] * p[0];
  for (std::size_t j = 2; j < q.size(); ++j) d.loss += n * q[1] * q[j] * p[j - 1];
  return d;
}

PopularityState random_state(std::size_t n, std::size_t arms, Stream& s) {
  PopularityState st;
  st.agents = n;
  st.q.resize(arms + 1);
  double total = 0.0;
  for (double& v : st.q) total += v = s.uniform01();
  for (double& v : st.q) v /= total;
  st.q[0] = 1.0 - std::accumulate(st.q.begin() + 1, st.q.end(), 0.0);
  return st;
}

}  // namespace

TEST_CASE("popularity states") {
  const auto null = PopularityState::all_null(10, 3);
  CHECK(null.q == std::vector<double>{1, 0, 0, 0});
  const std::vector<std::size_t> counts{2, 5, 3};
  const auto s = PopularityState::from_counts(counts);
  CHECK(s.agents == 10);
  CHECK(s.q == std::vector<double>{0.2, 0.5, 0.3});
  PopularityState bad{{0.5, 0.6}, 10};
  CHECK_THROWS_AS(bad.validate(), ParameterError);
}

TEST_CASE("drift examples") {
  const ArmModel two({0.8, 0.6});
  SUBCASE("absorbing state") {
    const Drift d = meanfield_drift_arm1({{0, 1, 0}, 1000}, 0.3, two);
    CHECK(d.gain == 0.0);
    CHECK(d.loss == 0.0);
  }
  SUBCASE("all null") {
    const Drift d = meanfield_drift_arm1({{1, 0, 0}, 1000}, 0.3, two);
    CHECK(d.gain == doctest::Approx(1000 * 0.3 * 0.8 / 2));
    CHECK(d.loss == 0.0);
  }
  SUBCASE("even split") {
    const Drift d = meanfield_drift_arm1({{0, 0.5, 0.5}, 1000}, 0.3, two);
    CHECK(d.gain == doctest::Approx(200));
    CHECK(d.loss == doctest::Approx(150));
  }
}

TEST_CASE("drift and step agree with the hand oracle") {
  Stream s(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t arms = 2 + s.below(5);
    std::vector<double> p(arms);
    for (double& v : p) v = s.uniform01();
    p[0] = 1.0;
    const ArmModel model(p);
    const std::vector<double> sorted(model.means().begin(), model.means().end());
    const auto st = random_state(500, arms, s);
    const double mu = s.uniform01();
    const Drift d = meanfield_drift_arm1(st, mu, model);
    const Drift oracle = hand_drift(500, st.q, mu, sorted);
    CHECK(d.gain == doctest::Approx(oracle.gain).epsilon(1e-12));
    CHECK(d.loss == doctest::Approx(oracle.loss).epsilon(1e-12));
    const auto next = meanfield_step(st, mu, model);
    CHECK(next.q[1] - st.q[1] == doctest::Approx(d.net() / 500).epsilon(1e-9));
    CHECK_NOTHROW(next.validate());
  }
}

TEST_CASE("mean-field fixed point and convergence") {
  const ArmModel model = sample_arm_means(100, 0.8, 0.6, FillRule::kUniform, 1);
  PopularityState one = PopularityState::all_null(2000, 100);
  one.q[0] = 0.0;
  one.q[1] = 1.0;
  CHECK(meanfield_step(one, 0.3, model).q == one.q);

  const auto traj = meanfield_q1_trajectory(PopularityState::all_null(2000, 100), 0.3, model, 60);
  REQUIRE(traj.size() == 60);
  CHECK(traj.back() > 0.99);
  for (std::size_t r = 1; r < traj.size(); ++r) CHECK(traj[r] >= traj[r - 1]);

  Stream s(9);
  for (int trial = 0; trial < 100; ++trial) {
    auto st = random_state(1000, 4, s);
    const ArmModel m({0.9, 0.7, 0.5, 0.2});
    const auto q1 = meanfield_q1_trajectory(st, 0.3, m, 400);
    CHECK(q1.back() > 0.99);
  }
}

TEST_CASE("drift favors the best arm") {
  // gain / (gain + loss) >= p1 / (p1 + p2) whenever arm 2 is the runner-up.
  Stream s(10);
  for (int trial = 0; trial < 5000; ++trial) {
    const double p1 = 0.05 + 0.95 * s.uniform01();
    const double p2 = p1 * s.uniform01() * 0.999;
    const ArmModel model({p1, p2, p2 * 0.5});
    auto st = random_state(1000, 3, s);
    const Drift d = meanfield_drift_arm1(st, s.uniform01(), model);
    if (d.gain + d.loss == 0.0) continue;
    CHECK(d.gain / (d.gain + d.loss) >= p1 / (p1 + p2) - 1e-12);
  }
}

TEST_CASE("reliability threshold") {
  CHECK(reliability_threshold(0.9, 0.8, 0.6) == doctest::Approx(0.02 / 0.62).epsilon(1e-12));
  CHECK(reliability_threshold(0.5, 1.0, 0.0) == doctest::Approx(1.0));
  CHECK(reliability_threshold(0.5, 0.8, 0.8 - 1e-12) < 1e-10);
  CHECK_THROWS_AS(reliability_threshold(0.5, 0.6, 0.6), ParameterError);
  CHECK_THROWS_AS(reliability_threshold(1.0, 0.8, 0.6), ParameterError);
  for (double a = 0.1; a < 0.95; a += 0.1) {
    CHECK(reliability_threshold(a + 0.05, 0.8, 0.6) < reliability_threshold(a, 0.8, 0.6));
    CHECK(reliability_threshold(a, 0.8, 0.4) > reliability_threshold(a, 0.8, 0.6));
  }
}

TEST_CASE("stationary popularity bound") {
  const std::vector<double> five{0.9, 0.5, 0.4, 0.3, 0.2};
  CHECK(stationary_popularity_upper(0.0, five) == 1.0);
  const std::vector<double> two{0.8, 0.6};
  CHECK(stationary_popularity_upper(0.5, two) == doctest::Approx(0.85));
  CHECK(stationary_popularity_upper(0.5, ArmModel({0.8, 0.6})) == doctest::Approx(0.85));
  const std::vector<double> ones(1000, 1.0);
  CHECK(stationary_popularity_upper(1.0, ones) == doctest::Approx(1.0 / 1000));
  CHECK_THROWS_AS(stationary_popularity_upper(1.5, two), ParameterError);
}

TEST_CASE("learnability bound") {
  CHECK(learnability_bound(1.0, 1, 10).value == 1.0);
  CHECK(learnability_bound(0.5, 3, 10).value == doctest::Approx(0.3));
  const double rho = 1.0 / 9;
  CHECK(learnability_bound(0.9, 1, 10).value == doctest::Approx((1 - rho) / (1 - std::pow(rho, 10))).epsilon(1e-12));
  CHECK(learnability_bound(0.9, 1, 10).value == doctest::Approx(0.888889).epsilon(1e-6));
  CHECK_FALSE(learnability_bound(0.9, 1, 10).domain_warning);
  const auto low = learnability_bound(0.3, 5, 10);
  CHECK(low.domain_warning);
  const double r = 0.7 / 0.3;
  CHECK(low.value == doctest::Approx((1 - std::pow(r, 5)) / (1 - std::pow(r, 10))).epsilon(1e-12));
  CHECK(learnability_bound(0.2, 1, 5000).value >= 0.0);
  CHECK(learnability_bound(0.5 + 1e-14, 3, 10).value == doctest::Approx(0.3));
  CHECK_THROWS_AS(learnability_bound(0.0, 1, 10), ParameterError);
  CHECK_THROWS_AS(learnability_bound(0.6, 11, 10), ParameterError);
}

TEST_CASE("initialization bound") {
  CHECK(init_success_bound(2000, 0.3, 0.8, 100, 0.5) == doctest::Approx(1 - std::exp(-0.6)).epsilon(1e-12));
  CHECK(init_success_bound(2000, 0.3, 0.8, 100, 1e-9) < 1e-12);
  CHECK(init_success_bound(100'000'000, 0.3, 0.8, 100, 0.5) == 1.0);
  CHECK_THROWS_AS(init_success_bound(2000, 0.3, 0.8, 100, 0.0), ParameterError);
  CHECK_THROWS_AS(init_success_bound(2000, 0.3, 0.8, 100, 1.0), ParameterError);
}

TEST_CASE("mixing on complete graphs follows the closed form") {
  // Psi on K_n moves to each other agent with 1/(n-1) and never stays, so
  // the deviation from uniform after t steps is ((n-1)/n) (n-1)^-t.
  for (std::size_t n : {3, 4, 7, 12}) {
    const TransitionKernel k(complete_graph(n));
    for (double eps : {1e-2, 1e-4, 1e-7}) {
      std::size_t t = 0;
      while ((n - 1.0) / n * std::pow(n - 1.0, -double(t)) > eps) ++t;
      CHECK(mixing_profile(k, eps) == t);
    }
  }
  CHECK(mixing_profile(TransitionKernel(complete_graph(3)), 1.0 / 27) == 5);
  CHECK(mixing_profile(TransitionKernel(complete_graph(3)), 1.0) == 0);
}

TEST_CASE("mixing diagnostics") {
  CHECK_THROWS_AS(mixing_profile(TransitionKernel(cycle_graph(4)), 1e-3, {.step_cap = 1000}), DiagnosticError);
  CHECK_THROWS_AS(mixing_profile(TransitionKernel(complete_graph(3)), 0.0), ParameterError);
  CHECK_THROWS_AS(mixing_profile(TransitionKernel(complete_graph(3)), 0.1, {.start = 4}), ParameterError);
  const TransitionKernel odd(cycle_graph(5));
  CHECK(mixing_profile(odd, 1e-6, {.start = 2}) == mixing_profile(odd, 1e-6));
}

TEST_CASE("uniform distribution is stationary") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const TransitionKernel k(generate_random_graph(150, 0.05, seed));
    CHECK(stationarity_residual(k) <= 1e-12);
  }
  CHECK(stationarity_residual(TransitionKernel(star_graph(6))) <= 1e-15);
}
