#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "colearn/adversary.hpp"
#include "colearn/engine.hpp"
#include "colearn/error.hpp"
#include "test_support.hpp"

using namespace colearn;

TEST_CASE("corruption counts") {
  CHECK(CorruptionSpec{0.0}.count(1000) == 0);
  CHECK(CorruptionSpec{1.0}.count(1000) == 1000);
  CHECK(CorruptionSpec{0.1}.count(1000) == 100);
  CHECK(CorruptionSpec{0.3}.count(10) == 3);
  CHECK(CorruptionSpec{0.0322}.count(1000) == 32);
  CHECK_THROWS_AS(CorruptionSpec{1.5}.count(10), ParameterError);
  CHECK_THROWS_AS(CorruptionSpec{-0.1}.count(10), ParameterError);
}

TEST_CASE("extreme corruption fractions") {
  Stream s(1);
  CHECK(select_corrupted(50, {0.0}, s).empty());
  const auto all = select_corrupted(50, {1.0}, s);
  REQUIRE(all.size() == 50);
  for (std::size_t i = 0; i < 50; ++i) CHECK(all[i] == i + 1);
}

TEST_CASE("selected agents are distinct, sorted and in range") {
  Stream s(2);
  for (int n = 0; n < 100; ++n) {
    const auto ids = sample_agents(40, 13, s);
    REQUIRE(ids.size() == 13);
    CHECK(std::set<AgentId>(ids.begin(), ids.end()).size() == 13);
    CHECK(std::is_sorted(ids.begin(), ids.end()));
    CHECK(ids.front() >= 1);
    CHECK(ids.back() <= 40);
  }
  CHECK_THROWS_AS(sample_agents(5, 6, s), ParameterError);
}

TEST_CASE("each agent is corrupted in about tau of the rounds") {
  const std::size_t n = 1000;
  const int rounds = 10000;
  std::vector<int> hits(n, 0);
  for (int r = 1; r <= rounds; ++r) {
    Stream s(StreamKey{.seed = 3, .round = static_cast<std::uint32_t>(r), .stage = Stage::kCorruption});
    for (AgentId id : select_corrupted(n, {0.1}, s)) ++hits[id - 1];
  }
  // Per-agent frequency has sd 0.003, so 0.01 is a 3.3 sigma band; count
  // misses rather than demanding all 1000 agents inside it.
  int outside = 0;
  for (int h : hits) outside += std::abs(h / double(rounds) - 0.1) > 0.01;
  CHECK(outside <= 5);
}

TEST_CASE("falsified emissions") {
  Stream s(4);
  for (int n = 0; n < 100; ++n) CHECK(falsify_emission(false, 4, 10, s) == 4);
  long ones = 0;
  const int tokens = 100000;
  for (int n = 0; n < tokens; ++n) ones += falsify_emission(true, 2, 2, s) == 1;
  CHECK(std::abs(ones / double(tokens) - 0.5) <= 0.01);
  for (int n = 0; n < 100; ++n) CHECK(falsify_emission(true, 1, 1, s) == 1);
}

TEST_CASE("adversary mode names") {
  CHECK(parse_adversary_mode("per_token") == AdversaryMode::kPerToken);
  CHECK(parse_adversary_mode("per_agent") == AdversaryMode::kPerAgent);
  CHECK(to_string(AdversaryMode::kPerAgent) == "per_agent");
  CHECK_THROWS_AS(parse_adversary_mode("sometimes"), ParameterError);
}

TEST_CASE("zero corruption leaves the trajectory untouched") {
  SimConfig c;
  c.agents = 60;
  c.arms = 3;
  c.graph.edge_probability = 0.2;
  c.max_rounds = 15;
  c.seed = 17;
  c.tau = 0.0;
  const Simulation sim(c);
  const auto honest = sim.run_replication(0);
  c.adversary_mode = AdversaryMode::kPerAgent;
  const auto per_agent = Simulation(c).run_replication(0);
  CHECK(honest == per_agent);
  for (const auto& m : honest.rounds) CHECK(m.corrupted_count == 0);
}

TEST_CASE("corrupted agents spread other arms") {
  SimConfig c;
  c.agents = 60;
  c.arms = 2;
  c.graph.edge_probability = 0.2;
  c.max_rounds = 30;
  c.seed = 5;
  c.initial_best = 60;
  c.arm.p1 = 1.0;
  c.arm.p2 = 1.0 - 1e-9;
  c.tau = 0.5;
  const auto result = Simulation(c).run_replication(0);
  REQUIRE(result.rounds.size() == 30);
  std::size_t arm2 = 0;
  for (const auto& m : result.rounds) {
    CHECK(m.corrupted_count == 30);
    arm2 += m.z(2);
  }
  CHECK(arm2 > 0);
}
