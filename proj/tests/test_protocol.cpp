#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <numeric>

#include "colearn/protocol.hpp"
#include "test_support.hpp"

using namespace colearn;
using namespace colearn::testing;

namespace {

std::vector<AgentState> make_agents(std::size_t n) {
  std::vector<AgentState> agents(n);
  for (std::size_t i = 0; i < n; ++i) agents[i].id = static_cast<AgentId>(i + 1);
  return agents;
}

std::vector<Stream> make_streams(std::size_t n, std::uint64_t seed) {
  std::vector<Stream> streams;
  for (std::size_t i = 0; i < n; ++i) {
    streams.emplace_back(StreamKey{.seed = seed, .stage = Stage::kDissemination, .agent = i + 1});
  }
  return streams;
}

// 99.9% chi-square quantiles by degrees of freedom.
constexpr double kChi2_1 = 10.83;
constexpr double kChi2_3 = 16.27;

}  // namespace

TEST_CASE("budgets from the agent count") {
  CHECK(log_budget(10, 1024) == 100);
  CHECK(log_budget(10, 2000) == 110);
  CHECK(log_budget(1, 2) == 1);
  const TokenBudget b = TokenBudget::from(2000, 10, 3, 1);
  CHECK(b.tokens_per_agent == 110);
  CHECK(b.ttl == 33);
  CHECK(b.slots_per_round == 121);
  CHECK(TokenBudget::from(1024, 10, 3, 1).ttl == 30);
  CHECK(TokenBudget::from(1024, 10, 3, 1).slots_per_round == 100);
}

TEST_CASE("null adoption emits nothing") {
  AgentState a{.id = 1};
  CHECK(emit_tokens(a, 100, 30) == 0);
  CHECK(a.fifo.empty());
}

TEST_CASE("emitted tokens carry the adoption and the ttl") {
  AgentState a{.id = 1, .omega = 3};
  CHECK(emit_tokens(a, log_budget(10, 1024), 30) == 100);
  REQUIRE(a.fifo.size() == 100);
  for (const Token& t : a.fifo.contents()) CHECK(t == Token{3, 30});

  AgentState b{.id = 2, .omega = 1};
  CHECK(emit_tokens(b, log_budget(10, 2000), 33) == 110);
  CHECK(b.fifo.contents().back() == Token{1, 33});
}

TEST_CASE("queue pops from the head") {
  TokenQueue q;
  for (std::uint32_t c = 1; c <= 5; ++c) q.push(Token{1, c});
  auto first = q.pop_front(2);
  REQUIRE(first.size() == 2);
  CHECK(first[0].counter == 1);
  CHECK(first[1].counter == 2);
  CHECK(q.size() == 3);
  q.compact();
  CHECK(q.pop().counter == 3);
  CHECK(q.pop_front(10).size() == 2);
  CHECK(q.empty());
}

TEST_CASE("a token with counter one expires into a suggestion") {
  const Graph g = complete_graph(3);
  const TransitionKernel k(g);
  auto agents = make_agents(3);
  auto streams = make_streams(3, 1);
  SlotScratch scratch;
  agents[0].fifo.push(Token{2, 1});
  const SlotStats stats = run_slot(agents, k, 10, streams, scratch);
  CHECK(stats.forwarded == 1);
  CHECK(stats.expired == 1);
  std::size_t suggestions = 0;
  for (const auto& a : agents) {
    CHECK(a.fifo.empty());
    suggestions += a.suggestions.size();
    if (!a.suggestions.empty()) CHECK(a.suggestions[0] == 2);
  }
  CHECK(suggestions == 1);
  CHECK(agents[0].suggestions.empty());
}

TEST_CASE("a token with counter two is forwarded with counter one") {
  const Graph g = complete_graph(3);
  const TransitionKernel k(g);
  auto agents = make_agents(3);
  auto streams = make_streams(3, 2);
  SlotScratch scratch;
  agents[0].fifo.push(Token{1, 2});
  const SlotStats stats = run_slot(agents, k, 10, streams, scratch);
  CHECK(stats.expired == 0);
  std::size_t queued = 0;
  for (const auto& a : agents) {
    CHECK(a.suggestions.empty());
    for (const Token& t : a.fifo.contents()) {
      CHECK(t == Token{1, 1});
      ++queued;
    }
  }
  CHECK(queued == 1);
}

TEST_CASE("triangle destinations follow the kernel row") {
  const Graph g = complete_graph(3);
  const TransitionKernel k(g);
  std::array<std::size_t, 3> hits{};
  const int trials = 100000;
  SlotScratch scratch;
  auto streams = make_streams(3, 3);
  for (int n = 0; n < trials; ++n) {
    auto agents = make_agents(3);
    agents[0].fifo.push(Token{1, 5});
    run_slot(agents, k, 1, streams, scratch);
    for (std::size_t i = 0; i < 3; ++i) hits[i] += agents[i].fifo.size();
  }
  CHECK(hits[0] == 0);
  CHECK(std::abs(hits[1] / double(trials) - 0.5) <= 0.01);
  CHECK(std::abs(hits[2] / double(trials) - 0.5) <= 0.01);
  const std::array<std::size_t, 2> obs{hits[1], hits[2]};
  const std::array<double, 2> p{0.5, 0.5};
  CHECK(chi_square(obs, p) < kChi2_1);
}

TEST_CASE("tokens received in a slot are not forwarded in it") {
  // On a path 1-2-3 agent 2 must forward, never self-loop. A token from 1
  // that lands on 2 stays there until the next slot.
  const Graph g = path_graph(3);
  const TransitionKernel k(g);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto agents = make_agents(3);
    auto streams = make_streams(3, seed);
    SlotScratch scratch;
    agents[0].fifo.push(Token{1, 10});
    const SlotStats stats = run_slot(agents, k, 5, streams, scratch);
    CHECK(stats.forwarded == 1);
    CHECK(agents[0].fifo.size() + agents[1].fifo.size() == 1);
    CHECK(agents[2].fifo.empty());
  }
}

TEST_CASE("pop budget caps forwarding per slot and counts receptions") {
  const Graph g = complete_graph(4);
  const TransitionKernel k(g);
  auto agents = make_agents(4);
  auto streams = make_streams(4, 4);
  SlotScratch scratch;
  for (int n = 0; n < 7; ++n) agents[0].fifo.push(Token{1, 9});
  SlotStats stats = run_slot(agents, k, 3, streams, scratch);
  CHECK(stats.forwarded == 3);
  CHECK(std::accumulate(stats.received.begin(), stats.received.end(), std::size_t{0}) == 3);
  CHECK(stats.received[0] == 0);
  std::size_t total = 0;
  for (const auto& a : agents) total += a.fifo.size();
  CHECK(total == 7);
  CHECK(agents[0].fifo.size() == 4);
}

TEST_CASE("sampling stage cases") {
  SUBCASE("null adoption with empty suggestions and no exploration") {
    AgentState a{.id = 1};
    Stream s(1);
    CHECK(sample_stage(a, 0.0, 4, s) == kNullArm);
    CHECK(a.chosen == kNullArm);
  }
  SUBCASE("adopter with one suggestion") {
    AgentState a{.id = 1, .omega = 5};
    a.suggestions = {3};
    Stream s(2);
    CHECK(sample_stage(a, 1.0, 6, s) == 3);
  }
  SUBCASE("adopter with no suggestions") {
    AgentState a{.id = 1, .omega = 2};
    Stream s(3);
    CHECK(sample_stage(a, 1.0, 6, s) == kNullArm);
  }
  SUBCASE("exploration is uniform over arms") {
    std::array<std::size_t, 4> counts{};
    Stream s(StreamKey{.seed = 5, .stage = Stage::kSampling});
    const int calls = 100000;
    for (int n = 0; n < calls; ++n) {
      AgentState a{.id = 1};
      counts[sample_stage(a, 1.0, 4, s) - 1]++;
    }
    for (auto c : counts) CHECK(std::abs(c / double(calls) - 0.25) <= 0.01);
    const std::array<double, 4> p{0.25, 0.25, 0.25, 0.25};
    CHECK(chi_square(counts, p) < kChi2_3);
  }
  SUBCASE("suggestions are drawn with multiplicity") {
    std::array<std::size_t, 2> counts{};
    Stream s(6);
    const int calls = 100000;
    for (int n = 0; n < calls; ++n) {
      AgentState a{.id = 1, .omega = 1};
      a.suggestions = {1, 2, 2, 2};
      counts[sample_stage(a, 0.3, 2, s) - 1]++;
    }
    const std::array<double, 2> p{0.25, 0.75};
    CHECK(chi_square(counts, p) < kChi2_1);
  }
}

TEST_CASE("reservoir matches a direct uniform pick") {
  const std::vector<ArmId> multiset{1, 2, 2, 3, 3, 3};
  const std::array<double, 3> p{1.0 / 6, 2.0 / 6, 3.0 / 6};
  std::array<std::size_t, 3> reservoir{}, direct{};
  Stream s(7);
  for (int n = 0; n < 60000; ++n) {
    SuggestionReservoir r;
    for (ArmId a : multiset) r.offer(a, s);
    CHECK(r.seen() == multiset.size());
    reservoir[r.held() - 1]++;
    direct[multiset[s.below(multiset.size())] - 1]++;
  }
  CHECK(chi_square(reservoir, p) < 13.82);
  CHECK(chi_square(direct, p) < 13.82);
}

TEST_CASE("adopting stage cases") {
  const ArmModel model({1.0, 0.0, 0.5});
  Stream s(8);
  SUBCASE("null choice pulls nothing") {
    AgentState a{.id = 1, .omega = 2};
    CHECK_FALSE(adopt_stage(a, model, s).has_value());
    CHECK(a.omega == 2);
  }
  SUBCASE("reward one adopts") {
    AgentState a{.id = 1};
    a.chosen = 1;
    CHECK(adopt_stage(a, model, s) == 1);
    CHECK(a.omega == 1);
  }
  SUBCASE("reward zero keeps the prior adoption") {
    // Canonical order puts the zero-mean arm last.
    AgentState a{.id = 1, .omega = 1};
    a.chosen = 3;
    CHECK(model.mean(3) == 0.0);
    CHECK(adopt_stage(a, model, s) == 0);
    CHECK(a.omega == 1);
  }
}
