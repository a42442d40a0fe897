#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "colearn/arms.hpp"
#include "colearn/graph.hpp"
#include "colearn/rng.hpp"

namespace colearn {

// A disseminated adoption and its remaining hop count. Feasible while
// counter > 0.
struct Token {
  ArmId arm = kNullArm;
  std::uint32_t counter = 0;

  bool feasible() const noexcept { return counter > 0; }
  bool operator==(const Token&) const = default;
};

// FIFO of tokens backed by a vector with a moving head.
class TokenQueue {
 public:
  void push(Token t) { items_.push_back(t); }
  std::size_t size() const noexcept { return items_.size() - head_; }
  bool empty() const noexcept { return size() == 0; }
  void clear() noexcept {
    items_.clear();
    head_ = 0;
  }

  // Removes and returns up to n tokens from the head.
  std::span<const Token> pop_front(std::size_t n);

  // Removes and returns the head token; the queue must not be empty.
  Token pop() { return items_[head_++]; }

  std::span<const Token> contents() const noexcept { return {items_.data() + head_, size()}; }

  // Drops the popped prefix. Invalidates spans returned by pop_front.
  void compact();

 private:
  std::vector<Token> items_;
  std::size_t head_ = 0;
};

struct AgentState {
  AgentId id = 0;
  ArmId omega = kNullArm;
  TokenQueue fifo;
  std::vector<ArmId> suggestions;  // multiset of expired-token arms this round
  ArmId chosen = kNullArm;
};

// ceil(h * log_base(n)), guarded against rounding just above an integer.
std::uint32_t log_budget(double h, std::size_t n, double log_base = 2.0);

// Per-round dissemination parameters derived from the agent count.
struct TokenBudget {
  std::uint32_t tokens_per_agent = 0;  // tokens emitted per adopter; also the per-slot pop budget
  std::uint32_t ttl = 0;               // initial hop counter
  std::uint32_t slots_per_round = 0;

  static TokenBudget from(std::size_t n, double h, double c_ttl, double c_slot, double log_base = 2.0);
};

// Appends `count` tokens with counter `ttl` to the agent's queue; the arm of
// each token comes from arm_for_token(). Agents with a null adoption emit
// nothing. Returns the number emitted.
template <class ArmFn>
std::size_t emit_tokens(AgentState& agent, std::uint32_t count, std::uint32_t ttl, ArmFn&& arm_for_token) {
  if (agent.omega == kNullArm) return 0;
  for (std::uint32_t n = 0; n < count; ++n) agent.fifo.push(Token{arm_for_token(), ttl});
  return count;
}

inline std::size_t emit_tokens(AgentState& agent, std::uint32_t count, std::uint32_t ttl) {
  return emit_tokens(agent, count, ttl, [&] { return agent.omega; });
}

struct SlotStats {
  std::vector<std::uint32_t> received;  // per agent, index id-1
  std::size_t forwarded = 0;
  std::size_t expired = 0;
  std::size_t max_queue = 0;
  std::uint32_t max_received = 0;
};

// Reusable buffers for run_slot.
struct SlotScratch {
  std::vector<std::uint32_t> pop_counts;
};

// One synchronous slot. Every agent first pops up to pop_budget tokens from
// its pre-slot queue, decrements each counter and draws a destination from
// the kernel using its own stream (streams[id-1]). Deliveries then happen in
// sender order: feasible tokens join the receiver's queue tail, expired ones
// join its suggestions. A token received in a slot is not forwarded in it.
SlotStats run_slot(std::span<AgentState> agents, const TransitionKernel& kernel, std::uint32_t pop_budget,
                   std::span<Stream> streams, SlotScratch& scratch);

// Sampling stage. Sets and returns agent.chosen.
ArmId sample_stage(AgentState& agent, double mu, std::size_t arm_count, Stream& stream);

// Adopting stage. No pull when chosen is the null arm; otherwise pulls and
// adopts the chosen arm on reward 1.
std::optional<int> adopt_stage(AgentState& agent, const ArmModel& model, Stream& stream);

// Size-one reservoir over a stream of suggestions: after n offers each
// offered item is held with probability 1/n. Equivalent in distribution to
// a uniform pick from the full multiset.
class SuggestionReservoir {
 public:
  void offer(ArmId arm, Stream& stream) {
    ++seen_;
    if (seen_ == 1 || stream.below(seen_) == 0) held_ = arm;
  }
  ArmId held() const noexcept { return held_; }
  std::size_t seen() const noexcept { return seen_; }

 private:
  ArmId held_ = kNullArm;
  std::size_t seen_ = 0;
};

}  // namespace colearn
