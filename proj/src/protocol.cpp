#include "colearn/protocol.hpp"

#include <algorithm>
#include <cmath>

#include "colearn/error.hpp"

namespace colearn {

std::span<const Token> TokenQueue::pop_front(std::size_t n) {
  const std::size_t take = std::min(n, size());
  std::span<const Token> out(items_.data() + head_, take);
  head_ += take;
  return out;
}

void TokenQueue::compact() {
  if (head_ == 0) return;
  items_.erase(items_.begin(), items_.begin() + static_cast<std::ptrdiff_t>(head_));
  head_ = 0;
}

std::uint32_t log_budget(double h, std::size_t n, double log_base) {
  if (!(h > 0.0)) throw ParameterError("h must be positive");
  if (!(log_base > 1.0)) throw ParameterError("log base must exceed 1");
  if (n < 2) throw ParameterError("need at least 2 agents");
  const double value = h * std::log(static_cast<double>(n)) / std::log(log_base);
  return static_cast<std::uint32_t>(std::ceil(value - 1e-9));
}

TokenBudget TokenBudget::from(std::size_t n, double h, double c_ttl, double c_slot, double log_base) {
  const double lg = std::log(static_cast<double>(n)) / std::log(log_base);
  TokenBudget b;
  b.tokens_per_agent = log_budget(h, n, log_base);
  b.ttl = std::max<std::uint32_t>(1, static_cast<std::uint32_t>(std::ceil(c_ttl * lg - 1e-9)));
  b.slots_per_round = std::max<std::uint32_t>(1, static_cast<std::uint32_t>(std::ceil(c_slot * lg * lg - 1e-9)));
  return b;
}

SlotStats run_slot(std::span<AgentState> agents, const TransitionKernel& kernel, std::uint32_t pop_budget,
                   std::span<Stream> streams, SlotScratch& scratch) {
  // Pops are capped by the pre-slot queue lengths, so tokens delivered
  // during this slot (always behind them at the tail) wait for the next one.
  // Delivering while iterating senders in id order is then equivalent to
  // collecting every transfer first.
  auto& pops = scratch.pop_counts;
  pops.resize(agents.size());
  for (std::size_t i = 0; i < agents.size(); ++i) {
    agents[i].fifo.compact();
    pops[i] = static_cast<std::uint32_t>(std::min<std::size_t>(pop_budget, agents[i].fifo.size()));
  }

  SlotStats stats;
  stats.received.assign(agents.size(), 0);
  for (std::size_t i = 0; i < agents.size(); ++i) {
    AgentState& sender = agents[i];
    Stream& stream = streams[sender.id - 1];
    for (std::uint32_t n = 0; n < pops[i]; ++n) {
      Token t = sender.fifo.pop();
      --t.counter;
      const AgentId to = kernel.sample_alias(sender.id, stream.uniform01());
      AgentState& receiver = agents[to - 1];
      ++stats.received[to - 1];
      if (t.feasible()) {
        receiver.fifo.push(t);
      } else {
        receiver.suggestions.push_back(t.arm);
        ++stats.expired;
      }
    }
    stats.forwarded += pops[i];
  }
  for (std::size_t i = 0; i < agents.size(); ++i) {
    stats.max_queue = std::max(stats.max_queue, agents[i].fifo.size());
    stats.max_received = std::max(stats.max_received, stats.received[i]);
  }
  return stats;
}

ArmId sample_stage(AgentState& agent, double mu, std::size_t arm_count, Stream& stream) {
  auto from_suggestions = [&]() -> ArmId {
    if (agent.suggestions.empty()) return kNullArm;
    return agent.suggestions[stream.below(agent.suggestions.size())];
  };
  if (agent.omega == kNullArm && stream.uniform01() < mu) {
    agent.chosen = static_cast<ArmId>(1 + stream.below(arm_count));
  } else {
    agent.chosen = from_suggestions();
  }
  return agent.chosen;
}

std::optional<int> adopt_stage(AgentState& agent, const ArmModel& model, Stream& stream) {
  if (agent.chosen == kNullArm) return std::nullopt;
  const int reward = model.pull(agent.chosen, stream);
  if (reward == 1) agent.omega = agent.chosen;
  return reward;
}

}  // namespace colearn
