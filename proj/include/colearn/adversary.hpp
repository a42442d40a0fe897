#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "colearn/arms.hpp"
#include "colearn/graph.hpp"
#include "colearn/rng.hpp"

namespace colearn {

// per_token: each emitted token of a corrupted agent carries its own random
// arm. per_agent: one random arm per corrupted agent per round.
enum class AdversaryMode { kPerToken, kPerAgent };

AdversaryMode parse_adversary_mode(std::string_view text);
std::string_view to_string(AdversaryMode mode);

struct CorruptionSpec {
  double tau = 0.0;
  AdversaryMode mode = AdversaryMode::kPerToken;

  // floor(tau * n); throws ParameterError if tau is outside [0, 1].
  std::size_t count(std::size_t n) const;
};

// k distinct agents of 1..n, uniform without replacement, ascending.
std::vector<AgentId> sample_agents(std::size_t n, std::size_t k, Stream& stream);

// count(n) distinct agents drawn uniformly without replacement, ascending.
std::vector<AgentId> select_corrupted(std::size_t n, const CorruptionSpec& spec, Stream& stream);

// Arm carried by one emitted token. Honest agents disseminate their adoption;
// corrupted agents disseminate a uniform arm from 1..K. Draws from the
// stream only when corrupted.
inline ArmId falsify_emission(bool corrupted, ArmId omega, std::size_t arm_count, Stream& stream) {
  if (!corrupted) return omega;
  return static_cast<ArmId>(1 + stream.below(arm_count));
}

}  // namespace colearn
