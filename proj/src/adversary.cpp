#include "colearn/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "colearn/error.hpp"

namespace colearn {

AdversaryMode parse_adversary_mode(std::string_view text) {
  if (text == "per_token") return AdversaryMode::kPerToken;
  if (text == "per_agent") return AdversaryMode::kPerAgent;
  throw ParameterError("unknown adversary mode '" + std::string(text) + "' (expected per_token or per_agent)");
}

std::string_view to_string(AdversaryMode mode) {
  return mode == AdversaryMode::kPerToken ? "per_token" : "per_agent";
}

std::size_t CorruptionSpec::count(std::size_t n) const {
  if (!(tau >= 0.0 && tau <= 1.0)) throw ParameterError("tau must lie in [0, 1]");
  // The epsilon absorbs representation error such as 0.7 * 10 = 6.999...
  const auto c = static_cast<std::size_t>(std::floor(tau * static_cast<double>(n) + 1e-9));
  return std::min(c, n);
}

std::vector<AgentId> sample_agents(std::size_t n, std::size_t k, Stream& stream) {
  if (k > n) throw ParameterError("cannot pick " + std::to_string(k) + " of " + std::to_string(n) + " agents");
  if (k == 0) return {};
  std::vector<AgentId> ids(n);
  std::iota(ids.begin(), ids.end(), AgentId{1});
  if (k < n) {
    for (std::size_t i = 0; i < k; ++i) std::swap(ids[i], ids[i + stream.below(n - i)]);
    ids.resize(k);
    std::sort(ids.begin(), ids.end());
  }
  return ids;
}

std::vector<AgentId> select_corrupted(std::size_t n, const CorruptionSpec& spec, Stream& stream) {
  return sample_agents(n, spec.count(n), stream);
}

}  // namespace colearn
