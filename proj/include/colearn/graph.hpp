#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace colearn {

// Agents are numbered 1..n.
using AgentId = std::uint32_t;
using Edge = std::pair<AgentId, AgentId>;

// Undirected simple graph in compressed adjacency form. Construction rejects
// self-loops, duplicate edges and out-of-range endpoints; connectivity and
// bipartiteness are checked separately (see require_protocol_graph).
class Graph {
 public:
  Graph() = default;
  Graph(std::size_t n, std::span<const Edge> edges);

  std::size_t size() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return targets_.size() / 2; }

  // Sorted ascending.
  std::span<const AgentId> neighbors(AgentId i) const {
    return {targets_.data() + offsets_[i - 1], targets_.data() + offsets_[i]};
  }
  std::size_t degree(AgentId i) const { return offsets_[i] - offsets_[i - 1]; }
  bool has_edge(AgentId i, AgentId j) const;

  // Edges as (i, j) with i < j, lexicographically sorted.
  std::vector<Edge> edges() const;

  bool operator==(const Graph&) const = default;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<AgentId> targets_;
};

bool is_connected(const Graph& g);
bool is_bipartite(const Graph& g);

// Throws GraphError unless g is non-empty, has no isolated agent, is connected
// and is not bipartite.
void require_protocol_graph(const Graph& g);

// Erdos-Renyi G(n, p) followed by a deterministic repair: components are
// chained through their lowest-id agents, then a bipartite result gets a
// chord between the two lowest-id agents of equal color.
Graph generate_random_graph(std::size_t n, double edge_probability, std::uint64_t seed);

// Text format: "n m" then m lines "i j" with 1 <= i < j <= n.
Graph read_graph(std::istream& in);
Graph read_graph(const std::filesystem::path& path);
void write_graph(std::ostream& out, const Graph& g);
void write_graph(const std::filesystem::path& path, const Graph& g);

// Metropolis-Hastings forwarding kernel:
//   psi(i, j) = min(1/d_i, 1/d_j) for neighbors, psi(i, i) = 1 - sum of the row.
// Each row is stored as neighbors (ascending) followed by the agent itself,
// with a cumulative distribution for sampling.
class TransitionKernel {
 public:
  explicit TransitionKernel(const Graph& g);

  std::size_t size() const noexcept { return offsets_.size() - 1; }

  // Row entries for agent i: targets, probabilities, cumulative sums.
  std::span<const AgentId> targets(AgentId i) const {
    return {targets_.data() + offsets_[i - 1], targets_.data() + offsets_[i]};
  }
  std::span<const double> row(AgentId i) const {
    return {probabilities_.data() + offsets_[i - 1], probabilities_.data() + offsets_[i]};
  }

  // Zero if j is neither i nor a neighbor of i.
  double probability(AgentId i, AgentId j) const;
  double self_probability(AgentId i) const { return probabilities_[offsets_[i] - 1]; }
  std::size_t degree(AgentId i) const { return offsets_[i] - offsets_[i - 1] - 1; }

  // Destination for a uniform draw u in [0, 1), by inverting the cumulative row.
  AgentId sample(AgentId i, double u) const;

  // Destination for a uniform draw u in [0, 1), via the row's alias table.
  // Same distribution as sample(), O(1).
  AgentId sample_alias(AgentId i, double u) const {
    const std::size_t first = offsets_[i - 1];
    const double x = u * static_cast<double>(offsets_[i] - first);
    const auto column = static_cast<std::size_t>(x);
    const AliasEntry& e = alias_[first + column];
    return x - static_cast<double>(column) < e.threshold ? e.target : e.alias;
  }

  // pi * Psi for a distribution indexed 0..n-1.
  std::vector<double> step(std::span<const double> pi) const;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<AgentId> targets_;
  std::vector<double> probabilities_;
  std::vector<double> cumulative_;
  struct AliasEntry {
    double threshold;
    AgentId target;
    AgentId alias;
  };
  std::vector<AliasEntry> alias_;

  void build_alias(std::size_t first, std::size_t last);
};

}  // namespace colearn
