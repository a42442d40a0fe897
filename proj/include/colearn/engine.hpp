#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "colearn/adversary.hpp"
#include "colearn/arms.hpp"
#include "colearn/graph.hpp"
#include "colearn/protocol.hpp"

namespace colearn {

struct GraphSpec {
  double edge_probability = 0.01;
  std::filesystem::path file;  // when set, overrides the generator

  bool operator==(const GraphSpec&) const = default;
};

struct ArmSpec {
  double p1 = 0.8;
  double p2 = 0.6;
  FillRule fill = FillRule::kUniform;
  std::filesystem::path means_file;  // when set, overrides p1/p2/fill
  double normalizer = 5.0;
  std::size_t subsample = 0;  // 0 keeps every arm of the file
  bool subsample_with_replacement = false;

  bool operator==(const ArmSpec&) const = default;
};

struct SimConfig {
  std::size_t agents = 0;  // N
  std::size_t arms = 0;    // K; may stay 0 when arms come from a file
  GraphSpec graph;
  ArmSpec arm;
  double mu = 0.3;
  double h = 10.0;
  double c_ttl = 3.0;
  double c_slot = 1.0;
  double log_base = 2.0;
  double tau = 0.0;
  AdversaryMode adversary_mode = AdversaryMode::kPerToken;
  std::uint32_t max_rounds = 200;
  std::uint64_t seed = 0;
  std::uint32_t replications = 1;
  std::uint32_t initial_best = 0;  // Z_1(0)
  std::uint32_t terminal_window = 20;
  std::uint32_t threads = 1;

  // Throws ParameterError on the first violated constraint.
  void validate() const;

  bool operator==(const SimConfig&) const = default;
};

struct RoundMetrics {
  std::uint32_t round = 0;
  std::vector<std::size_t> adoption_counts;  // Z_0..Z_K
  double q1 = 0.0;
  std::size_t tokens_emitted = 0;
  std::size_t tokens_expired = 0;
  std::size_t tokens_discarded = 0;
  std::uint32_t max_received_per_slot = 0;
  std::size_t corrupted_count = 0;
  std::uint32_t slots_run = 0;
  std::size_t slot_observations = 0;        // (agent, slot) pairs in executed slots
  std::size_t overloaded_observations = 0;  // pairs receiving more than twice the pop budget

  std::size_t z(ArmId k) const { return adoption_counts[k]; }
  bool operator==(const RoundMetrics&) const = default;
};

enum class Outcome { kSuccess, kTimeout };

struct ReplicationResult {
  std::uint32_t replication = 0;
  std::vector<RoundMetrics> rounds;
  Outcome outcome = Outcome::kTimeout;
  std::optional<std::uint32_t> rounds_to_success;  // first round with Z_1 = N
  double terminal_q1_mean = 0.0;

  bool operator==(const ReplicationResult&) const = default;
};

struct ExperimentSummary {
  std::vector<ReplicationResult> replications;  // ordered by index
  double success_rate = 0.0;
  std::optional<double> median_rounds_to_success;  // over successful replications
  std::vector<double> mean_q1;                     // per round, index 0 is round 1
};

// Mutable state of one replication in progress.
struct ReplicationState {
  std::uint32_t replication = 0;
  std::uint32_t round = 0;  // last completed round
  std::vector<AgentState> agents;
  std::vector<Stream> streams;
  SlotScratch scratch;
};

class Simulation {
 public:
  // Builds the graph and arm model the config describes.
  explicit Simulation(SimConfig config);
  Simulation(SimConfig config, Graph graph, ArmModel arms);

  const SimConfig& config() const noexcept { return config_; }
  const Graph& graph() const noexcept { return graph_; }
  const TransitionKernel& kernel() const noexcept { return kernel_; }
  const ArmModel& arms() const noexcept { return arms_; }
  const TokenBudget& budget() const noexcept { return budget_; }

  // Round-0 state: every agent null except initial_best agents on arm 1.
  ReplicationState start(std::uint32_t replication) const;

  // Disseminating, sampling and adopting for round state.round + 1.
  RoundMetrics run_round(ReplicationState& state) const;

  // Rounds until Z_1 = N (absorbing, so the run stops there when tau = 0)
  // or max_rounds.
  ReplicationResult run_replication(std::uint32_t replication) const;

  ExperimentSummary run_experiment() const;

 private:
  SimConfig config_;
  Graph graph_;
  TransitionKernel kernel_;
  ArmModel arms_;
  TokenBudget budget_;
};

// Order-independent reduction over replication results.
ExperimentSummary summarize(std::vector<ReplicationResult> results, std::uint32_t max_rounds);

// Graph and arm model for a config; exposed for tools that need them
// without running a simulation.
Graph build_graph(const SimConfig& config);
ArmModel build_arms(const SimConfig& config);

void write_trajectory_csv(std::ostream& out, std::size_t agents, std::span<const ReplicationResult> results);
void write_summary_csv(std::ostream& out, std::span<const ReplicationResult> results);

}  // namespace colearn
