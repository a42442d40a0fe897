#include "colearn/engine.hpp"

#include <algorithm>
#include <atomic>
#include <ostream>
#include <string>
#include <thread>

#include "colearn/error.hpp"
#include "colearn/format.hpp"

namespace colearn {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ParameterError(what);
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

const SimConfig& checked(const SimConfig& config) {
  config.validate();
  return config;
}

}  // namespace

void SimConfig::validate() const {
  require(agents >= 3, "N must be >= 3");
  require(arm.means_file.empty() ? arms >= 2 : (arms == 0 || arms >= 2), "K must be >= 2");
  require(graph.file.empty() ? (graph.edge_probability > 0.0 && graph.edge_probability <= 1.0) : true,
          "edge_probability must lie in (0, 1]");
  if (arm.means_file.empty()) {
    require(is_probability(arm.p1) && is_probability(arm.p2), "p1 and p2 must lie in [0, 1]");
    require(arm.p2 < arm.p1, "p2 must be strictly below p1");
  } else {
    require(arm.normalizer > 0.0, "normalizer must be positive");
    require(arm.subsample == 0 || arm.subsample >= 2, "subsample must be 0 or >= 2");
    require(arms == 0 || arm.subsample == 0 || arms == arm.subsample, "K conflicts with subsample");
  }
  require(is_probability(mu), "mu must lie in [0, 1]");
  require(h > 0.0, "h must be positive");
  require(c_ttl > 0.0, "c_ttl must be positive");
  require(c_slot > 0.0, "c_slot must be positive");
  require(log_base > 1.0, "log_base must exceed 1");
  require(is_probability(tau), "tau must lie in [0, 1]");
  require(max_rounds >= 1, "max_rounds must be >= 1");
  require(replications >= 1, "replications must be >= 1");
  require(initial_best <= agents, "initial_best must not exceed N");
  require(terminal_window >= 1, "terminal_window must be >= 1");
  require(threads >= 1, "threads must be >= 1");
}

Graph build_graph(const SimConfig& config) {
  if (!config.graph.file.empty()) return read_graph(config.graph.file);
  return generate_random_graph(config.agents, config.graph.edge_probability,
                               StreamKey{.seed = config.seed, .stage = Stage::kGraph}.hash());
}

ArmModel build_arms(const SimConfig& config) {
  const std::uint64_t seed = StreamKey{.seed = config.seed, .stage = Stage::kArms}.hash();
  if (config.arm.means_file.empty()) {
    return sample_arm_means(config.arms, config.arm.p1, config.arm.p2, config.arm.fill, seed);
  }
  ArmModel pool = load_arm_means(config.arm.means_file, config.arm.normalizer);
  if (config.arm.subsample != 0) {
    return subsample_arms(pool, config.arm.subsample, config.arm.subsample_with_replacement, seed);
  }
  return pool;
}

Simulation::Simulation(SimConfig config)
    : Simulation(config, build_graph(checked(config)), build_arms(checked(config))) {}

Simulation::Simulation(SimConfig config, Graph graph, ArmModel arms)
    : config_(std::move(config)), graph_(std::move(graph)), kernel_(graph_), arms_(std::move(arms)) {
  if (config_.arms == 0) config_.arms = arms_.arm_count();
  config_.validate();
  if (graph_.size() != config_.agents) {
    throw ParameterError("graph has " + std::to_string(graph_.size()) + " agents, config says " +
                         std::to_string(config_.agents));
  }
  if (arms_.arm_count() != config_.arms) {
    throw ParameterError("arm model has " + std::to_string(arms_.arm_count()) + " arms, config says " +
                         std::to_string(config_.arms));
  }
  require_protocol_graph(graph_);
  budget_ = TokenBudget::from(config_.agents, config_.h, config_.c_ttl, config_.c_slot, config_.log_base);
}

ReplicationState Simulation::start(std::uint32_t replication) const {
  const std::size_t n = config_.agents;
  ReplicationState state;
  state.replication = replication;
  state.agents.resize(n);
  state.streams.resize(n);
  for (std::size_t i = 0; i < n; ++i) state.agents[i].id = static_cast<AgentId>(i + 1);
  if (config_.initial_best > 0) {
    Stream stream(StreamKey{.seed = config_.seed, .replication = replication, .stage = Stage::kInitial});
    for (AgentId id : sample_agents(n, config_.initial_best, stream)) {
      state.agents[id - 1].omega = 1;
    }
  }
  return state;
}

RoundMetrics Simulation::run_round(ReplicationState& state) const {
  const std::size_t n = config_.agents;
  const std::size_t k_arms = config_.arms;
  const std::uint32_t round = state.round + 1;
  auto key = [&](Stage stage, std::uint64_t agent) {
    return StreamKey{.seed = config_.seed, .replication = state.replication, .round = round, .stage = stage,
                     .agent = agent};
  };

  RoundMetrics m;
  m.round = round;

  // Disseminating.
  std::vector<char> corrupted(n, 0);
  if (config_.tau > 0.0) {
    Stream stream(key(Stage::kCorruption, 0));
    for (AgentId id : select_corrupted(n, CorruptionSpec{config_.tau, config_.adversary_mode}, stream)) {
      corrupted[id - 1] = 1;
    }
    m.corrupted_count = static_cast<std::size_t>(std::count(corrupted.begin(), corrupted.end(), 1));
  }
  for (auto& agent : state.agents) {
    agent.fifo.clear();
    agent.suggestions.clear();
    agent.chosen = kNullArm;
    if (agent.omega == kNullArm) continue;
    const bool bad = corrupted[agent.id - 1] != 0;
    if (!bad) {
      m.tokens_emitted += emit_tokens(agent, budget_.tokens_per_agent, budget_.ttl);
      continue;
    }
    Stream stream(key(Stage::kEmission, agent.id));
    if (config_.adversary_mode == AdversaryMode::kPerAgent) {
      const ArmId fake = falsify_emission(true, agent.omega, k_arms, stream);
      m.tokens_emitted += emit_tokens(agent, budget_.tokens_per_agent, budget_.ttl, [&] { return fake; });
    } else {
      m.tokens_emitted += emit_tokens(agent, budget_.tokens_per_agent, budget_.ttl,
                                      [&] { return falsify_emission(true, agent.omega, k_arms, stream); });
    }
  }

  std::size_t queued = m.tokens_emitted;
  if (queued > 0) {
    for (std::size_t i = 0; i < n; ++i) state.streams[i].reseed(key(Stage::kDissemination, i + 1));
  }
  const std::uint32_t overload = 2 * budget_.tokens_per_agent;
  for (std::uint32_t slot = 0; slot < budget_.slots_per_round && queued > 0; ++slot) {
    SlotStats s = run_slot(state.agents, kernel_, budget_.tokens_per_agent, state.streams, state.scratch);
    ++m.slots_run;
    m.slot_observations += n;
    m.max_received_per_slot = std::max(m.max_received_per_slot, s.max_received);
    m.overloaded_observations +=
        static_cast<std::size_t>(std::count_if(s.received.begin(), s.received.end(),
                                               [&](std::uint32_t r) { return r > overload; }));
    m.tokens_expired += s.expired;
    queued -= s.expired;
  }
  m.tokens_discarded = queued;

  // Sampling, then adopting; leftover tokens are dropped.
  Stream stream;
  for (auto& agent : state.agents) {
    agent.fifo.clear();
    stream.reseed(key(Stage::kSampling, agent.id));
    sample_stage(agent, config_.mu, k_arms, stream);
  }
  for (auto& agent : state.agents) {
    stream.reseed(key(Stage::kAdoption, agent.id));
    adopt_stage(agent, arms_, stream);
    agent.suggestions.clear();
  }

  m.adoption_counts.assign(k_arms + 1, 0);
  for (const auto& agent : state.agents) ++m.adoption_counts[agent.omega];
  m.q1 = static_cast<double>(m.adoption_counts[1]) / static_cast<double>(n);
  state.round = round;
  return m;
}

ReplicationResult Simulation::run_replication(std::uint32_t replication) const {
  ReplicationResult result;
  result.replication = replication;
  ReplicationState state = start(replication);
  const std::size_t n = config_.agents;
  for (std::uint32_t r = 1; r <= config_.max_rounds; ++r) {
    result.rounds.push_back(run_round(state));
    const RoundMetrics& m = result.rounds.back();
    if (m.z(1) == n && !result.rounds_to_success) result.rounds_to_success = r;
    if (result.rounds_to_success && config_.tau == 0.0) break;
  }
  result.outcome = result.rounds_to_success ? Outcome::kSuccess : Outcome::kTimeout;

  // Terminal window over rounds max_rounds-w+1..max_rounds; rounds skipped
  // after an absorbing success count as Q1 = 1.
  const std::uint32_t w = std::min(config_.terminal_window, config_.max_rounds);
  double sum = 0.0;
  for (std::uint32_t r = config_.max_rounds - w + 1; r <= config_.max_rounds; ++r) {
    sum += r <= result.rounds.size() ? result.rounds[r - 1].q1 : 1.0;
  }
  result.terminal_q1_mean = sum / w;
  return result;
}

ExperimentSummary summarize(std::vector<ReplicationResult> results, std::uint32_t max_rounds) {
  std::sort(results.begin(), results.end(),
            [](const auto& a, const auto& b) { return a.replication < b.replication; });
  ExperimentSummary s;
  std::vector<std::uint32_t> hits;
  std::size_t longest = 0;
  for (const auto& r : results) {
    if (r.rounds_to_success) hits.push_back(*r.rounds_to_success);
    longest = std::max(longest, r.rounds.size());
  }
  longest = std::min<std::size_t>(longest, max_rounds);
  if (!results.empty()) s.success_rate = static_cast<double>(hits.size()) / static_cast<double>(results.size());
  if (!hits.empty()) {
    std::sort(hits.begin(), hits.end());
    const std::size_t mid = hits.size() / 2;
    s.median_rounds_to_success =
        hits.size() % 2 == 1 ? double(hits[mid]) : 0.5 * (double(hits[mid - 1]) + double(hits[mid]));
  }
  s.mean_q1.assign(longest, 0.0);
  for (const auto& r : results) {
    for (std::size_t i = 0; i < longest; ++i) {
      // A replication that stopped early holds its last popularity.
      s.mean_q1[i] += i < r.rounds.size() ? r.rounds[i].q1 : (r.rounds.empty() ? 0.0 : r.rounds.back().q1);
    }
  }
  if (!results.empty()) {
    for (double& q : s.mean_q1) q /= static_cast<double>(results.size());
  }
  s.replications = std::move(results);
  return s;
}

ExperimentSummary Simulation::run_experiment() const {
  const std::uint32_t count = config_.replications;
  std::vector<ReplicationResult> results(count);
  const std::uint32_t workers = std::min(config_.threads, count);
  if (workers <= 1) {
    for (std::uint32_t r = 0; r < count; ++r) results[r] = run_replication(r);
  } else {
    std::atomic<std::uint32_t> next{0};
    std::vector<std::jthread> pool;
    for (std::uint32_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::uint32_t r = next++; r < count; r = next++) results[r] = run_replication(r);
      });
    }
  }
  return summarize(std::move(results), config_.max_rounds);
}

void write_trajectory_csv(std::ostream& out, std::size_t agents, std::span<const ReplicationResult> results) {
  out << "replication,round,Q1,Z0,Z1,Zrest,tokens_emitted,tokens_expired,max_received_per_slot,corrupted_count\n";
  for (const auto& r : results) {
    for (const auto& m : r.rounds) {
      const std::size_t rest = agents - m.z(0) - m.z(1);
      out << r.replication << ',' << m.round << ',' << to_text(m.q1) << ',' << m.z(0) << ',' << m.z(1) << ','
          << rest << ',' << m.tokens_emitted << ',' << m.tokens_expired << ',' << m.max_received_per_slot << ','
          << m.corrupted_count << '\n';
    }
  }
}

void write_summary_csv(std::ostream& out, std::span<const ReplicationResult> results) {
  out << "replication,outcome,rounds_to_success,terminal_Q1_mean\n";
  for (const auto& r : results) {
    out << r.replication << ',' << (r.outcome == Outcome::kSuccess ? "success" : "timeout") << ',';
    if (r.rounds_to_success) out << *r.rounds_to_success;
    out << ',' << to_text(r.terminal_q1_mean) << '\n';
  }
}

}  // namespace colearn
