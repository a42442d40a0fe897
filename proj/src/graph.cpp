#include "colearn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>

#include "colearn/error.hpp"
#include "colearn/rng.hpp"

namespace colearn {

Graph::Graph(std::size_t n, std::span<const Edge> edges) {
  if (n == 0) throw GraphError("graph must have at least one agent");
  std::vector<std::size_t> degree(n, 0);
  for (const auto& [a, b] : edges) {
    if (a < 1 || b < 1 || a > n || b > n) {
      throw GraphError("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                       ") has an endpoint outside 1.." + std::to_string(n));
    }
    if (a == b) throw GraphError("self-loop at agent " + std::to_string(a));
    ++degree[a - 1];
    ++degree[b - 1];
  }
  offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + degree[i];
  targets_.resize(offsets_[n]);
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (const auto& [a, b] : edges) {
    targets_[cursor[a - 1]++] = b;
    targets_[cursor[b - 1]++] = a;
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto first = targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]);
    auto last = targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]);
    std::sort(first, last);
    if (auto dup = std::adjacent_find(first, last); dup != last) {
      throw GraphError("duplicate edge (" + std::to_string(i + 1) + ", " + std::to_string(*dup) + ")");
    }
  }
}

bool Graph::has_edge(AgentId i, AgentId j) const {
  auto adj = neighbors(i);
  return std::binary_search(adj.begin(), adj.end(), j);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (AgentId i = 1; i <= size(); ++i) {
    for (AgentId j : neighbors(i)) {
      if (i < j) out.emplace_back(i, j);
    }
  }
  return out;
}

namespace {

// Component label per agent (0-based), labels assigned in order of the
// lowest agent id of each component.
std::vector<std::size_t> component_labels(const Graph& g, std::size_t& count) {
  constexpr auto kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> label(g.size(), kUnset);
  count = 0;
  std::vector<AgentId> stack;
  for (AgentId s = 1; s <= g.size(); ++s) {
    if (label[s - 1] != kUnset) continue;
    label[s - 1] = count;
    stack.push_back(s);
    while (!stack.empty()) {
      AgentId v = stack.back();
      stack.pop_back();
      for (AgentId w : g.neighbors(v)) {
        if (label[w - 1] == kUnset) {
          label[w - 1] = count;
          stack.push_back(w);
        }
      }
    }
    ++count;
  }
  return label;
}

// BFS 2-coloring of every component. Returns false on an odd cycle.
bool two_color(const Graph& g, std::vector<int>& color) {
  color.assign(g.size(), -1);
  std::queue<AgentId> frontier;
  for (AgentId s = 1; s <= g.size(); ++s) {
    if (color[s - 1] != -1) continue;
    color[s - 1] = 0;
    frontier.push(s);
    while (!frontier.empty()) {
      AgentId v = frontier.front();
      frontier.pop();
      for (AgentId w : g.neighbors(v)) {
        if (color[w - 1] == -1) {
          color[w - 1] = 1 - color[v - 1];
          frontier.push(w);
        } else if (color[w - 1] == color[v - 1]) {
          return false;
        }
      }
    }
  }
  return true;
}

}  // namespace

bool is_connected(const Graph& g) {
  if (g.size() == 0) return false;
  std::size_t count = 0;
  component_labels(g, count);
  return count == 1;
}

bool is_bipartite(const Graph& g) {
  std::vector<int> color;
  return two_color(g, color);
}

void require_protocol_graph(const Graph& g) {
  if (g.size() == 0) throw GraphError("graph is empty");
  for (AgentId i = 1; i <= g.size(); ++i) {
    if (g.degree(i) == 0) throw GraphError("agent " + std::to_string(i) + " has no neighbors");
  }
  if (!is_connected(g)) throw GraphError("graph is not connected");
  if (is_bipartite(g)) throw GraphError("graph is bipartite");
}

Graph generate_random_graph(std::size_t n, double edge_probability, std::uint64_t seed) {
  if (n < 3) throw ParameterError("random graph needs n >= 3 to be connected and non-bipartite");
  if (!(edge_probability > 0.0 && edge_probability <= 1.0)) {
    throw ParameterError("edge probability must lie in (0, 1]");
  }
  Stream stream(StreamKey{.seed = seed, .stage = Stage::kGraph});
  std::vector<Edge> edges;
  for (AgentId i = 1; i <= n; ++i) {
    for (AgentId j = i + 1; j <= n; ++j) {
      if (edge_probability >= 1.0 || stream.bernoulli(edge_probability)) edges.emplace_back(i, j);
    }
  }
  Graph g(n, edges);

  std::size_t components = 0;
  auto label = component_labels(g, components);
  if (components > 1) {
    std::vector<AgentId> representative(components, 0);
    for (AgentId i = 1; i <= n; ++i) {
      if (representative[label[i - 1]] == 0) representative[label[i - 1]] = i;
    }
    for (std::size_t c = 0; c + 1 < components; ++c) {
      edges.emplace_back(representative[c], representative[c + 1]);
    }
    g = Graph(n, edges);
  }

  std::vector<int> color;
  if (two_color(g, color)) {
    AgentId first_seen[2] = {0, 0};
    for (AgentId i = 1; i <= n; ++i) {
      int c = color[i - 1];
      if (first_seen[c] == 0) {
        first_seen[c] = i;
      } else {
        edges.emplace_back(first_seen[c], i);
        break;
      }
    }
    g = Graph(n, edges);
  }
  return g;
}

Graph read_graph(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_line()) throw GraphError("graph file is empty");
  std::istringstream header(line);
  long long n = 0;
  long long m = 0;
  std::string rest;
  if (!(header >> n >> m) || (header >> rest) || n < 1 || m < 0) {
    throw GraphError("line 1: expected header \"n m\"");
  }
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long e = 0; e < m; ++e) {
    if (!next_line()) throw GraphError("expected " + std::to_string(m) + " edges, found " + std::to_string(e));
    std::istringstream row(line);
    long long i = 0;
    long long j = 0;
    if (!(row >> i >> j) || (row >> rest)) {
      throw GraphError("line " + std::to_string(line_no) + ": expected \"i j\"");
    }
    if (i < 1 || j > n || i >= j) {
      throw GraphError("line " + std::to_string(line_no) + ": need 1 <= i < j <= n");
    }
    edges.emplace_back(static_cast<AgentId>(i), static_cast<AgentId>(j));
  }
  if (next_line()) throw GraphError("line " + std::to_string(line_no) + ": trailing content after edge list");
  Graph g(static_cast<std::size_t>(n), edges);
  require_protocol_graph(g);
  return g;
}

Graph read_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open graph file " + path.string());
  return read_graph(in);
}

void write_graph(std::ostream& out, const Graph& g) {
  out << g.size() << ' ' << g.edge_count() << '\n';
  for (const auto& [i, j] : g.edges()) out << i << ' ' << j << '\n';
}

void write_graph(const std::filesystem::path& path, const Graph& g) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write graph file " + path.string());
  write_graph(out, g);
}

TransitionKernel::TransitionKernel(const Graph& g) {
  const std::size_t n = g.size();
  offsets_.assign(n + 1, 0);
  for (AgentId i = 1; i <= n; ++i) offsets_[i] = offsets_[i - 1] + g.degree(i) + 1;
  targets_.resize(offsets_[n]);
  probabilities_.resize(offsets_[n]);
  cumulative_.resize(offsets_[n]);
  for (AgentId i = 1; i <= n; ++i) {
    const double inv_di = 1.0 / static_cast<double>(g.degree(i));
    std::size_t at = offsets_[i - 1];
    double sum = 0.0;
    for (AgentId j : g.neighbors(i)) {
      const double p = std::min(inv_di, 1.0 / static_cast<double>(g.degree(j)));
      targets_[at] = j;
      probabilities_[at] = p;
      sum += p;
      cumulative_[at] = sum;
      ++at;
    }
    double residual = 1.0 - sum;
    if (residual < 0.0) {
      if (residual < -1e-12) throw GraphError("negative self-loop residual at agent " + std::to_string(i));
      residual = 0.0;
    }
    targets_[at] = i;
    probabilities_[at] = residual;
    cumulative_[at] = 1.0;
  }
  alias_.resize(offsets_[n]);
  for (std::size_t i = 0; i < n; ++i) build_alias(offsets_[i], offsets_[i + 1]);
}

// Vose's alias method over one row.
void TransitionKernel::build_alias(std::size_t first, std::size_t last) {
  const std::size_t len = last - first;
  std::vector<double> scaled(len);
  std::vector<std::uint32_t> small, large;
  for (std::size_t c = 0; c < len; ++c) {
    scaled[c] = probabilities_[first + c] * static_cast<double>(len);
    (scaled[c] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(c));
  }
  while (!small.empty() && !large.empty()) {
    const auto s = small.back();
    const auto l = large.back();
    small.pop_back();
    alias_[first + s] = {scaled[s], targets_[first + s], targets_[first + l]};
    scaled[l] -= 1.0 - scaled[s];
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftover small columns carry only rounding residue; both lists keep
  // their own column.
  for (const auto* rest : {&large, &small}) {
    for (auto c : *rest) alias_[first + c] = {1.0, targets_[first + c], targets_[first + c]};
  }
}

double TransitionKernel::probability(AgentId i, AgentId j) const {
  if (i == j) return self_probability(i);
  auto t = targets(i).first(degree(i));
  auto it = std::lower_bound(t.begin(), t.end(), j);
  if (it == t.end() || *it != j) return 0.0;
  return probabilities_[offsets_[i - 1] + static_cast<std::size_t>(it - t.begin())];
}

AgentId TransitionKernel::sample(AgentId i, double u) const {
  const auto first = cumulative_.begin() + static_cast<std::ptrdiff_t>(offsets_[i - 1]);
  const auto last = cumulative_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]);
  auto it = std::upper_bound(first, last - 1, u);
  // Falls through to the self entry when u is at or past the neighbor mass.
  return targets_[static_cast<std::size_t>(it - cumulative_.begin())];
}

std::vector<double> TransitionKernel::step(std::span<const double> pi) const {
  std::vector<double> next(size(), 0.0);
  for (AgentId i = 1; i <= size(); ++i) {
    const double mass = pi[i - 1];
    if (mass == 0.0) continue;
    auto t = targets(i);
    auto p = row(i);
    for (std::size_t e = 0; e < t.size(); ++e) next[t[e] - 1] += mass * p[e];
  }
  return next;
}

}  // namespace colearn
