#include "colearn/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "colearn/analysis.hpp"
#include "colearn/error.hpp"
#include "colearn/format.hpp"

namespace colearn {

namespace {

// Thrown by value parsers; rethrown as ConfigError with key and line.
struct BadValue {
  std::string what;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_real(std::string_view text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end) throw BadValue{"expected a number, got '" + std::string(text) + "'"};
  return v;
}

std::uint64_t parse_unsigned(std::string_view text) {
  std::uint64_t v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw BadValue{"expected a nonnegative integer, got '" + std::string(text) + "'"};
  }
  return v;
}

bool parse_bool(std::string_view text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw BadValue{"expected true or false, got '" + std::string(text) + "'"};
}

double probability(std::string_view text) {
  const double v = parse_real(text);
  if (!(v >= 0.0 && v <= 1.0)) throw BadValue{"must lie in [0, 1], got " + std::string(text)};
  return v;
}

double positive(std::string_view text) {
  const double v = parse_real(text);
  if (!(v > 0.0)) throw BadValue{"must be positive, got " + std::string(text)};
  return v;
}

std::uint32_t count32(std::string_view text, std::uint32_t minimum) {
  const auto v = parse_unsigned(text);
  if (v < minimum || v > 0xffffffffULL) throw BadValue{"must be an integer >= " + std::to_string(minimum)};
  return static_cast<std::uint32_t>(v);
}

struct KeySpec {
  std::string_view name;
  std::function<void(SimConfig&, std::string_view)> set;
  std::function<std::string(const SimConfig&)> get;
};

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = {
      {"N", [](SimConfig& c, std::string_view v) {
         c.agents = parse_unsigned(v);
         if (c.agents < 3) throw BadValue{"N must be >= 3"};
       }, [](const SimConfig& c) { return std::to_string(c.agents); }},
      {"K", [](SimConfig& c, std::string_view v) {
         c.arms = parse_unsigned(v);
         if (c.arms == 1) throw BadValue{"K must be >= 2"};
       }, [](const SimConfig& c) { return std::to_string(c.arms); }},
      {"p1", [](SimConfig& c, std::string_view v) { c.arm.p1 = probability(v); },
       [](const SimConfig& c) { return to_text(c.arm.p1); }},
      {"p2", [](SimConfig& c, std::string_view v) { c.arm.p2 = probability(v); },
       [](const SimConfig& c) { return to_text(c.arm.p2); }},
      {"arm_fill", [](SimConfig& c, std::string_view v) {
         if (v == "uniform") c.arm.fill = FillRule::kUniform;
         else if (v == "constant") c.arm.fill = FillRule::kConstant;
         else throw BadValue{"expected uniform or constant"};
       }, [](const SimConfig& c) { return std::string(c.arm.fill == FillRule::kUniform ? "uniform" : "constant"); }},
      {"arms_file", [](SimConfig& c, std::string_view v) { c.arm.means_file = std::string(v); },
       [](const SimConfig& c) { return c.arm.means_file.string(); }},
      {"arm_normalizer", [](SimConfig& c, std::string_view v) { c.arm.normalizer = positive(v); },
       [](const SimConfig& c) { return to_text(c.arm.normalizer); }},
      {"arm_subsample", [](SimConfig& c, std::string_view v) {
         c.arm.subsample = parse_unsigned(v);
         if (c.arm.subsample == 1) throw BadValue{"must be 0 or >= 2"};
       }, [](const SimConfig& c) { return std::to_string(c.arm.subsample); }},
      {"arm_subsample_replacement", [](SimConfig& c, std::string_view v) { c.arm.subsample_with_replacement = parse_bool(v); },
       [](const SimConfig& c) { return std::string(c.arm.subsample_with_replacement ? "true" : "false"); }},
      {"edge_probability", [](SimConfig& c, std::string_view v) {
         c.graph.edge_probability = parse_real(v);
         if (!(c.graph.edge_probability > 0.0 && c.graph.edge_probability <= 1.0)) throw BadValue{"must lie in (0, 1]"};
       }, [](const SimConfig& c) { return to_text(c.graph.edge_probability); }},
      {"graph_file", [](SimConfig& c, std::string_view v) { c.graph.file = std::string(v); },
       [](const SimConfig& c) { return c.graph.file.string(); }},
      {"mu", [](SimConfig& c, std::string_view v) { c.mu = probability(v); },
       [](const SimConfig& c) { return to_text(c.mu); }},
      {"h", [](SimConfig& c, std::string_view v) { c.h = positive(v); },
       [](const SimConfig& c) { return to_text(c.h); }},
      {"c_ttl", [](SimConfig& c, std::string_view v) { c.c_ttl = positive(v); },
       [](const SimConfig& c) { return to_text(c.c_ttl); }},
      {"c_slot", [](SimConfig& c, std::string_view v) { c.c_slot = positive(v); },
       [](const SimConfig& c) { return to_text(c.c_slot); }},
      {"log_base", [](SimConfig& c, std::string_view v) {
         c.log_base = parse_real(v);
         if (!(c.log_base > 1.0)) throw BadValue{"must exceed 1"};
       }, [](const SimConfig& c) { return to_text(c.log_base); }},
      {"tau", [](SimConfig& c, std::string_view v) { c.tau = probability(v); },
       [](const SimConfig& c) { return to_text(c.tau); }},
      {"adversary_mode", [](SimConfig& c, std::string_view v) {
         if (v == "per_token") c.adversary_mode = AdversaryMode::kPerToken;
         else if (v == "per_agent") c.adversary_mode = AdversaryMode::kPerAgent;
         else throw BadValue{"expected per_token or per_agent"};
       }, [](const SimConfig& c) { return std::string(to_string(c.adversary_mode)); }},
      {"max_rounds", [](SimConfig& c, std::string_view v) { c.max_rounds = count32(v, 1); },
       [](const SimConfig& c) { return std::to_string(c.max_rounds); }},
      {"seed", [](SimConfig& c, std::string_view v) { c.seed = parse_unsigned(v); },
       [](const SimConfig& c) { return std::to_string(c.seed); }},
      {"replications", [](SimConfig& c, std::string_view v) { c.replications = count32(v, 1); },
       [](const SimConfig& c) { return std::to_string(c.replications); }},
      {"initial_best", [](SimConfig& c, std::string_view v) { c.initial_best = count32(v, 0); },
       [](const SimConfig& c) { return std::to_string(c.initial_best); }},
      {"terminal_window", [](SimConfig& c, std::string_view v) { c.terminal_window = count32(v, 1); },
       [](const SimConfig& c) { return std::to_string(c.terminal_window); }},
      {"threads", [](SimConfig& c, std::string_view v) { c.threads = count32(v, 1); },
       [](const SimConfig& c) { return std::to_string(c.threads); }},
  };
  return table;
}

const KeySpec* find_key(std::string_view name) {
  for (const auto& k : key_table()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

void apply(SimConfig& config, const KeySpec& key, std::string_view value, std::size_t line) {
  try {
    key.set(config, value);
  } catch (const BadValue& e) {
    throw ConfigError(std::string(key.name), line, e.what);
  }
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.emplace_back(trim(text.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::vector<std::string_view> config_keys() {
  std::vector<std::string_view> out;
  for (const auto& k : key_table()) out.push_back(k.name);
  out.push_back("output_dir");
  out.push_back("max_cells");
  return out;
}

ExperimentPlan parse_config(std::istream& in) {
  ExperimentPlan plan;
  plan.base.agents = 0;
  std::set<std::string> seen;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view text = raw;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ConfigError("", line, "expected 'key = value'");
    const std::string key(trim(text.substr(0, eq)));
    const std::string_view value = trim(text.substr(eq + 1));
    if (key.empty()) throw ConfigError("", line, "missing key");
    if (!seen.insert(key).second) throw ConfigError(key, line, "duplicate key");

    if (key == "output_dir") {
      if (value.empty()) throw ConfigError(key, line, "must not be empty");
      plan.output_dir = std::string(value);
    } else if (key == "max_cells") {
      try {
        plan.max_cells = parse_unsigned(value);
      } catch (const BadValue& e) {
        throw ConfigError(key, line, e.what);
      }
      if (plan.max_cells == 0) throw ConfigError(key, line, "must be positive");
    } else if (key.rfind("sweep.", 0) == 0) {
      const std::string target = key.substr(6);
      const KeySpec* spec = find_key(target);
      if (spec == nullptr) throw ConfigError(key, line, "sweep over unknown key '" + target + "'");
      SweepAxis axis{target, split_list(value)};
      for (const auto& v : axis.values) {
        SimConfig scratch;
        apply(scratch, *spec, v, line);
      }
      plan.axes.push_back(std::move(axis));
    } else if (const KeySpec* spec = find_key(key)) {
      apply(plan.base, *spec, value, line);
    } else {
      throw ConfigError(key, line, "unknown key");
    }
  }

  std::size_t cells = 1;
  for (const auto& axis : plan.axes) {
    cells *= axis.values.size();
    if (cells > plan.max_cells) {
      throw ConfigError("sweep." + axis.key, 0, "sweep exceeds max_cells = " + std::to_string(plan.max_cells));
    }
  }
  expand_cells(plan);
  return plan;
}

ExperimentPlan parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, "cannot open config file " + path.string());
  return parse_config(in);
}

ExperimentPlan parse_config_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_config(in);
}

std::string serialize_config(const ExperimentPlan& plan) {
  std::ostringstream out;
  for (const auto& k : key_table()) out << k.name << " = " << k.get(plan.base) << '\n';
  out << "output_dir = " << plan.output_dir.string() << '\n';
  out << "max_cells = " << plan.max_cells << '\n';
  for (const auto& axis : plan.axes) {
    out << "sweep." << axis.key << " = ";
    for (std::size_t i = 0; i < axis.values.size(); ++i) out << (i ? "," : "") << axis.values[i];
    out << '\n';
  }
  return out.str();
}

std::vector<PlanCell> expand_cells(const ExperimentPlan& plan) {
  std::size_t total = 1;
  for (const auto& axis : plan.axes) total *= axis.values.size();
  if (total > plan.max_cells) throw ConfigError("", 0, "sweep exceeds max_cells");

  std::vector<PlanCell> cells;
  cells.reserve(total);
  for (std::size_t index = 0; index < total; ++index) {
    PlanCell cell;
    cell.index = index;
    cell.config = plan.base;
    std::size_t rem = index;
    std::size_t stride = total;
    for (const auto& axis : plan.axes) {
      stride /= axis.values.size();
      const auto& value = axis.values[rem / stride];
      rem %= stride;
      apply(cell.config, *find_key(axis.key), value, 0);
      cell.assignment.emplace_back(axis.key, value);
    }
    cell.config.seed = StreamKey{.seed = cell.config.seed, .stage = Stage::kCell, .agent = index}.hash();
    try {
      cell.config.validate();
    } catch (const ParameterError& e) {
      throw ConfigError("", 0, (plan.axes.empty() ? std::string() : "cell " + std::to_string(index) + ": ") + e.what());
    }
    cells.push_back(std::move(cell));
  }
  return cells;
}

PlanReport run_plan(const ExperimentPlan& plan, std::ostream* progress) {
  const auto cells = expand_cells(plan);
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(plan.output_dir, ec);
  const fs::path probe = plan.output_dir / ".write_probe";
  {
    std::ofstream out(probe);
    if (ec || !out) throw IoError("output directory " + plan.output_dir.string() + " is not writable");
  }
  fs::remove(probe, ec);

  auto open = [](const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
  };
  auto cell_file = [&](std::size_t index, std::string_view what) {
    std::string name = std::to_string(index);
    name.insert(0, name.size() < 4 ? 4 - name.size() : 0, '0');
    return plan.output_dir / ("cell_" + name + "_" + std::string(what) + ".csv");
  };

  PlanReport report;
  std::ostringstream manifest;
  manifest << "cell,seed";
  for (const auto& axis : plan.axes) manifest << ',' << axis.key;
  manifest << ",trajectory,summary,meanfield,success_rate,median_rounds_to_success\n";

  for (const auto& cell : cells) {
    if (progress) *progress << "cell " << cell.index + 1 << "/" << cells.size() << '\n';
    Simulation sim(cell.config);
    ExperimentSummary summary = sim.run_experiment();

    const fs::path trajectory = cell_file(cell.index, "trajectory");
    const fs::path summary_path = cell_file(cell.index, "summary");
    const fs::path meanfield = cell_file(cell.index, "meanfield");
    {
      auto out = open(trajectory);
      write_trajectory_csv(out, sim.config().agents, summary.replications);
    }
    {
      auto out = open(summary_path);
      write_summary_csv(out, summary.replications);
    }
    {
      auto out = open(meanfield);
      PopularityState start = PopularityState::all_null(sim.config().agents, sim.config().arms);
      const double zeta = static_cast<double>(sim.config().initial_best) / static_cast<double>(sim.config().agents);
      start.q[1] = zeta;
      start.q[0] = 1.0 - zeta;
      out << "round,Q1_meanfield\n";
      const auto q1 = meanfield_q1_trajectory(start, sim.config().mu, sim.arms(), sim.config().max_rounds);
      for (std::size_t r = 0; r < q1.size(); ++r) out << r + 1 << ',' << to_text(q1[r]) << '\n';
    }
    manifest << cell.index << ',' << cell.config.seed;
    for (const auto& [key, value] : cell.assignment) manifest << ',' << value;
    manifest << ',' << trajectory.filename().string() << ',' << summary_path.filename().string() << ','
             << meanfield.filename().string() << ',' << to_text(summary.success_rate) << ',';
    if (summary.median_rounds_to_success) manifest << to_text(*summary.median_rounds_to_success);
    manifest << '\n';
    report.files.insert(report.files.end(), {trajectory, summary_path, meanfield});
    report.summaries.push_back(std::move(summary));
  }

  const fs::path manifest_path = plan.output_dir / "manifest.csv";
  {
    auto out = open(manifest_path);
    out << manifest.str();
  }
  report.files.push_back(manifest_path);
  return report;
}

}  // namespace colearn
