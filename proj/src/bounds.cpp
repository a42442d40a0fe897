#include "colearn/bounds.hpp"

#include <charconv>
#include <sstream>

#include "colearn/analysis.hpp"
#include "colearn/error.hpp"
#include "colearn/format.hpp"
#include "colearn/graph.hpp"

namespace colearn {

namespace {

using Args = std::map<std::string, std::string>;

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  if (out.empty()) out.emplace_back();
  return out;
}

double real_arg(const Args& args, const std::string& key) {
  auto it = args.find(key);
  if (it == args.end()) throw ParameterError("missing --" + key);
  double v = 0.0;
  const auto& s = it->second;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) throw ParameterError("--" + key + " expects a number");
  return v;
}

std::size_t count_arg(const Args& args, const std::string& key) {
  auto it = args.find(key);
  if (it == args.end()) throw ParameterError("missing --" + key);
  std::size_t v = 0;
  const auto& s = it->second;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParameterError("--" + key + " expects a nonnegative integer");
  }
  return v;
}

struct Evaluation {
  std::string label;
  double value;
  std::vector<std::pair<std::string, std::string>> extra;
};

Evaluation evaluate_one(std::string_view name, const Args& args) {
  if (name == "reliability") {
    return {"reliability_threshold", reliability_threshold(real_arg(args, "alpha"), real_arg(args, "p1"), real_arg(args, "p2")), {}};
  }
  if (name == "corollary") {
    const double tau = real_arg(args, "tau");
    std::vector<double> means;
    if (auto it = args.find("means"); it != args.end()) {
      for (const auto& m : split(it->second)) means.push_back(real_arg({{"means", m}}, "means"));
      if (args.contains("K") && count_arg(args, "K") != means.size()) throw ParameterError("--K disagrees with --means");
    } else {
      const std::size_t k = count_arg(args, "K");
      if (k < 1) throw ParameterError("--K must be positive");
      const double rest = args.contains("p2") ? real_arg(args, "p2") : 0.0;
      const double best = args.contains("p1") ? real_arg(args, "p1") : 1.0;
      means.assign(k, rest);
      means[0] = best;
    }
    return {"stationary_popularity_upper", stationary_popularity_upper(tau, means), {}};
  }
  if (name == "learnability") {
    const auto b = learnability_bound(real_arg(args, "q"), count_arg(args, "zeta"), count_arg(args, "N"));
    Evaluation e{"learnability_bound", b.value, {}};
    if (b.domain_warning) e.extra.emplace_back("domain_warning", "q<0.5");
    return e;
  }
  if (name == "init") {
    return {"init_success_bound",
            init_success_bound(count_arg(args, "N"), real_arg(args, "mu"), real_arg(args, "p1"), count_arg(args, "K"),
                               real_arg(args, "delta1")),
            {}};
  }
  if (name == "mixing") {
    auto it = args.find("graph");
    if (it == args.end()) throw ParameterError("missing --graph");
    const Graph g = read_graph(std::filesystem::path(it->second));
    const TransitionKernel kernel(g);
    MixingOptions options;
    if (args.contains("start")) options.start = static_cast<AgentId>(count_arg(args, "start"));
    const auto steps = mixing_profile(kernel, real_arg(args, "epsilon"), options);
    return {"mixing_steps", static_cast<double>(steps),
            {{"stationarity_residual", to_text(stationarity_residual(kernel))}}};
  }
  throw ParameterError("unknown bound '" + std::string(name) + "'");
}

}  // namespace

std::vector<std::string_view> bound_names() { return {"reliability", "corollary", "learnability", "init", "mixing"}; }

std::string evaluate_bounds(std::string_view name, const Args& args, int decimals) {
  std::string swept;
  for (const auto& [key, value] : args) {
    if (key == "means" || key == "graph" || value.find(',') == std::string::npos) continue;
    if (!swept.empty()) throw ParameterError("only one argument may hold a list (got --" + swept + " and --" + key + ")");
    swept = key;
  }
  auto render = [&](const Evaluation& e) {
    return name == "mixing" && e.label == "mixing_steps" ? std::to_string(static_cast<long long>(e.value))
                                                         : to_fixed(e.value, decimals);
  };
  std::ostringstream out;
  if (swept.empty()) {
    const auto e = evaluate_one(name, args);
    out << e.label << '=' << render(e) << '\n';
    for (const auto& [k, v] : e.extra) out << k << '=' << v << '\n';
    return out.str();
  }
  out << "param,value,bound\n";
  for (const auto& v : split(args.at(swept))) {
    Args one = args;
    one[swept] = v;
    out << swept << ',' << v << ',' << render(evaluate_one(name, one)) << '\n';
  }
  return out.str();
}

}  // namespace colearn
