// Command-line front end: run experiment plans, evaluate bounds, generate
// graphs and measure mixing.

#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "colearn/analysis.hpp"
#include "colearn/bounds.hpp"
#include "colearn/config.hpp"
#include "colearn/format.hpp"
#include "colearn/graph.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Collaborative bandit learning simulator"};
  app.require_subcommand(1);

  std::filesystem::path config_path;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Run every cell of an experiment plan");
  run->add_option("config", config_path, "Plan file (key = value)")->required();
  run->add_flag("-q,--quiet", quiet, "Suppress progress output");

  auto* bounds = app.add_subcommand("bounds", "Evaluate a closed-form bound");
  bounds->require_subcommand(1);
  int decimals = 6;
  bounds->add_option("--decimals", decimals, "Digits after the decimal point")->capture_default_str();
  std::map<std::string, std::map<std::string, std::string>> bound_args;
  const std::map<std::string, std::vector<std::string>> bound_flags = {
      {"reliability", {"alpha", "p1", "p2"}},
      {"corollary", {"tau", "K", "means", "p1", "p2"}},
      {"learnability", {"q", "zeta", "N"}},
      {"init", {"N", "mu", "p1", "K", "delta1"}},
      {"mixing", {"graph", "epsilon", "start"}},
  };
  for (const auto& [name, flags] : bound_flags) {
    auto* sub = bounds->add_subcommand(name);
    for (const auto& flag : flags) {
      sub->add_option_function<std::string>(
          "--" + flag, [&, name = name, flag](const std::string& v) { bound_args[name][flag] = v; },
          "value or comma-separated list");
    }
  }

  std::size_t gen_n = 0;
  double gen_p = 0.0;
  std::uint64_t gen_seed = 0;
  std::filesystem::path gen_out;
  auto* graphgen = app.add_subcommand("graphgen", "Write a repaired Erdos-Renyi graph");
  graphgen->add_option("n", gen_n)->required();
  graphgen->add_option("p", gen_p)->required();
  graphgen->add_option("seed", gen_seed)->required();
  graphgen->add_option("out", gen_out)->required();

  std::filesystem::path mix_graph;
  double mix_epsilon = 0.0;
  auto* mixing = app.add_subcommand("mixing", "Exact mixing steps of the forwarding kernel");
  mixing->add_option("graphfile", mix_graph)->required();
  mixing->add_option("epsilon", mix_epsilon)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto plan = colearn::parse_config(config_path);
      const auto report = colearn::run_plan(plan, quiet ? nullptr : &std::cerr);
      std::cout << "manifest=" << report.files.back().string() << '\n';
    } else if (*bounds) {
      for (auto* sub : bounds->get_subcommands()) {
        std::cout << colearn::evaluate_bounds(sub->get_name(), bound_args[sub->get_name()], decimals);
      }
    } else if (*graphgen) {
      colearn::write_graph(gen_out, colearn::generate_random_graph(gen_n, gen_p, gen_seed));
    } else if (*mixing) {
      std::cout << colearn::evaluate_bounds("mixing", {{"graph", mix_graph.string()},
                                                       {"epsilon", colearn::to_text(mix_epsilon)}});
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
