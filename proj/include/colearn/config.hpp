#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "colearn/engine.hpp"

namespace colearn {

struct SweepAxis {
  std::string key;
  std::vector<std::string> values;

  bool operator==(const SweepAxis&) const = default;
};

struct ExperimentPlan {
  SimConfig base;
  std::vector<SweepAxis> axes;  // cartesian product, first axis varies slowest
  std::filesystem::path output_dir = "out";
  std::size_t max_cells = 10'000;

  bool operator==(const ExperimentPlan&) const = default;
};

struct PlanCell {
  std::size_t index = 0;
  SimConfig config;  // seed already derived for the cell
  std::vector<std::pair<std::string, std::string>> assignment;
};

// Flat "key = value" text; '#' starts a comment; "sweep.<key> = v1,v2,..."
// adds an axis. Throws ConfigError naming the key and line.
ExperimentPlan parse_config(std::istream& in);
ExperimentPlan parse_config(const std::filesystem::path& path);
ExperimentPlan parse_config_text(std::string_view text);

// Every key with its current value, then the sweep axes. Parses back to an
// equal plan.
std::string serialize_config(const ExperimentPlan& plan);

// Keys accepted by parse_config, in serialization order.
std::vector<std::string_view> config_keys();

// Expanded and validated sweep cells. Cell seeds are hash(base seed, index).
std::vector<PlanCell> expand_cells(const ExperimentPlan& plan);

struct PlanReport {
  std::vector<std::filesystem::path> files;  // manifest last
  std::vector<ExperimentSummary> summaries;  // per cell
};

// Runs every cell and writes, per cell, cell_NNNN_{trajectory,summary,meanfield}.csv
// and finally manifest.csv. Throws IoError before simulating if the output
// directory cannot be written.
PlanReport run_plan(const ExperimentPlan& plan, std::ostream* progress = nullptr);

}  // namespace colearn
