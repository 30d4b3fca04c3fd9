#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dbtune/monitor.hpp"
#include "dbtune/net.hpp"
#include "dbtune/sim.hpp"
#include "dbtune/tuner.hpp"
#include "dbtune/workload.hpp"

namespace dbtune {

/// Buffer-cache sizes visited by the sweep subcommand; when empty the whole
/// buffer ladder is swept.
struct SweepSpec {
  std::vector<int> sizes;
};

/// Characterization grid for gen-data: every (table_rows, users) cell is
/// simulated per ladder rung to find the smallest sizes meeting the target.
struct GenGrid {
  std::vector<std::uint64_t> table_rows;
  std::vector<int> users;
  double target_response_ms = 0.0;
  std::uint64_t ticks = 400;  // simulated ticks per candidate run
};

/// Everything one experiment needs, mirroring the JSON config sections.
struct ScenarioConfig {
  SimConfig sim;
  WorkloadSpec workload;
  MonitorConfig monitor;
  TunerConfig tuner;
  NetConfig net;
  std::uint64_t total_ticks = 1000;
  int initial_cache_mb = 8;
  int initial_pool_mb = 32;
  bool tuning_enabled = false;
  std::string model_path;     // read by run when tuning; written by train
  std::string output_dir = "out";
  std::string training_data;  // CSV consumed by the train subcommand
  SweepSpec sweep;
  std::optional<GenGrid> gen;

  /// Cross-module invariants: sections valid, total_ticks a positive
  /// multiple of window_ticks, initial sizes on their ladders, sweep sizes
  /// on the buffer ladder, and the gen grid (when present) well formed.
  void validate() const;
};

/// Strict parser: unknown keys anywhere are errors (reported with their
/// dotted path), as are wrong JSON types. Absent keys keep their defaults.
ScenarioConfig parse_config(const std::string& json_text,
                            const std::string& origin);

/// parse_config over a file's contents.
ScenarioConfig load_config(const std::filesystem::path& path);

}  // namespace dbtune
