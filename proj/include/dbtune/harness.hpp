#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dbtune/config.hpp"
#include "dbtune/monitor.hpp"
#include "dbtune/net.hpp"
#include "dbtune/tuner.hpp"

namespace dbtune {

/// One closed window as the control loop saw it: the snapshot, the sizes in
/// force after this window's decision, the rule that fired ("off" when
/// tuning is disabled), the estimate (when a model is loaded), and the
/// window's raw access/miss counts (deltas of the simulator counters).
struct WindowRecord {
  MetricsSnapshot snapshot;
  int cache_mb = 0;
  int pool_mb = 0;
  std::string rule;
  std::optional<SizeEstimate> estimate;
  std::uint64_t accesses = 0;
  std::uint64_t misses = 0;
};

struct SimulationOutcome {
  std::vector<WindowRecord> windows;
  std::vector<TuningDecision> decisions;  // empty when tuning is disabled
  SimCounters totals;
  int final_cache_mb = 0;
  int final_pool_mb = 0;
};

/// The Monitor -> Analyze -> Tune loop with no file I/O. Per tick every
/// active user submits one transaction; at each window boundary the monitor
/// closes a snapshot, the model (if any) estimates sizes, and the tuner
/// decides and applies (when enabled). `model` is required exactly when
/// cfg.tuning_enabled.
SimulationOutcome simulate_scenario(const ScenarioConfig& cfg,
                                    const NeuralModel* model);

/// Mean/median of the per-window mean response, over all windows and over
/// the final half (windows with 0-based index >= N/2; never empty).
struct RunStats {
  double mean_overall = 0.0;
  double median_overall = 0.0;
  double mean_final_half = 0.0;
  double median_final_half = 0.0;
};
RunStats run_stats(const std::vector<WindowRecord>& windows);

/// `run` subcommand: loads the model when model_path is set (required if
/// tuning is enabled), simulates, and writes run.csv, decisions.csv,
/// summary.json, and — when a model is loaded — estimates.csv into
/// cfg.output_dir.
SimulationOutcome run_scenario(const ScenarioConfig& cfg);

struct SweepPoint {
  int cache_mb = 0;
  double mean_response_ms = 0.0;  // cumulative mean over the whole run
  double miss_ratio = 0.0;        // cumulative misses / accesses
};

/// One untuned run per size (cfg.sweep.sizes, or the whole buffer ladder
/// when unset), each replaying the identically seeded workload.
std::vector<SweepPoint> sweep_points(const ScenarioConfig& cfg);

/// `sweep` subcommand: sweep_points + sweep.csv.
std::vector<SweepPoint> sweep_cmd(const ScenarioConfig& cfg);

struct GenRow {
  std::uint64_t table_rows = 0;
  double miss_ratio = 0.0;
  int users = 0;
  int pool_mb = 0;
  int cache_mb = 0;
};

struct GenResult {
  std::vector<GenRow> rows;  // one per grid cell, table_rows-major order
  std::vector<std::string> warnings;
};

/// Characterization per cfg.gen: for each (table_rows, users) cell, find
/// the smallest buffer-cache rung meeting the target steady-state (final
/// half) mean response with the pool pinned at its top rung, then the
/// smallest pool rung at that cache size. Cells whose target is
/// unachievable even at the top rung are labeled with the top rung and
/// reported in `warnings`. The recorded miss_ratio is the accepted run's
/// final-half value.
GenResult gen_training_data(const ScenarioConfig& cfg);

/// `gen-data` subcommand: gen_training_data + train_data.csv +
/// gen_summary.json.
GenResult gen_data_cmd(const ScenarioConfig& cfg);

struct TrainOutcome {
  NeuralModel model;
  TrainResult trace;
};

/// `train` subcommand: reads cfg.training_data, trains with cfg.net, writes
/// the model JSON to model_out (empty -> cfg.output_dir/model.json) and the
/// per-epoch trace to mse.csv.
TrainOutcome train_cmd(const ScenarioConfig& cfg, const std::string& model_out);

}  // namespace dbtune
