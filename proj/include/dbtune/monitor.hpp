#pragma once

#include <cstdint>

#include "dbtune/sim.hpp"

namespace dbtune {

struct MonitorConfig {
  int window_ticks = 50;

  void validate() const;
};

/// One aggregated observation window — the estimator's three inputs
/// (table_rows, buffer_miss_ratio, active_users) plus the response-time
/// signal the tuner thresholds on.
struct MetricsSnapshot {
  std::uint64_t window_id = 0;  // consecutive from 1
  std::uint64_t end_tick = 0;   // last tick included in the window
  double buffer_miss_ratio = 0.0;
  int active_users = 0;
  std::uint64_t table_rows = 0;
  double mean_response_ms = 0.0;
  std::uint64_t queries = 0;
};

/// Aggregates per-query events into fixed-window snapshots. Ratios follow
/// the empty-window rule: no accesses -> miss ratio 0, no queries -> mean 0.
class Monitor {
 public:
  explicit Monitor(const MonitorConfig& cfg);

  /// Fold one executed query into the open window.
  void record(const QueryResult& result, std::uint64_t blocks_touched);

  /// Emit the open window as a snapshot (echoing the users and table size
  /// in effect at `end_tick`) and reset the accumulator.
  MetricsSnapshot close_window(std::uint64_t end_tick, int active_users,
                               std::uint64_t table_rows);

  const MonitorConfig& config() const { return cfg_; }

 private:
  MonitorConfig cfg_;
  std::uint64_t next_window_id_ = 1;
  std::uint64_t accesses_ = 0;
  std::uint64_t misses_ = 0;
  std::uint64_t queries_ = 0;
  double response_sum_ms_ = 0.0;
};

}  // namespace dbtune
