#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dbtune/monitor.hpp"
#include "dbtune/net.hpp"
#include "dbtune/sim.hpp"

namespace dbtune {

struct TunerConfig {
  double r_threshold_ms = 1.0;  // dead-band half-width Rth
  int cooldown_windows = 3;     // min windows between modifications
  bool tune_shared_pool = false;

  void validate() const;
};

enum class TuneRule { kIncrease, kDecrease, kHold, kCooldown };

std::string to_string(TuneRule rule);

struct TuningDecision {
  std::uint64_t window_id = 0;
  double delta_r_ms = 0.0;
  int old_cache_mb = 0;
  int new_cache_mb = 0;
  int old_pool_mb = 0;
  int new_pool_mb = 0;
  TuneRule rule_fired = TuneRule::kHold;

  bool changed() const {
    return new_cache_mb != old_cache_mb || new_pool_mb != old_pool_mb;
  }
};

struct TunerState {
  bool baseline_set = false;
  double baseline_response_ms = 0.0;  // mean at the last modification
  int windows_since_change = 0;
  std::vector<TuningDecision> decision_log;
};

/// Establish the reference point for delta_rtime before any modification
/// exists (taken from the first completed window).
void seed_baseline(TunerState& state, double mean_response_ms);

/// Change in mean response time since the last modification.
double delta_rtime(const TunerState& state, const MetricsSnapshot& snapshot);

/// One dbTune step. During cooldown nothing moves. Otherwise the cache
/// steps one rung toward the estimate — up only when the response regressed
/// past +Rth and the estimate asks for more, down only when it improved
/// past -Rth and the estimate asks for less — and holds inside the dead
/// band. The shared pool follows the same rule when tune_shared_pool is
/// set. A step never moves past the estimate's rung.
TuningDecision decide(const TunerState& state, const TunerConfig& cfg,
                      const MetricsSnapshot& snapshot,
                      const SizeEstimate& estimate, int current_pool_mb,
                      int current_cache_mb, std::span<const int> pool_ladder,
                      std::span<const int> cache_ladder);

/// Apply a decision: perform the resizes, re-baseline on change (and reset
/// the cooldown counter), otherwise just age the counter. The decision is
/// appended to the log either way.
void apply_decision(TunerState& state, SimState& sim, const SimConfig& sim_cfg,
                    const TuningDecision& decision,
                    const MetricsSnapshot& snapshot);

}  // namespace dbtune
