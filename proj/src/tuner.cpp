#include "dbtune/tuner.hpp"

#include "dbtune/errors.hpp"
#include "dbtune/ladder.hpp"

namespace dbtune {

void TunerConfig::validate() const {
  if (!(r_threshold_ms > 0.0)) {
    throw ValidationError("tuner.r_threshold_ms must be positive");
  }
  if (cooldown_windows < 1) {
    throw ValidationError("tuner.cooldown_windows must be >= 1");
  }
}

std::string to_string(TuneRule rule) {
  switch (rule) {
    case TuneRule::kIncrease:
      return "increase";
    case TuneRule::kDecrease:
      return "decrease";
    case TuneRule::kHold:
      return "hold";
    case TuneRule::kCooldown:
      return "cooldown";
  }
  throw ValidationError("unknown tune rule");
}

void seed_baseline(TunerState& state, double mean_response_ms) {
  state.baseline_response_ms = mean_response_ms;
  state.baseline_set = true;
}

double delta_rtime(const TunerState& state, const MetricsSnapshot& snapshot) {
  if (!state.baseline_set) {
    throw ValidationError("delta_rtime: no baseline recorded yet");
  }
  return snapshot.mean_response_ms - state.baseline_response_ms;
}

namespace {

// One rung toward the estimate, but only in the direction the response-time
// signal licenses; never past the estimate, never off the ladder.
int step_knob(double delta_r, double r_threshold, int current, int estimate,
              std::span<const int> ladder, const char* name) {
  if (delta_r > r_threshold && estimate > current) {
    return ladder_step_toward(ladder, current, estimate, name);
  }
  if (delta_r < -r_threshold && estimate < current) {
    return ladder_step_toward(ladder, current, estimate, name);
  }
  return current;
}

}  // namespace

TuningDecision decide(const TunerState& state, const TunerConfig& cfg,
                      const MetricsSnapshot& snapshot,
                      const SizeEstimate& estimate, int current_pool_mb,
                      int current_cache_mb, std::span<const int> pool_ladder,
                      std::span<const int> cache_ladder) {
  cfg.validate();
  ladder_index(cache_ladder, current_cache_mb, "buffer cache");
  ladder_index(pool_ladder, current_pool_mb, "shared pool");
  // The estimator quantizes onto the ladders; raw sizes are a caller bug.
  ladder_index(cache_ladder, estimate.cache_mb, "cache estimate");
  ladder_index(pool_ladder, estimate.pool_mb, "pool estimate");

  TuningDecision decision;
  decision.window_id = snapshot.window_id;
  decision.delta_r_ms = delta_rtime(state, snapshot);
  decision.old_cache_mb = current_cache_mb;
  decision.new_cache_mb = current_cache_mb;
  decision.old_pool_mb = current_pool_mb;
  decision.new_pool_mb = current_pool_mb;

  if (state.windows_since_change < cfg.cooldown_windows) {
    decision.rule_fired = TuneRule::kCooldown;
    return decision;
  }

  decision.new_cache_mb =
      step_knob(decision.delta_r_ms, cfg.r_threshold_ms, current_cache_mb,
                estimate.cache_mb, cache_ladder, "buffer cache");
  if (cfg.tune_shared_pool) {
    decision.new_pool_mb =
        step_knob(decision.delta_r_ms, cfg.r_threshold_ms, current_pool_mb,
                  estimate.pool_mb, pool_ladder, "shared pool");
  }

  if (!decision.changed()) {
    decision.rule_fired = TuneRule::kHold;
  } else if (decision.new_cache_mb > decision.old_cache_mb ||
             decision.new_pool_mb > decision.old_pool_mb) {
    decision.rule_fired = TuneRule::kIncrease;
  } else {
    decision.rule_fired = TuneRule::kDecrease;
  }
  return decision;
}

void apply_decision(TunerState& state, SimState& sim, const SimConfig& sim_cfg,
                    const TuningDecision& decision,
                    const MetricsSnapshot& snapshot) {
  if (decision.changed()) {
    if (decision.new_cache_mb != decision.old_cache_mb) {
      resize_buffer_cache(sim, sim_cfg, decision.new_cache_mb);
    }
    if (decision.new_pool_mb != decision.old_pool_mb) {
      resize_shared_pool(sim, sim_cfg, decision.new_pool_mb);
    }
    seed_baseline(state, snapshot.mean_response_ms);
    state.windows_since_change = 0;
  } else {
    state.windows_since_change += 1;
  }
  state.decision_log.push_back(decision);
}

}  // namespace dbtune
