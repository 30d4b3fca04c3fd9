#include "dbtune/harness.hpp"

#include <algorithm>
#include <filesystem>

#include <json.hpp>

#include "dbtune/csv.hpp"
#include "dbtune/errors.hpp"
#include "dbtune/rng.hpp"
#include "dbtune/workload.hpp"

namespace dbtune {

namespace {

using ordered_json = nlohmann::ordered_json;

std::filesystem::path ensure_output_dir(const ScenarioConfig& cfg) {
  const std::filesystem::path dir(cfg.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create output directory " + dir.string() + ": " +
                  ec.message());
  }
  return dir;
}

double mean_of(const std::vector<double>& values) {
  double sum = 0.0;
  for (const double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

SimulationOutcome simulate_scenario(const ScenarioConfig& cfg,
                                    const NeuralModel* model) {
  cfg.validate();
  if (cfg.tuning_enabled && model == nullptr) {
    throw ValidationError("tuning is enabled but no model was provided");
  }

  SimState sim =
      make_sim_state(cfg.sim, cfg.initial_cache_mb, cfg.initial_pool_mb);
  Rng rng(cfg.workload.seed);
  WorkloadGenerator generator(cfg.workload);
  Monitor monitor(cfg.monitor);
  TunerState tuner;

  SimulationOutcome outcome;
  const auto window = static_cast<std::uint64_t>(cfg.monitor.window_ticks);
  std::uint64_t accesses_at_window_start = 0;
  std::uint64_t misses_at_window_start = 0;

  for (std::uint64_t tick = 0; tick < cfg.total_ticks; ++tick) {
    const TickInfo info = advance_tick(cfg.workload, tick);
    for (int user = 0; user < info.active_users; ++user) {
      const Transaction txn =
          generator.next_transaction(rng, info.table_rows, user);
      const QueryResult result =
          execute_query(sim, cfg.sim, txn.blocks, txn.stmt, info.active_users);
      monitor.record(result, txn.blocks.size());
    }
    if ((tick + 1) % window != 0) continue;

    WindowRecord record;
    record.snapshot =
        monitor.close_window(tick, info.active_users, info.table_rows);
    record.accesses = sim.counters.accesses - accesses_at_window_start;
    record.misses = sim.counters.misses - misses_at_window_start;
    accesses_at_window_start = sim.counters.accesses;
    misses_at_window_start = sim.counters.misses;

    if (!tuner.baseline_set) {
      seed_baseline(tuner, record.snapshot.mean_response_ms);
    }
    if (model != nullptr) {
      record.estimate = estimate_sizes(*model, record.snapshot,
                                       cfg.sim.pool_ladder_mb,
                                       cfg.sim.buffer_ladder_mb);
    }
    if (cfg.tuning_enabled) {
      const TuningDecision decision = decide(
          tuner, cfg.tuner, record.snapshot, *record.estimate,
          sim.shared_pool_mb, sim.buffer_cache_mb, cfg.sim.pool_ladder_mb,
          cfg.sim.buffer_ladder_mb);
      apply_decision(tuner, sim, cfg.sim, decision, record.snapshot);
      record.rule = to_string(decision.rule_fired);
    } else {
      record.rule = "off";
    }
    record.cache_mb = sim.buffer_cache_mb;
    record.pool_mb = sim.shared_pool_mb;
    outcome.windows.push_back(std::move(record));
  }

  outcome.decisions = std::move(tuner.decision_log);
  outcome.totals = sim.counters;
  outcome.final_cache_mb = sim.buffer_cache_mb;
  outcome.final_pool_mb = sim.shared_pool_mb;
  return outcome;
}

RunStats run_stats(const std::vector<WindowRecord>& windows) {
  if (windows.empty()) {
    throw ValidationError("run_stats: no windows");
  }
  std::vector<double> all;
  all.reserve(windows.size());
  for (const WindowRecord& w : windows) {
    all.push_back(w.snapshot.mean_response_ms);
  }
  const std::vector<double> final_half(all.begin() + all.size() / 2,
                                       all.end());
  RunStats stats;
  stats.mean_overall = mean_of(all);
  stats.median_overall = median_of(all);
  stats.mean_final_half = mean_of(final_half);
  stats.median_final_half = median_of(final_half);
  return stats;
}

namespace {

void write_run_csv(const std::filesystem::path& dir,
                   const SimulationOutcome& outcome) {
  CsvWriter csv(dir / "run.csv",
                "window_id,end_tick,users,table_rows,miss_ratio,"
                "mean_response_ms,cache_mb,pool_mb,rule");
  for (const WindowRecord& w : outcome.windows) {
    csv.row({std::to_string(w.snapshot.window_id),
             std::to_string(w.snapshot.end_tick),
             std::to_string(w.snapshot.active_users),
             std::to_string(w.snapshot.table_rows),
             format_double(w.snapshot.buffer_miss_ratio),
             format_double(w.snapshot.mean_response_ms),
             std::to_string(w.cache_mb), std::to_string(w.pool_mb), w.rule});
  }
  csv.close();
}

void write_decisions_csv(const std::filesystem::path& dir,
                         const SimulationOutcome& outcome) {
  CsvWriter csv(dir / "decisions.csv",
                "window_id,delta_r_ms,rule,old_cache,new_cache,old_pool,"
                "new_pool");
  for (const TuningDecision& d : outcome.decisions) {
    csv.row({std::to_string(d.window_id), format_double(d.delta_r_ms),
             to_string(d.rule_fired), std::to_string(d.old_cache_mb),
             std::to_string(d.new_cache_mb), std::to_string(d.old_pool_mb),
             std::to_string(d.new_pool_mb)});
  }
  csv.close();
}

void write_estimates_csv(const std::filesystem::path& dir,
                         const SimulationOutcome& outcome) {
  CsvWriter csv(dir / "estimates.csv", "window_id,est_pool_mb,est_cache_mb");
  for (const WindowRecord& w : outcome.windows) {
    if (!w.estimate) continue;
    csv.row({std::to_string(w.snapshot.window_id),
             std::to_string(w.estimate->pool_mb),
             std::to_string(w.estimate->cache_mb)});
  }
  csv.close();
}

void write_summary_json(const std::filesystem::path& dir,
                        const ScenarioConfig& cfg,
                        const SimulationOutcome& outcome) {
  const RunStats stats = run_stats(outcome.windows);
  std::uint64_t increases = 0, decreases = 0, holds = 0, cooldowns = 0;
  for (const TuningDecision& d : outcome.decisions) {
    switch (d.rule_fired) {
      case TuneRule::kIncrease: ++increases; break;
      case TuneRule::kDecrease: ++decreases; break;
      case TuneRule::kHold: ++holds; break;
      case TuneRule::kCooldown: ++cooldowns; break;
    }
  }
  ordered_json doc;
  doc["total_ticks"] = cfg.total_ticks;
  doc["windows"] = outcome.windows.size();
  doc["tuning_enabled"] = cfg.tuning_enabled;
  doc["mean_response_ms"] = {{"overall", stats.mean_overall},
                             {"final_half", stats.mean_final_half}};
  doc["median_response_ms"] = {{"overall", stats.median_overall},
                               {"final_half", stats.median_final_half}};
  doc["totals"] = {
      {"queries", outcome.totals.queries},
      {"block_accesses", outcome.totals.accesses},
      {"block_misses", outcome.totals.misses},
      {"plan_misses", outcome.totals.parses},
      {"cumulative_response_ms", outcome.totals.cumulative_response_ms},
      {"overall_miss_ratio",
       outcome.totals.accesses == 0
           ? 0.0
           : static_cast<double>(outcome.totals.misses) /
                 static_cast<double>(outcome.totals.accesses)}};
  doc["decisions"] = {{"increase", increases},
                      {"decrease", decreases},
                      {"hold", holds},
                      {"cooldown", cooldowns}};
  doc["final_sizes"] = {{"cache_mb", outcome.final_cache_mb},
                        {"pool_mb", outcome.final_pool_mb}};
  write_file(dir / "summary.json", doc.dump(2) + "\n");
}

}  // namespace

SimulationOutcome run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  std::optional<NeuralModel> model;
  if (cfg.tuning_enabled) {
    if (cfg.model_path.empty()) {
      throw ValidationError("tuning is enabled but model_path is not set");
    }
    if (!std::filesystem::exists(cfg.model_path)) {
      throw ValidationError("tuning is enabled but model file " +
                            cfg.model_path + " does not exist");
    }
  }
  if (!cfg.model_path.empty()) {
    model = load_model(cfg.model_path);
  }

  const SimulationOutcome outcome =
      simulate_scenario(cfg, model ? &*model : nullptr);

  const std::filesystem::path dir = ensure_output_dir(cfg);
  write_run_csv(dir, outcome);
  write_decisions_csv(dir, outcome);
  if (model) {
    write_estimates_csv(dir, outcome);
  }
  write_summary_json(dir, cfg, outcome);
  return outcome;
}

std::vector<SweepPoint> sweep_points(const ScenarioConfig& cfg) {
  cfg.validate();
  const std::vector<int>& sizes =
      cfg.sweep.sizes.empty() ? cfg.sim.buffer_ladder_mb : cfg.sweep.sizes;
  std::vector<SweepPoint> points;
  points.reserve(sizes.size());
  for (const int size : sizes) {
    ScenarioConfig point_cfg = cfg;
    point_cfg.tuning_enabled = false;
    point_cfg.initial_cache_mb = size;
    const SimulationOutcome outcome = simulate_scenario(point_cfg, nullptr);
    SweepPoint point;
    point.cache_mb = size;
    point.mean_response_ms =
        outcome.totals.queries == 0
            ? 0.0
            : outcome.totals.cumulative_response_ms /
                  static_cast<double>(outcome.totals.queries);
    point.miss_ratio = outcome.totals.accesses == 0
                           ? 0.0
                           : static_cast<double>(outcome.totals.misses) /
                                 static_cast<double>(outcome.totals.accesses);
    points.push_back(point);
  }
  return points;
}

std::vector<SweepPoint> sweep_cmd(const ScenarioConfig& cfg) {
  const std::vector<SweepPoint> points = sweep_points(cfg);
  const std::filesystem::path dir = ensure_output_dir(cfg);
  CsvWriter csv(dir / "sweep.csv", "cache_mb,mean_response_ms,miss_ratio");
  for (const SweepPoint& p : points) {
    csv.row({std::to_string(p.cache_mb), format_double(p.mean_response_ms),
             format_double(p.miss_ratio)});
  }
  csv.close();
  return points;
}

namespace {

// Steady-state view of one candidate run: final-half mean of window means
// plus the final-half miss ratio (weighted by accesses).
struct ProbeResult {
  double mean_response_ms = 0.0;
  double miss_ratio = 0.0;
};

ProbeResult probe_cell(const ScenarioConfig& base, std::uint64_t table_rows,
                       int users, std::uint64_t ticks, int cache_mb,
                       int pool_mb) {
  ScenarioConfig cfg = base;
  cfg.tuning_enabled = false;
  cfg.model_path.clear();
  cfg.total_ticks = ticks;
  cfg.initial_cache_mb = cache_mb;
  cfg.initial_pool_mb = pool_mb;
  cfg.workload.initial_table_rows = table_rows;
  cfg.workload.growth_rows_per_tick = 0;  // a cell is one static operating point
  cfg.workload.user_schedule = {{0, users}};
  cfg.gen.reset();

  const SimulationOutcome outcome = simulate_scenario(cfg, nullptr);
  const std::size_t start = outcome.windows.size() / 2;
  double mean_sum = 0.0;
  std::uint64_t accesses = 0, misses = 0;
  for (std::size_t i = start; i < outcome.windows.size(); ++i) {
    mean_sum += outcome.windows[i].snapshot.mean_response_ms;
    accesses += outcome.windows[i].accesses;
    misses += outcome.windows[i].misses;
  }
  ProbeResult probe;
  probe.mean_response_ms =
      mean_sum / static_cast<double>(outcome.windows.size() - start);
  probe.miss_ratio = accesses == 0 ? 0.0
                                   : static_cast<double>(misses) /
                                         static_cast<double>(accesses);
  return probe;
}

}  // namespace

GenResult gen_training_data(const ScenarioConfig& cfg) {
  cfg.validate();
  if (!cfg.gen) {
    throw ValidationError("gen-data requires a \"gen\" section in the config");
  }
  const GenGrid& grid = *cfg.gen;
  const int top_cache = cfg.sim.buffer_ladder_mb.back();
  const int top_pool = cfg.sim.pool_ladder_mb.back();

  GenResult result;
  for (const std::uint64_t rows : grid.table_rows) {
    for (const int users : grid.users) {
      // Pass 1: smallest cache rung that meets the target with the pool
      // pinned at its top rung (so pool pressure cannot mask cache effects).
      int cache_label = top_cache;
      bool cache_met = false;
      for (const int cache : cfg.sim.buffer_ladder_mb) {
        const ProbeResult probe =
            probe_cell(cfg, rows, users, grid.ticks, cache, top_pool);
        if (probe.mean_response_ms <= grid.target_response_ms) {
          cache_label = cache;
          cache_met = true;
          break;
        }
      }
      // Pass 2: smallest pool rung that still meets the target at the
      // labeled cache size; its run provides the recorded miss ratio. When
      // nothing meets the target the last probe (top rung) is recorded.
      int pool_label = top_pool;
      bool pool_met = false;
      ProbeResult accepted;
      for (const int pool : cfg.sim.pool_ladder_mb) {
        accepted = probe_cell(cfg, rows, users, grid.ticks, cache_label, pool);
        if (accepted.mean_response_ms <= grid.target_response_ms) {
          pool_label = pool;
          pool_met = true;
          break;
        }
      }
      if (!cache_met || !pool_met) {
        result.warnings.push_back(
            "cell table_rows=" + std::to_string(rows) +
            " users=" + std::to_string(users) +
            ": target " + format_double(grid.target_response_ms) +
            " ms unachievable, labeled with top rung");
      }
      GenRow row;
      row.table_rows = rows;
      row.miss_ratio = accepted.miss_ratio;
      row.users = users;
      row.pool_mb = pool_label;
      row.cache_mb = cache_label;
      result.rows.push_back(row);
    }
  }
  return result;
}

GenResult gen_data_cmd(const ScenarioConfig& cfg) {
  const GenResult result = gen_training_data(cfg);
  const std::filesystem::path dir = ensure_output_dir(cfg);
  CsvWriter csv(dir / "train_data.csv",
                "table_rows,miss_ratio,users,pool_mb,cache_mb");
  for (const GenRow& row : result.rows) {
    csv.row({std::to_string(row.table_rows), format_double(row.miss_ratio),
             std::to_string(row.users), std::to_string(row.pool_mb),
             std::to_string(row.cache_mb)});
  }
  csv.close();

  ordered_json doc;
  doc["target_response_ms"] = cfg.gen->target_response_ms;
  doc["ticks_per_cell"] = cfg.gen->ticks;
  doc["cells"] = result.rows.size();
  doc["warnings"] = result.warnings;
  write_file(dir / "gen_summary.json", doc.dump(2) + "\n");
  return result;
}

TrainOutcome train_cmd(const ScenarioConfig& cfg,
                       const std::string& model_out) {
  cfg.validate();
  if (cfg.training_data.empty()) {
    throw ValidationError(
        "train requires \"training_data\" (a CSV path) in the config");
  }
  const TrainingSet set = load_training_csv(cfg.training_data);

  TrainOutcome outcome;
  outcome.model = make_model(cfg.net);
  outcome.trace = train(outcome.model, set, cfg.net);

  const std::filesystem::path dir = ensure_output_dir(cfg);
  const std::filesystem::path model_path =
      model_out.empty() ? dir / "model.json"
                        : std::filesystem::path(model_out);
  save_model(outcome.model, model_path);

  CsvWriter csv(dir / "mse.csv", "epoch,mse");
  for (std::size_t i = 0; i < outcome.trace.mse_per_epoch.size(); ++i) {
    csv.row({std::to_string(i + 1),
             format_double(outcome.trace.mse_per_epoch[i])});
  }
  csv.close();
  return outcome;
}

}  // namespace dbtune
