// End-to-end acceptance checks. Each criterion prints exactly one PASS or
// FAIL line with its measured numbers; the exit code is the failure count.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dbtune/config.hpp"
#include "dbtune/csv.hpp"
#include "dbtune/harness.hpp"
#include "dbtune/ladder.hpp"
#include "dbtune/net.hpp"
#include "dbtune/rng.hpp"
#include "dbtune/sim.hpp"
#include "dbtune/tuner.hpp"
#include "dbtune/workload.hpp"
#include "test_support.hpp"

using namespace dbtune;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double value, int precision = 4) {
  std::ostringstream out;
  out.precision(precision);
  out << value;
  return out.str();
}

// ---------------------------------------------------------------- criterion 1

Outcome criterion_gradients() {
  Rng rng(101);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    NetConfig cfg;
    cfg.n_inputs = rng.uniform_int(2, 5);
    cfg.n_hidden = rng.uniform_int(2, 20);
    cfg.n_outputs = rng.uniform_int(1, 3);
    cfg.seed = rng.next_u64();
    const NeuralModel model = make_model(cfg);
    Eigen::VectorXd x(cfg.n_inputs), t(cfg.n_outputs);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.next_double();
    for (Eigen::Index i = 0; i < t.size(); ++i) t(i) = rng.next_double();
    worst = std::max(worst, gradient_check(model, x, t));
  }
  Outcome out;
  out.pass = worst <= 1e-4;
  out.detail = "max relative error " + fmt(worst, 3) +
               " across 20 random nets up to 5-20-3 (limit 1e-4)";
  return out;
}

// ---------------------------------------------------------------- criterion 2

Outcome criterion_table_training() {
  const TrainingSet set =
      load_training_csv(std::string(DBTUNE_DATA_DIR) + "/table1.csv");
  NetConfig cfg;  // 3-100-2, learning rate 0.4, 100 epochs
  NeuralModel model = make_model(cfg);
  const TrainResult result = train(model, set, cfg);
  const double final_mse = result.mse_per_epoch.back();

  const SimConfig sim;
  std::size_t max_dist = 0;
  for (Eigen::Index r = 0; r < set.features.rows(); ++r) {
    MetricsSnapshot snap;
    snap.table_rows = static_cast<std::uint64_t>(set.features(r, 0));
    snap.buffer_miss_ratio = set.features(r, 1);
    snap.active_users = static_cast<int>(set.features(r, 2));
    const SizeEstimate est =
        estimate_sizes(model, snap, sim.pool_ladder_mb, sim.buffer_ladder_mb);
    const auto dist = [](std::size_t a, std::size_t b) {
      return a > b ? a - b : b - a;
    };
    max_dist = std::max(
        max_dist,
        dist(ladder_index(sim.pool_ladder_mb, est.pool_mb, "pool"),
             ladder_index(sim.pool_ladder_mb,
                          static_cast<int>(set.targets(r, 0)), "pool")));
    max_dist = std::max(
        max_dist,
        dist(ladder_index(sim.buffer_ladder_mb, est.cache_mb, "cache"),
             ladder_index(sim.buffer_ladder_mb,
                          static_cast<int>(set.targets(r, 1)), "cache")));
  }
  Outcome out;
  out.pass = final_mse <= 0.05 && max_dist <= 1;
  out.detail = "final MSE " + fmt(final_mse, 4) +
               " (limit 0.05), max estimate distance " +
               std::to_string(max_dist) + " rung(s) over 8 rows (limit 1)";
  return out;
}

// ---------------------------------------------------------------- criterion 3

Outcome criterion_cache_model() {
  const std::uint64_t kBlocks = 1000;
  const std::uint64_t kCacheBlocks = 100;
  const std::uint64_t kAccesses = 100000;

  LruCache cache(kCacheBlocks);
  const ZipfSampler sampler(kBlocks, 1.0);
  Rng rng(42);
  std::uint64_t misses = 0;
  for (std::uint64_t i = 0; i < kAccesses; ++i) {
    if (!cache.access(sampler.sample(rng) - 1)) ++misses;
  }
  const double empirical =
      static_cast<double>(misses) / static_cast<double>(kAccesses);
  const double predicted =
      1.0 - analytic_hit_ratio(kCacheBlocks, kBlocks, 1.0);

  Outcome out;
  out.pass = std::abs(empirical - predicted) <= 0.02;
  out.detail = "empirical LRU miss ratio " + fmt(empirical, 4) +
               " vs top-100-popularity prediction " + fmt(predicted, 4) +
               " (tolerance 0.02): recency keeps cold blocks resident, so "
               "the LRU stack holds more than the 100 hottest blocks";
  return out;
}

// ---------------------------------------------------------------- criterion 4

Outcome criterion_sweep_shape() {
  ScenarioConfig cfg;
  cfg.workload.initial_table_rows = 640000;  // 10000 blocks
  cfg.workload.user_schedule = {{0, 4}};
  cfg.workload.seed = 7;
  cfg.total_ticks = 500;
  cfg.sweep.sizes = {4, 8, 16, 32, 64};

  const std::vector<SweepPoint> points = sweep_points(cfg);
  bool monotone = true;
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].mean_response_ms >
        points[i - 1].mean_response_ms * 1.02) {
      monotone = false;
    }
  }
  const bool improved =
      points.back().mean_response_ms < points.front().mean_response_ms;

  Outcome out;
  out.pass = monotone && improved;
  out.detail = "mean response " + fmt(points.front().mean_response_ms, 4) +
               " ms at 4 MB -> " + fmt(points.back().mean_response_ms, 4) +
               " ms at 64 MB, each step within +2% of the previous: " +
               (monotone ? "yes" : "no");
  return out;
}

// ---------------------------------------------------------------- criterion 5

Outcome criterion_user_knee() {
  std::vector<double> means;
  for (const int users : {4, 8, 12, 16}) {
    ScenarioConfig cfg;
    cfg.workload.initial_table_rows = 64000;  // resident in a 16 MB cache
    cfg.workload.user_schedule = {{0, users}};
    cfg.workload.seed = 7;
    cfg.total_ticks = 200;
    cfg.initial_cache_mb = 16;
    const SimulationOutcome outcome = simulate_scenario(cfg, nullptr);
    means.push_back(outcome.totals.cumulative_response_ms /
                    static_cast<double>(outcome.totals.queries));
  }
  const double ratio = means[3] / means[1];
  Outcome out;
  out.pass = ratio >= 2.0;
  out.detail = "mean response at 4/8/12/16 users: " + fmt(means[0], 4) +
               " / " + fmt(means[1], 4) + " / " + fmt(means[2], 4) + " / " +
               fmt(means[3], 4) + " ms; 16-user mean is " + fmt(ratio, 3) +
               "x the 8-user mean (needs >= 2x)";
  return out;
}

// ----------------------------------------------------------- criteria 6 and 7

struct ClosedLoop {
  ScenarioConfig scenario;
  SimulationOutcome tuned;
  SimulationOutcome untuned;
};

ScenarioConfig closed_loop_scenario() {
  ScenarioConfig cfg;
  cfg.workload.initial_table_rows = 64000;  // 1000 blocks
  cfg.workload.zipf_s = 1.0;
  cfg.workload.blocks_per_query_min = 2;
  cfg.workload.blocks_per_query_max = 8;
  cfg.workload.distinct_statements = 200;
  cfg.workload.user_schedule = {{0, 4}, {500, 16}};
  cfg.workload.seed = 11;
  cfg.total_ticks = 1000;
  cfg.initial_cache_mb = 4;
  cfg.initial_pool_mb = 32;
  return cfg;
}

ClosedLoop run_closed_loop() {
  ClosedLoop loop;
  loop.scenario = closed_loop_scenario();

  // Characterize the same simulated system over a small operating grid...
  ScenarioConfig gen_cfg = loop.scenario;
  GenGrid grid;
  grid.table_rows = {32000, 64000, 96000};
  grid.users = {4, 16};
  grid.target_response_ms = 14.0;
  grid.ticks = 400;
  gen_cfg.gen = grid;
  const GenResult gen = gen_training_data(gen_cfg);

  // ...train the estimator on the labels...
  TrainingSet set;
  const auto n = static_cast<Eigen::Index>(gen.rows.size());
  set.features.resize(n, 3);
  set.targets.resize(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const GenRow& row = gen.rows[static_cast<std::size_t>(i)];
    set.features(i, 0) = static_cast<double>(row.table_rows);
    set.features(i, 1) = row.miss_ratio;
    set.features(i, 2) = static_cast<double>(row.users);
    set.targets(i, 0) = static_cast<double>(row.pool_mb);
    set.targets(i, 1) = static_cast<double>(row.cache_mb);
  }
  NetConfig net;
  net.seed = 5;
  NeuralModel model = make_model(net);
  train(model, set, net);

  // ...and run the identical workload with and without the control loop.
  ScenarioConfig tuned_cfg = loop.scenario;
  tuned_cfg.tuning_enabled = true;
  loop.tuned = simulate_scenario(tuned_cfg, &model);
  loop.untuned = simulate_scenario(loop.scenario, nullptr);
  return loop;
}

Outcome criterion_closed_loop(const ClosedLoop& loop) {
  const RunStats tuned = run_stats(loop.tuned.windows);
  const RunStats untuned = run_stats(loop.untuned.windows);
  const double improvement =
      (untuned.mean_final_half - tuned.mean_final_half) /
      untuned.mean_final_half;
  Outcome out;
  out.pass = improvement >= 0.20;
  out.detail = "final-half mean response tuned " +
               fmt(tuned.mean_final_half, 4) + " ms vs untuned " +
               fmt(untuned.mean_final_half, 4) + " ms: " +
               fmt(improvement * 100.0, 3) + "% better (needs >= 20%)";
  return out;
}

Outcome criterion_tuner_invariants(const ClosedLoop& loop) {
  const SimConfig& sim = loop.scenario.sim;
  const TunerConfig& tuner = loop.scenario.tuner;

  std::vector<std::string> problems;
  int cache_mb = loop.scenario.initial_cache_mb;
  int pool_mb = loop.scenario.initial_pool_mb;
  std::uint64_t last_change_window = 0;
  std::size_t changes = 0;

  for (const TuningDecision& d : loop.tuned.decisions) {
    if (!ladder_contains(sim.buffer_ladder_mb, d.new_cache_mb) ||
        !ladder_contains(sim.pool_ladder_mb, d.new_pool_mb)) {
      problems.push_back("window " + std::to_string(d.window_id) +
                         ": size off the ladder");
      break;
    }
    if (d.old_cache_mb != cache_mb || d.old_pool_mb != pool_mb) {
      problems.push_back("window " + std::to_string(d.window_id) +
                         ": log does not chain from the previous sizes");
      break;
    }
    if (d.changed()) {
      ++changes;
      const auto rungs = [](std::span<const int> ladder, int a, int b) {
        const auto ia = ladder_index(ladder, a, "replay");
        const auto ib = ladder_index(ladder, b, "replay");
        return ia > ib ? ia - ib : ib - ia;
      };
      const std::size_t moved =
          rungs(sim.buffer_ladder_mb, d.old_cache_mb, d.new_cache_mb) +
          rungs(sim.pool_ladder_mb, d.old_pool_mb, d.new_pool_mb);
      if (moved != 1) {
        problems.push_back("window " + std::to_string(d.window_id) +
                           ": moved " + std::to_string(moved) +
                           " rungs in one step");
      }
      if (last_change_window != 0 &&
          d.window_id - last_change_window <
              static_cast<std::uint64_t>(tuner.cooldown_windows)) {
        problems.push_back("windows " + std::to_string(last_change_window) +
                           " and " + std::to_string(d.window_id) +
                           ": changes closer than the cooldown");
      }
      last_change_window = d.window_id;
    }
    cache_mb = d.new_cache_mb;
    pool_mb = d.new_pool_mb;
  }
  if (changes == 0) {
    problems.push_back("no modification was ever applied");
  }
  if (cache_mb != loop.tuned.final_cache_mb ||
      pool_mb != loop.tuned.final_pool_mb) {
    problems.push_back("replaying the log does not reproduce the final sizes");
  }

  Outcome out;
  out.pass = problems.empty();
  if (out.pass) {
    out.detail = std::to_string(loop.tuned.decisions.size()) +
                 " decisions replayed: " + std::to_string(changes) +
                 " one-rung change(s), cooldown respected, final sizes " +
                 std::to_string(cache_mb) + "/" + std::to_string(pool_mb) +
                 " MB reproduced";
  } else {
    out.detail = problems.front();
  }
  return out;
}

// ---------------------------------------------------------------- criterion 8

bool run_cli(const std::string& args) {
  const std::string cmd =
      std::string("\"") + DBTUNE_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str()) == 0;
}

std::string config_json_common() {
  return R"("workload": {"initial_table_rows": 64000, "user_schedule": [[0, 2], [100, 8]], "seed": 7},
  "total_ticks": 200)";
}

Outcome criterion_determinism() {
  TempDir dir("acceptance_cli");
  const auto path_of = [&dir](const std::string& name) {
    return dir.file(name).string();
  };
  std::size_t compared = 0;
  const auto identical = [&](const std::string& a_dir,
                             const std::string& b_dir,
                             const std::vector<std::string>& names) {
    for (const std::string& name : names) {
      ++compared;
      if (read_file(std::filesystem::path(a_dir) / name) !=
          read_file(std::filesystem::path(b_dir) / name)) {
        return false;
      }
    }
    return true;
  };
  Outcome out;

  // train: model and loss trace.
  write_file(path_of("train.json"),
             "{\n  \"training_data\": \"" + std::string(DBTUNE_DATA_DIR) +
                 "/table1.csv\",\n  \"net\": {\"epochs\": 20}\n}\n");
  for (const char* tag : {"train_a", "train_b"}) {
    if (!run_cli("train --config \"" + path_of("train.json") +
                 "\" --out \"" + path_of(tag) + "\" --seed 5")) {
      out.detail = "train subcommand failed";
      return out;
    }
  }
  if (!identical(path_of("train_a"), path_of("train_b"),
                 {"model.json", "mse.csv"})) {
    out.detail = "train artifacts differ between reruns";
    return out;
  }

  // run: a tuned run against the model just produced.
  write_file(path_of("run.json"),
             "{\n  " + config_json_common() +
                 ",\n  \"tuning_enabled\": true,\n  \"model_path\": \"" +
                 path_of("train_a") + "/model.json\"\n}\n");
  for (const char* tag : {"run_a", "run_b"}) {
    if (!run_cli("run --config \"" + path_of("run.json") + "\" --out \"" +
                 path_of(tag) + "\" --seed 5")) {
      out.detail = "run subcommand failed";
      return out;
    }
  }
  if (!identical(path_of("run_a"), path_of("run_b"),
                 {"run.csv", "decisions.csv", "estimates.csv",
                  "summary.json"})) {
    out.detail = "run artifacts differ between reruns";
    return out;
  }

  // sweep: two cache sizes.
  write_file(path_of("sweep.json"),
             "{\n  " + config_json_common() +
                 ",\n  \"sweep\": {\"sizes\": [4, 8]}\n}\n");
  for (const char* tag : {"sweep_a", "sweep_b"}) {
    if (!run_cli("sweep --config \"" + path_of("sweep.json") +
                 "\" --out \"" + path_of(tag) + "\" --seed 5")) {
      out.detail = "sweep subcommand failed";
      return out;
    }
  }
  if (!identical(path_of("sweep_a"), path_of("sweep_b"), {"sweep.csv"})) {
    out.detail = "sweep artifacts differ between reruns";
    return out;
  }

  // gen-data: a one-cell grid.
  write_file(path_of("gen.json"),
             R"({
  "workload": {"initial_table_rows": 6400, "distinct_statements": 50,
               "user_schedule": [[0, 1]], "seed": 7},
  "gen": {"table_rows": [6400], "users": [1], "target_response_ms": 50.0,
          "ticks": 50}
}
)");
  for (const char* tag : {"gen_a", "gen_b"}) {
    if (!run_cli("gen-data --config \"" + path_of("gen.json") +
                 "\" --out \"" + path_of(tag) + "\" --seed 5")) {
      out.detail = "gen-data subcommand failed";
      return out;
    }
  }
  if (!identical(path_of("gen_a"), path_of("gen_b"),
                 {"train_data.csv", "gen_summary.json"})) {
    out.detail = "gen-data artifacts differ between reruns";
    return out;
  }

  out.pass = true;
  out.detail = "4 subcommands rerun with identical config and seed: " +
               std::to_string(compared) + " artifacts byte-identical";
  return out;
}

// --------------------------------------------------------------------- driver

int g_failures = 0;

void report(int number, const std::string& name, double budget_s,
            const std::function<Outcome()>& fn) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = fn();
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail = std::string("exception: ") + e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  if (budget_s > 0.0 && secs >= budget_s) {
    out.pass = false;
    out.detail += " [exceeded " + fmt(budget_s, 3) + " s budget]";
  }
  std::printf("%s  criterion %d (%s): %s [%.2f s]\n",
              out.pass ? "PASS" : "FAIL", number, name.c_str(),
              out.detail.c_str(), secs);
  std::fflush(stdout);
  if (!out.pass) ++g_failures;
}

}  // namespace

int main() {
  report(1, "gradient correctness", 5.0, criterion_gradients);
  report(2, "characterization-table training", 10.0, criterion_table_training);
  report(3, "cache model fidelity", 5.0, criterion_cache_model);
  report(4, "sweep response shape", 30.0, criterion_sweep_shape);
  report(5, "user-load knee", 30.0, criterion_user_knee);

  std::optional<ClosedLoop> loop;
  report(6, "closed-loop benefit", 60.0, [&]() -> Outcome {
    loop = run_closed_loop();
    return criterion_closed_loop(*loop);
  });
  report(7, "tuner invariants", 0.0, [&]() -> Outcome {
    if (!loop) {
      return {false, "closed-loop run unavailable (criterion 6 aborted)"};
    }
    return criterion_tuner_invariants(*loop);
  });
  report(8, "subcommand determinism", 0.0, criterion_determinism);

  if (g_failures == 0) {
    std::printf("all 8 criteria passed\n");
  } else {
    std::printf("%d of 8 criteria failed\n", g_failures);
  }
  return g_failures == 0 ? 0 : 1;
}
