#include "dbtune/config.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>

#include <json.hpp>

#include "dbtune/csv.hpp"
#include "dbtune/errors.hpp"
#include "dbtune/ladder.hpp"

namespace dbtune {

namespace {

using json = nlohmann::ordered_json;

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> known) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (std::find_if(known.begin(), known.end(), [&key](const char* k) {
          return key == k;
        }) == known.end()) {
      throw ValidationError("config: unknown key \"" + path + key + "\"");
    }
  }
}

const json* find(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

[[noreturn]] void type_error(const std::string& path, const char* key,
                             const char* expected) {
  throw ValidationError("config: \"" + path + key + "\" must be " + expected);
}

void get_double(const json& obj, const std::string& path, const char* key,
                double& out) {
  if (const json* v = find(obj, key)) {
    if (!v->is_number()) type_error(path, key, "a number");
    out = v->get<double>();
  }
}

void get_int(const json& obj, const std::string& path, const char* key,
             int& out) {
  if (const json* v = find(obj, key)) {
    if (!v->is_number_integer()) type_error(path, key, "an integer");
    out = v->get<int>();
  }
}

void get_u64(const json& obj, const std::string& path, const char* key,
             std::uint64_t& out) {
  if (const json* v = find(obj, key)) {
    if (!v->is_number_integer() ||
        (v->is_number_integer() && !v->is_number_unsigned() &&
         v->get<long long>() < 0)) {
      type_error(path, key, "a non-negative integer");
    }
    out = v->get<std::uint64_t>();
  }
}

void get_bool(const json& obj, const std::string& path, const char* key,
              bool& out) {
  if (const json* v = find(obj, key)) {
    if (!v->is_boolean()) type_error(path, key, "a boolean");
    out = v->get<bool>();
  }
}

void get_string(const json& obj, const std::string& path, const char* key,
                std::string& out) {
  if (const json* v = find(obj, key)) {
    if (!v->is_string()) type_error(path, key, "a string");
    out = v->get<std::string>();
  }
}

void get_int_list(const json& obj, const std::string& path, const char* key,
                  std::vector<int>& out) {
  if (const json* v = find(obj, key)) {
    if (!v->is_array()) type_error(path, key, "an array of integers");
    std::vector<int> values;
    for (const json& item : *v) {
      if (!item.is_number_integer()) {
        type_error(path, key, "an array of integers");
      }
      values.push_back(item.get<int>());
    }
    out = std::move(values);
  }
}

void get_u64_list(const json& obj, const std::string& path, const char* key,
                  std::vector<std::uint64_t>& out) {
  if (const json* v = find(obj, key)) {
    if (!v->is_array()) type_error(path, key, "an array of integers");
    std::vector<std::uint64_t> values;
    for (const json& item : *v) {
      if (!item.is_number_integer() ||
          (!item.is_number_unsigned() && item.get<long long>() < 0)) {
        type_error(path, key, "an array of non-negative integers");
      }
      values.push_back(item.get<std::uint64_t>());
    }
    out = std::move(values);
  }
}

void parse_sim(const json& obj, SimConfig& sim) {
  const std::string path = "sim.";
  check_keys(obj, path,
             {"block_size_kb", "t_cpu_ms", "t_io_ms", "t_parse_ms",
              "user_capacity", "utilization_ceiling", "buffer_ladder_mb",
              "pool_ladder_mb", "plan_slots_per_mb"});
  get_int(obj, path, "block_size_kb", sim.block_size_kb);
  get_double(obj, path, "t_cpu_ms", sim.t_cpu_ms);
  get_double(obj, path, "t_io_ms", sim.t_io_ms);
  get_double(obj, path, "t_parse_ms", sim.t_parse_ms);
  get_int(obj, path, "user_capacity", sim.user_capacity);
  get_double(obj, path, "utilization_ceiling", sim.utilization_ceiling);
  get_int_list(obj, path, "buffer_ladder_mb", sim.buffer_ladder_mb);
  get_int_list(obj, path, "pool_ladder_mb", sim.pool_ladder_mb);
  get_int(obj, path, "plan_slots_per_mb", sim.plan_slots_per_mb);
}

void parse_workload(const json& obj, WorkloadSpec& workload) {
  const std::string path = "workload.";
  check_keys(obj, path,
             {"initial_table_rows", "rows_per_block", "growth_rows_per_tick",
              "zipf_s", "blocks_per_query_min", "blocks_per_query_max",
              "distinct_statements", "user_schedule", "seed"});
  get_u64(obj, path, "initial_table_rows", workload.initial_table_rows);
  get_u64(obj, path, "rows_per_block", workload.rows_per_block);
  get_u64(obj, path, "growth_rows_per_tick", workload.growth_rows_per_tick);
  get_double(obj, path, "zipf_s", workload.zipf_s);
  get_int(obj, path, "blocks_per_query_min", workload.blocks_per_query_min);
  get_int(obj, path, "blocks_per_query_max", workload.blocks_per_query_max);
  get_int(obj, path, "distinct_statements", workload.distinct_statements);
  get_u64(obj, path, "seed", workload.seed);
  if (const json* v = find(obj, "user_schedule")) {
    if (!v->is_array() || v->empty()) {
      type_error(path, "user_schedule", "a nonempty array of [tick, users]");
    }
    std::vector<UserStep> schedule;
    for (const json& item : *v) {
      if (!item.is_array() || item.size() != 2 ||
          !item[0].is_number_integer() || !item[1].is_number_integer()) {
        type_error(path, "user_schedule", "an array of [tick, users] pairs");
      }
      UserStep step;
      step.tick = item[0].get<std::uint64_t>();
      step.users = item[1].get<int>();
      schedule.push_back(step);
    }
    workload.user_schedule = std::move(schedule);
  }
}

void parse_monitor(const json& obj, MonitorConfig& monitor) {
  check_keys(obj, "monitor.", {"window_ticks"});
  get_int(obj, "monitor.", "window_ticks", monitor.window_ticks);
}

void parse_tuner(const json& obj, TunerConfig& tuner) {
  const std::string path = "tuner.";
  check_keys(obj, path,
             {"r_threshold_ms", "cooldown_windows", "tune_shared_pool"});
  get_double(obj, path, "r_threshold_ms", tuner.r_threshold_ms);
  get_int(obj, path, "cooldown_windows", tuner.cooldown_windows);
  get_bool(obj, path, "tune_shared_pool", tuner.tune_shared_pool);
}

void parse_net(const json& obj, NetConfig& net) {
  const std::string path = "net.";
  check_keys(obj, path,
             {"n_inputs", "n_hidden", "n_outputs", "learning_rate", "epochs",
              "init_half_range", "seed"});
  get_int(obj, path, "n_inputs", net.n_inputs);
  get_int(obj, path, "n_hidden", net.n_hidden);
  get_int(obj, path, "n_outputs", net.n_outputs);
  get_double(obj, path, "learning_rate", net.learning_rate);
  get_int(obj, path, "epochs", net.epochs);
  get_double(obj, path, "init_half_range", net.init_half_range);
  get_u64(obj, path, "seed", net.seed);
}

void parse_sweep(const json& obj, SweepSpec& sweep) {
  check_keys(obj, "sweep.", {"sizes"});
  get_int_list(obj, "sweep.", "sizes", sweep.sizes);
}

void parse_gen(const json& obj, GenGrid& gen) {
  const std::string path = "gen.";
  check_keys(obj, path, {"table_rows", "users", "target_response_ms", "ticks"});
  get_u64_list(obj, path, "table_rows", gen.table_rows);
  get_int_list(obj, path, "users", gen.users);
  get_double(obj, path, "target_response_ms", gen.target_response_ms);
  get_u64(obj, path, "ticks", gen.ticks);
}

}  // namespace

void ScenarioConfig::validate() const {
  sim.validate();
  workload.validate();
  monitor.validate();
  tuner.validate();
  net.validate();
  const auto window = static_cast<std::uint64_t>(monitor.window_ticks);
  if (total_ticks < window) {
    throw ValidationError("total_ticks must be at least monitor.window_ticks");
  }
  if (total_ticks % window != 0) {
    throw ValidationError(
        "total_ticks must be a multiple of monitor.window_ticks so every "
        "tick falls in a reported window");
  }
  ladder_index(sim.buffer_ladder_mb, initial_cache_mb, "initial_cache_mb");
  ladder_index(sim.pool_ladder_mb, initial_pool_mb, "initial_pool_mb");
  for (const int size : sweep.sizes) {
    ladder_index(sim.buffer_ladder_mb, size, "sweep.sizes");
  }
  if (gen) {
    if (gen->table_rows.empty() || gen->users.empty()) {
      throw ValidationError("gen.table_rows and gen.users must be nonempty");
    }
    for (const std::uint64_t rows : gen->table_rows) {
      if (rows < workload.rows_per_block) {
        throw ValidationError(
            "gen.table_rows entries must be at least workload.rows_per_block");
      }
    }
    for (const int users : gen->users) {
      if (users < 1) {
        throw ValidationError("gen.users entries must be positive");
      }
    }
    if (!(gen->target_response_ms > 0.0)) {
      throw ValidationError("gen.target_response_ms must be positive");
    }
    if (gen->ticks < window || gen->ticks % window != 0) {
      throw ValidationError(
          "gen.ticks must be a positive multiple of monitor.window_ticks");
    }
  }
}

ScenarioConfig parse_config(const std::string& json_text,
                            const std::string& origin) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("config " + origin + ": " + e.what());
  }
  if (!doc.is_object()) {
    throw ValidationError("config " + origin + ": top level must be an object");
  }
  check_keys(doc, "",
             {"sim", "workload", "monitor", "tuner", "net", "total_ticks",
              "initial_cache_mb", "initial_pool_mb", "tuning_enabled",
              "model_path", "output_dir", "training_data", "sweep", "gen"});

  ScenarioConfig cfg;
  const auto section = [&doc](const char* key) -> const json* {
    const json* v = find(doc, key);
    if (v != nullptr && !v->is_object()) {
      throw ValidationError("config: \"" + std::string(key) +
                            "\" must be an object");
    }
    return v;
  };
  if (const json* v = section("sim")) parse_sim(*v, cfg.sim);
  if (const json* v = section("workload")) parse_workload(*v, cfg.workload);
  if (const json* v = section("monitor")) parse_monitor(*v, cfg.monitor);
  if (const json* v = section("tuner")) parse_tuner(*v, cfg.tuner);
  if (const json* v = section("net")) parse_net(*v, cfg.net);
  if (const json* v = section("sweep")) parse_sweep(*v, cfg.sweep);
  if (const json* v = section("gen")) {
    GenGrid gen;
    parse_gen(*v, gen);
    cfg.gen = gen;
  }
  get_u64(doc, "", "total_ticks", cfg.total_ticks);
  get_int(doc, "", "initial_cache_mb", cfg.initial_cache_mb);
  get_int(doc, "", "initial_pool_mb", cfg.initial_pool_mb);
  get_bool(doc, "", "tuning_enabled", cfg.tuning_enabled);
  get_string(doc, "", "model_path", cfg.model_path);
  get_string(doc, "", "output_dir", cfg.output_dir);
  get_string(doc, "", "training_data", cfg.training_data);

  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_file(path), path.string());
}

}  // namespace dbtune
