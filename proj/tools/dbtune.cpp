#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dbtune/config.hpp"
#include "dbtune/errors.hpp"
#include "dbtune/harness.hpp"

namespace {

struct CliArgs {
  std::string config_path;
  std::string out_dir;
  std::string model_path;
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool no_tune = false;
};

void add_common(CLI::App* sub, CliArgs& args) {
  sub->add_option("--config", args.config_path, "scenario config (JSON)")
      ->required();
  sub->add_option("--seed", args.seed,
                  "override workload.seed and net.seed")
      ->each([&args](const std::string&) { args.seed_given = true; });
  sub->add_option("--out", args.out_dir, "override output_dir");
}

dbtune::ScenarioConfig load_with_overrides(const CliArgs& args) {
  dbtune::ScenarioConfig cfg = dbtune::load_config(args.config_path);
  if (args.seed_given) {
    cfg.workload.seed = args.seed;
    cfg.net.seed = args.seed;
  }
  if (!args.out_dir.empty()) {
    cfg.output_dir = args.out_dir;
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "dbtune — closed-loop DBMS memory tuning simulator\n"
      "A simulated buffer cache and shared pool serve a skewed OLTP load; a\n"
      "monitor aggregates windowed metrics, a neural estimator proposes\n"
      "sizes, and the tuner steps the knobs one granule at a time."};
  app.require_subcommand(1);
  CliArgs args;

  CLI::App* run = app.add_subcommand(
      "run", "simulate one scenario (closed loop when tuning is enabled)");
  add_common(run, args);
  run->add_option("--model", args.model_path,
                  "trained model JSON (overrides config model_path)");
  run->add_flag("--no-tune", args.no_tune,
                "disable tuning regardless of the config");

  CLI::App* train = app.add_subcommand(
      "train", "fit the estimator to the configured training_data CSV");
  add_common(train, args);
  train->add_option("--model", args.model_path,
                    "where to write the model (default <out>/model.json)");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "mean response per buffer-cache size, identical workload");
  add_common(sweep, args);

  CLI::App* gen = app.add_subcommand(
      "gen-data", "characterize the configured grid into a training CSV");
  add_common(gen, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    dbtune::ScenarioConfig cfg = load_with_overrides(args);
    if (run->parsed()) {
      if (!args.model_path.empty()) {
        cfg.model_path = args.model_path;
      }
      if (args.no_tune) {
        cfg.tuning_enabled = false;
      }
      const dbtune::SimulationOutcome outcome = dbtune::run_scenario(cfg);
      std::cout << "run: " << outcome.windows.size() << " windows -> "
                << cfg.output_dir << "\n";
    } else if (train->parsed()) {
      const dbtune::TrainOutcome outcome =
          dbtune::train_cmd(cfg, args.model_path);
      std::cout << "train: final mse "
                << outcome.trace.mse_per_epoch.back() << " -> "
                << (args.model_path.empty()
                        ? cfg.output_dir + "/model.json"
                        : args.model_path)
                << "\n";
    } else if (sweep->parsed()) {
      const auto points = dbtune::sweep_cmd(cfg);
      std::cout << "sweep: " << points.size() << " sizes -> "
                << cfg.output_dir << "/sweep.csv\n";
    } else if (gen->parsed()) {
      const dbtune::GenResult result = dbtune::gen_data_cmd(cfg);
      std::cout << "gen-data: " << result.rows.size() << " rows, "
                << result.warnings.size() << " warnings -> "
                << cfg.output_dir << "/train_data.csv\n";
    }
  } catch (const dbtune::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const dbtune::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
