// Command-line front end: train, eval, baseline, report.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "ma2c/checkpoint.hpp"
#include "ma2c/config.hpp"
#include "ma2c/network.hpp"
#include "ma2c/report.hpp"
#include "ma2c/trace.hpp"
#include "ma2c/trainer.hpp"

namespace fs = std::filesystem;
using namespace ma2c;

namespace {

std::string summary_header() {
  return "seed,cumulative_queue,cumulative_reward,inserted,exited,final_running,deferred,cleared_at,"
         "CO2_g,CO_g,NOx_g,PMx_g,HC_g,fuel_mL\n";
}

std::string summary_line(std::uint64_t seed, const EpisodeLog& log) {
  const PollutantVector totals = log.ledger.network_totals();
  std::string line = fmt::format("{},{:.9g},{:.9g},{},{},{},{},{:.9g}", seed, log.cumulative_queue,
                                 log.cumulative_reward, log.inserted, log.exited, log.final_running, log.deferred,
                                 log.cleared_at);
  for (Eigen::Index p = 0; p < totals.size(); ++p) line += fmt::format(",{:.9g}", totals(p));
  return line + "\n";
}

void print_episode(const char* who, std::uint64_t seed, const EpisodeLog& log) {
  const std::string cleared = log.cleared_at >= 0.0 ? fmt::format("{:.0f} s", log.cleared_at) : "no";
  fmt::print("{} seed {}: cumulative queue {:.0f}, running at end {}, cleared {}, NOx {:.2f} g\n", who, seed,
             log.cumulative_queue, log.final_running, cleared, log.ledger.network_totals()(static_cast<int>(Pollutant::NOx)));
}

// Writes trace_<seed>.csv, the shared lanes.csv and appends to summary.csv.
void save_episode(const fs::path& out, std::uint64_t seed, const EpisodeLog& log, std::ofstream& summary) {
  if (log.trace) {
    write_trace_csv(*log.trace, out / fmt::format("trace_{}.csv", seed));
    if (!fs::exists(out / "lanes.csv")) write_lanes_csv(*log.trace, out / "lanes.csv");
  }
  summary << summary_line(seed, log);
}

std::ofstream open_summary(const fs::path& out) {
  fs::create_directories(out);
  std::ofstream summary(out / "summary.csv");
  if (!summary) throw std::runtime_error("cannot write " + (out / "summary.csv").string());
  summary << summary_header();
  return summary;
}

int run_train(const fs::path& config_path, const fs::path& network_path, const fs::path& out,
              std::optional<long> steps, std::optional<std::uint64_t> seed) {
  TrainConfig config = config_path.empty() ? TrainConfig{} : load_train_config(config_path);
  if (steps) config.total_training_steps = *steps;
  if (seed) config.seed = *seed;
  config.validate();
  auto spec = std::make_shared<const NetworkSpec>(load_network(network_path));
  Ma2cModel model = make_model(spec, config);
  fmt::print("training {} agents for {} interaction steps\n", spec->num_agents(), config.total_training_steps);
  const TrainResult result = train(model, config, out, [](const CurveRow& row) {
    fmt::print("episode {:4d}  steps {:7d}  mean reward {:+.4f}  mean queue {:.3f}\n", row.episode, row.steps,
               row.mean_reward, row.mean_queue);
  });
  fmt::print("wrote {} and {}\n", result.checkpoints.back().string(), (out / "training_curve.csv").string());
  return 0;
}

int run_eval(const fs::path& checkpoint, int episodes, std::uint64_t seed, const fs::path& out) {
  Checkpoint ck = load_checkpoint(checkpoint);
  std::optional<std::ofstream> summary;
  if (!out.empty()) summary = open_summary(out);
  EpisodeOptions options;
  options.record_trace = !out.empty();
  for (int k = 0; k < episodes; ++k) {
    const std::uint64_t s = seed + static_cast<std::uint64_t>(k);
    const auto schedule = episode_schedule(*ck.model.spec, ck.config, s);
    const EpisodeLog log = run_episode(ck.model, schedule, ck.config, Mode::eval, s, options);
    print_episode("trained", s, log);
    if (summary) save_episode(out, s, log, *summary);
  }
  return 0;
}

int run_baseline(double cycle, const fs::path& network_path, const fs::path& config_path, int episodes,
                 std::uint64_t seed, const fs::path& out) {
  TrainConfig config = config_path.empty() ? TrainConfig{} : load_train_config(config_path);
  auto spec = std::make_shared<const NetworkSpec>(load_network(network_path));
  const FixedTimeController controller = fixed_time_baseline(*spec, cycle);
  std::optional<std::ofstream> summary;
  if (!out.empty()) summary = open_summary(out);
  EpisodeOptions options;
  options.record_trace = !out.empty();
  for (int k = 0; k < episodes; ++k) {
    const std::uint64_t s = seed + static_cast<std::uint64_t>(k);
    const EpisodeLog log = run_fixed_time_episode(spec, episode_schedule(*spec, config, s), config, controller, options);
    print_episode("fixed-time", s, log);
    if (summary) save_episode(out, s, log, *summary);
  }
  return 0;
}

int run_report(const fs::path& trained, const fs::path& baseline, const fs::path& out, bool svg) {
  const EpisodeTrace t = read_trace_csv(trained), b = read_trace_csv(baseline);
  std::cout << write_report(t, b, out, default_intervals(), svg);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent advantage actor-critic traffic signal control with emission accounting"};
  app.require_subcommand(1);

  fs::path config, network, out, checkpoint, trained, baseline;
  std::optional<long> steps;
  std::optional<std::uint64_t> train_seed;
  int episodes = 10;
  std::uint64_t seed = 0;
  double cycle = 20.0;
  bool no_svg = false;

  auto* train_cmd = app.add_subcommand("train", "Train an MA2C controller");
  train_cmd->add_option("--config", config, "Training config (JSON)")->check(CLI::ExistingFile);
  train_cmd->add_option("--network", network, "Network file (JSON)")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--out", out, "Output directory")->required();
  train_cmd->add_option("--steps", steps, "Override total_training_steps");
  train_cmd->add_option("--seed", train_seed, "Override the training seed");

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint greedily");
  eval_cmd->add_option("--checkpoint", checkpoint, "Checkpoint file")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--episodes", episodes, "Number of episodes")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--seed", seed, "First evaluation seed; episode k uses seed + k");
  eval_cmd->add_option("--out", out, "Write per-second traces and summary.csv here");

  auto* base_cmd = app.add_subcommand("baseline", "Run the fixed-time controller");
  base_cmd->add_option("--cycle", cycle, "Seconds per phase")->check(CLI::PositiveNumber);
  base_cmd->add_option("--network", network, "Network file (JSON)")->required()->check(CLI::ExistingFile);
  base_cmd->add_option("--config", config, "Config supplying demand and simulator settings")
      ->check(CLI::ExistingFile);
  base_cmd->add_option("--episodes", episodes, "Number of episodes")->check(CLI::PositiveNumber);
  base_cmd->add_option("--seed", seed, "First seed; episode k uses seed + k");
  base_cmd->add_option("--out", out, "Write per-second traces and summary.csv here");

  auto* report_cmd = app.add_subcommand("report", "Compare a trained and a baseline trace");
  report_cmd->add_option("--trained", trained, "Trained-controller trace CSV")->required()->check(CLI::ExistingFile);
  report_cmd->add_option("--baseline", baseline, "Baseline trace CSV")->required()->check(CLI::ExistingFile);
  report_cmd->add_option("--out", out, "Output directory")->required();
  report_cmd->add_flag("--no-svg", no_svg, "Skip the SVG chart");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*train_cmd) return run_train(config, network, out, steps, train_seed);
    if (*eval_cmd) return run_eval(checkpoint, episodes, seed, out);
    if (*base_cmd) return run_baseline(cycle, network, config, episodes, seed, out);
    if (*report_cmd) return run_report(trained, baseline, out, !no_svg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
