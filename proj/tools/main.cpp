#include "commands.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>
#include <string>

namespace {

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("rendezvous");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("RENDEZVOUS_LOG");
  const std::string level = env ? env : "";
  if (level == "debug")
    spdlog::set_level(spdlog::level::debug);
  else if (level == "info")
    spdlog::set_level(spdlog::level::info);
  else if (level == "error")
    spdlog::set_level(spdlog::level::err);
  else
    spdlog::set_level(spdlog::level::warn);  // unset: warnings and errors
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();

  CLI::App app{"Distributed unicycle rendezvous simulator and certificate checker"};
  app.require_subcommand(1);

  rendezvous::cli::Options opts;
  std::string scenario;
  std::string out_dir;
  std::uint64_t seed = 0;
  int trials = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("scenario", scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    sub->add_flag("--json", opts.json, "Print machine-readable JSON");
    sub->add_option("--out-dir", out_dir, "Base directory for relative output paths");
  };

  auto* run = app.add_subcommand("run", "Simulate a scenario and write CSV/SVG/report");
  add_common(run);
  run->add_option("--k1", opts.k1, "Override the turn-rate gain")->expected(1);

  auto* analyze = app.add_subcommand("analyze-graph", "Connectivity analysis of the sensor graph");
  add_common(analyze);

  auto* certify = app.add_subcommand("certify", "Numerical Lyapunov certificate checks");
  add_common(certify);
  certify->add_option("--k1", opts.k1, "Override the turn-rate gain")->expected(1);
  auto* certify_seed = certify->add_option("--seed", seed, "Sampling seed");

  auto* sweep = app.add_subcommand("sweep", "Success rate versus k1 over random initial states");
  add_common(sweep);
  sweep->add_option("--k1", opts.k1, "k1 grid (comma separated or repeated)")->delimiter(',');
  auto* sweep_seed = sweep->add_option("--seed", seed, "Trial seed");
  auto* sweep_trials = sweep->add_option("--trials", trials, "Trials per k1 value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : rendezvous::cli::kSchemaError;
  }

  if (!out_dir.empty()) opts.out_dir = out_dir;
  if (certify_seed->count() > 0 || sweep_seed->count() > 0) opts.seed = seed;
  if (sweep_trials->count() > 0) opts.trials = trials;

  if (run->parsed()) return rendezvous::cli::cmd_run(scenario, opts, std::cout, std::cerr);
  if (analyze->parsed())
    return rendezvous::cli::cmd_analyze_graph(scenario, opts, std::cout, std::cerr);
  if (certify->parsed()) return rendezvous::cli::cmd_certify(scenario, opts, std::cout, std::cerr);
  return rendezvous::cli::cmd_sweep(scenario, opts, std::cout, std::cerr);
}
