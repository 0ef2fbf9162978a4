#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "couplewelfare/cli.hpp"

int main(int argc, char** argv) {
  using couplewelfare::RunConfig;

  CLI::App app{"Welfare analysis of couple taxation reforms"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string schedule_dir;
  std::string scenario;
  std::string out_dir = ".";
  std::string economy;
  std::string pop_config;
  std::string regime;
  double sigma = 0.0;
  double theta = 0.0;
  double g = 0.0;
  std::size_t size = 0;
  bool no_variance_correction = false;

  app.add_option("--schedule-dir", schedule_dir, "Directory of tax schedule JSON files");
  app.add_option("--population", cfg.populations,
                 "Population CSV, optionally YEAR=path; repeatable");
  app.add_option("--scenario", scenario, "Scenario or counterfactual JSON file");
  app.add_option("--elasticities", cfg.elasticities,
                 "Profile name (baseline, upper, lower, high, low, quintile, "
                 "table1-notes) or JSON file");
  app.add_option("--out-dir", out_dir, "Output directory");
  app.add_option("--seed", cfg.seed, "Random seed");
  app.add_option("--threads", cfg.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--full-precision", cfg.full_precision, "Write 17 significant digits");
  app.add_option("--economy", economy, "HSV economy JSON file");
  auto* o_sigma = app.add_option("--sigma", sigma, "Override sigma");
  auto* o_theta = app.add_option("--theta", theta, "Override theta");
  auto* o_g = app.add_option("--g", g, "Override g");
  app.add_option("--regime", regime, "joint, separate or both");
  app.add_option("--pop-config", pop_config, "Synthetic population JSON config");
  auto* o_size = app.add_option("--size", size, "Synthetic population size");
  app.add_flag("--no-variance-correction", no_variance_correction,
               "Skip the selection correction of stage-2 standard errors");

  for (const auto& name : couplewelfare::command_names()) {
    app.add_subcommand(name)->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "{\"error\":\"invalid_argument\",\"message\":\"" << e.what()
              << "\"}\n";
    return 2;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  if (!schedule_dir.empty()) cfg.schedule_dir = schedule_dir;
  if (!scenario.empty()) cfg.scenario = scenario;
  cfg.out_dir = out_dir;
  if (!economy.empty()) cfg.economy = economy;
  if (!pop_config.empty()) cfg.pop_config = pop_config;
  if (!regime.empty()) cfg.regime = regime;
  if (o_sigma->count()) cfg.sigma = sigma;
  if (o_theta->count()) cfg.theta = theta;
  if (o_g->count()) cfg.g = g;
  if (o_size->count()) cfg.size = size;
  cfg.variance_correction = !no_variance_correction;

  return couplewelfare::run(cfg, std::cerr);
}
