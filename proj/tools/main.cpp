#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"wncs-sim: wireless networked platoon testbed simulator"};
  app.require_subcommand(1);

  std::string default_out = "out";
  if (const char* env = std::getenv("WNCS_OUT_DIR")) default_out = env;

  wncs::cli::RunArgs run_args;
  run_args.out_dir = default_out;
  std::uint64_t seed_value = 0;
  auto* run = app.add_subcommand("run", "run one scenario");
  run->add_option("--config", run_args.config_path, "scenario file")
      ->required();
  run->add_option("--out", run_args.out_dir, "output directory");
  auto* seed_opt =
      run->add_option("--seed", seed_value, "override the scenario seed");

  wncs::cli::SweepArgs sweep_args;
  sweep_args.out_dir = default_out;
  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep");
  sweep->add_option("--config", sweep_args.config_path, "scenario file")
      ->required();
  sweep->add_option("--param", sweep_args.param_path,
                    "dotted config key, e.g. downlink.p_loss")
      ->required();
  sweep->add_option("--values", sweep_args.values, "comma-separated values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--out", sweep_args.out_dir, "output directory");

  wncs::cli::CdfArgs cdf_args;
  auto* cdf = app.add_subcommand("cdf", "positioning-error CDF from a trace");
  cdf->add_option("--trace", cdf_args.trace_path, "trace.jsonl path")
      ->required();
  cdf->add_option("--out", cdf_args.out_path, "output file")->required();

  wncs::cli::ValidateArgs validate_args;
  auto* validate = app.add_subcommand("validate", "check a scenario file");
  validate->add_option("--config", validate_args.config_path, "scenario file")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (run->parsed()) {
    if (seed_opt->count() > 0) run_args.seed_override = seed_value;
    return wncs::cli::cmd_run(run_args, std::cout, std::cerr);
  }
  if (sweep->parsed())
    return wncs::cli::cmd_sweep(sweep_args, std::cout, std::cerr);
  if (cdf->parsed()) return wncs::cli::cmd_cdf(cdf_args, std::cout, std::cerr);
  if (validate->parsed())
    return wncs::cli::cmd_validate(validate_args, std::cout, std::cerr);
  return 1;
}
