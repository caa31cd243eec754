// SPDX-License-Identifier: Apache-2.0
//
// fpmix: validate, run and sweep multi-species Fokker-Planck mixture
// configurations.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fpmix/cli.hpp"

int main(int argc, char **argv) {
  namespace cli = fpmix::cli;
  cli::Options o;
  for (int i = 0; i < argc; ++i)
    o.command_line += (i ? " " : "") + std::string(argv[i]);

  CLI::App app{"Multi-species Fokker-Planck gas-mixture solver"};
  app.set_version_flag("--version", std::string(fpmix::version));
  app.require_subcommand(1);

  std::string tier;
  auto add_common = [&](CLI::App *sub, bool with_out) {
    sub->add_option("--config", o.config_path, "configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--tier", tier, "required admissibility tier")
        ->check(CLI::IsMember({"conservation", "positivity", "h-theorem"}));
    if (with_out) {
      sub->add_option("--out", o.out_dir, "output directory");
      sub->add_flag("--correct-moments", o.correct_moments,
                    "project each species onto the conserved moments after every step");
    }
  };

  auto *validate = app.add_subcommand("validate", "check pair parameters against a tier");
  add_common(validate, false);

  auto *run = app.add_subcommand("run", "run a simulation and write its outputs");
  add_common(run, true);

  auto *sweep = app.add_subcommand("sweep", "run one simulation per parameter value");
  add_common(sweep, true);
  sweep->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("--param", o.sweep_parameter, "delta, alpha, gamma, c_ij or c_ji")
      ->required();
  sweep->add_option("--pair", o.sweep_pair, "pair as A:B (default: first pair)");
  sweep->add_option("--from", o.sweep_from, "first value")->required();
  sweep->add_option("--to", o.sweep_to, "last value")->required();
  sweep->add_option("--samples", o.sweep_samples, "number of values (0 allowed)")
      ->required();

  auto *presets = app.add_subcommand("presets", "print the preset parameters");
  auto &pi = o.preset_inputs;
  presets->add_option("--m1", pi.m1, "mass of species 1")->capture_default_str();
  presets->add_option("--m2", pi.m2, "mass of species 2")->capture_default_str();
  presets->add_option("--n1", pi.n1, "density of species 1")->capture_default_str();
  presets->add_option("--n2", pi.n2, "density of species 2")->capture_default_str();
  presets->add_option("--c12", pi.c12, "friction constant c_12")->capture_default_str();
  presets->add_option("--c21", pi.c21, "friction constant c_21")->capture_default_str();
  presets->add_option("--dim", pi.d, "velocity dimension")->capture_default_str();
  presets->add_flag("--json", o.json_output, "print JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::bad_config;
  }
  if (!tier.empty())
    o.tier = fpmix::tier_from_string(tier);

  if (*validate)
    return cli::cmd_validate(o, std::cout, std::cerr);
  if (*run)
    return cli::cmd_run(o, std::cout, std::cerr);
  if (*sweep)
    return cli::cmd_sweep(o, std::cout, std::cerr);
  return cli::cmd_presets(o, std::cout, std::cerr);
}
