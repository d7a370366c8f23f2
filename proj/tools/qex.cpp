#include <CLI11.hpp>

#include "qex/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Extremal density matrices for qudit observables"};
  app.require_subcommand(1);

  qex::cli::CommandOptions options;

  auto add_common = [&](CLI::App* cmd, bool needs_input) {
    if (needs_input) cmd->add_option("--input", options.input_path, "Operator file (JSON)")->required();
    cmd->add_option("--out", options.out_path, "Output path (default: stdout)");
    cmd->add_option("--seed", options.seed, "Solver seed")->default_val(0);
    cmd->add_option("--format", options.format, "Output format")
        ->check(CLI::IsMember({"json", "csv"}));
  };
  auto add_constants = [&](CLI::App* cmd) {
    cmd->add_flag("--pure", options.constants.pure, "Pure-state constraints (all c_k = 0)");
    cmd->add_option("--c2", [&](const std::vector<std::string>& v) {
      options.constants.c2 = v.front();
      return true;
    }, "c_2 as a rational or decimal");
    cmd->add_option("--c3", [&](const std::vector<std::string>& v) {
      options.constants.c3 = v.front();
      return true;
    }, "c_3 as a rational or decimal");
    cmd->add_option("--c4", [&](const std::vector<std::string>& v) {
      options.constants.c4 = v.front();
      return true;
    }, "c_4 as a rational or decimal");
  };

  CLI::App* spectrum = app.add_subcommand("spectrum", "Full spectrum and projectors");
  add_common(spectrum, true);
  spectrum->add_flag("--verify", options.verify, "Append an eigensolver cross-check");

  CLI::App* extremal = app.add_subcommand("extremal", "Extremal states for fixed mixing constants");
  add_common(extremal, true);
  add_constants(extremal);
  extremal->add_flag("--verify", options.verify, "Append an eigensolver cross-check");

  CLI::App* sweep = app.add_subcommand("sweep", "Sweep a fixture parameter, emit CSV branches");
  add_common(sweep, true);
  add_constants(sweep);
  sweep->add_option("--param", options.parameter, "Fixture parameter to sweep")->required();
  sweep->add_option("--from", options.from, "Range start")->required();
  sweep->add_option("--to", options.to, "Range end")->required();
  sweep->add_option("--steps", options.steps, "Grid points")->default_val(101);

  CLI::App* region = app.add_subcommand("region", "Admissibility classification grid, CSV");
  region->add_option("--dim", options.dim, "Dimension (3 or 4)")->required();
  region->add_option("--steps", options.resolution, "Grid resolution per axis")->default_val(100);
  region->add_option("--out", options.out_path, "Output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? 0 : qex::cli::kExitValidation;
  }

  if (spectrum->parsed()) return qex::cli::cmd_spectrum(options);
  if (extremal->parsed()) return qex::cli::cmd_extremal(options);
  if (sweep->parsed()) return qex::cli::cmd_sweep(options);
  if (region->parsed()) return qex::cli::cmd_region(options);
  return qex::cli::kExitValidation;
}
