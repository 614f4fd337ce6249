#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "odos/runner.hpp"
#include "odos/version.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed_override;
  bool no_timestamp = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("-c,--config", args.config_path, "run configuration JSON")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", args.seed_override, "override the config seed");
  cmd->add_flag("--no-timestamp", args.no_timestamp,
                "omit the timestamp from the report (for byte-reproducible output)");
}

int dispatch(odos::Subcommand command, const CommonArgs& args,
             const std::optional<std::string>& scenario_name = std::nullopt) {
  std::ifstream in(args.config_path);
  if (!in) {
    std::cerr << "odos: cannot open " << args.config_path << '\n';
    return 1;
  }
  std::ostringstream text;
  text << in.rdbuf();
  odos::RunConfig config;
  try {
    config = odos::parse_config(text.str());
  } catch (const odos::Error& e) {
    std::cerr << "odos: " << e.what() << '\n';
    return 1;
  }
  odos::RunOptions options;
  options.no_timestamp = args.no_timestamp;
  options.seed_override = args.seed_override;
  options.scenario_name = scenario_name;
  return odos::run_command(command, config, options);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal design of observational studies"};
  app.set_version_flag("--version", odos::kVersion);
  app.require_subcommand(1);

  CommonArgs evaluate_args, optimize_args, voi_args, scenario_args;
  CLI::App* evaluate = app.add_subcommand("evaluate", "expected utility of a design");
  add_common(evaluate, evaluate_args);
  CLI::App* optimize = app.add_subcommand("optimize", "search the design space");
  add_common(optimize, optimize_args);
  CLI::App* voi = app.add_subcommand("voi", "value of information and eligibility");
  add_common(voi, voi_args);
  CLI::App* scenario = app.add_subcommand("scenario", "run a built-in study scenario");
  std::string scenario_name;
  scenario->add_option("name", scenario_name,
                       "sample-size | hierarchical | subsample | markov-timing | remeasurement")
      ->required();
  add_common(scenario, scenario_args);

  CLI11_PARSE(app, argc, argv);

  if (evaluate->parsed()) return dispatch(odos::Subcommand::Evaluate, evaluate_args);
  if (optimize->parsed()) return dispatch(odos::Subcommand::Optimize, optimize_args);
  if (voi->parsed()) return dispatch(odos::Subcommand::Voi, voi_args);
  return dispatch(odos::Subcommand::Scenario, scenario_args, scenario_name);
}
