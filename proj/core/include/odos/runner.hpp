#pragma once

#include "odos/config.hpp"

namespace odos {

enum class Subcommand { Evaluate, Optimize, Voi, Scenario };

struct RunOptions {
  bool no_timestamp = false;
  std::optional<std::uint64_t> seed_override;
  std::optional<std::string> scenario_name;  // must match the config's scenario
};

// Runs one subcommand and writes <prefix>.report.json and <prefix>.table.csv
// (plus <prefix>.plan.csv for optimize). Throws on failure.
Json execute(Subcommand command, const RunConfig& config, const RunOptions& options = {});

// Exception-mapping wrapper: 0 on success, 2 on Infeasible, 1 otherwise.
int run_command(Subcommand command, const RunConfig& config, const RunOptions& options = {});

}  // namespace odos
