#pragma once

// The four commands behind the CLI. Each consumes the parsed config and leaves
// its outputs under output_dir; separate and experiment also write a
// line-per-iteration diagnostics trace.

#include "config.hpp"

namespace vemove {

void cmd_simulate(const RunConfig& cfg);
void cmd_separate(const RunConfig& cfg);
void cmd_evaluate(const RunConfig& cfg);
void cmd_experiment(const RunConfig& cfg);

}  // namespace vemove
