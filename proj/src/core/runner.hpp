#pragma once

#include <string>
#include <vector>

#include "core/config.hpp"

namespace evk {

struct RunResult {
  std::vector<std::string> artifacts;  // paths written
  std::string summary;                 // one-line outcome for the console
};

// Executes one subcommand end to end: load inputs, compute, write artifacts
// under cfg.out_dir.  Known subcommands: cars, bootstrap, diff, permute, im,
// placebo, loo, sweep-window, sweep-cap, subsample, decompose, power,
// calibrate, report.  Unknown names -> InvalidArgument.  On error nothing is
// written.
RunResult run_pipeline(const RunConfig& cfg, const std::string& subcommand);

}  // namespace evk
