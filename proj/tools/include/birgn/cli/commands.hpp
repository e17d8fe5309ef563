#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "birgn/cli/config.hpp"
#include "birgn/irgn.hpp"

namespace birgn::cli {

enum ExitCode : int {
  kRuleSatisfied = 0,
  kConfigError = 1,
  kMaxOuter = 2,
  kInnerFailure = 3,
};

int exit_code_for(StopReason reason);

/// Runs IRGN for a validated config on an already-built experiment.
RunResult execute(const RunConfig& config, const Experiment& experiment);

/// Writes history.csv, reconstruction.csv, meta.json and plot.svg into `dir`.
void write_run_artifacts(const std::string& dir, const RunConfig& config, const Experiment& experiment,
                         const RunResult& result);

/// meta.json document: the resolved config (replayable through --config) and
/// a summary of the outcome.
nlohmann::json make_meta(const RunConfig& config, const Experiment& experiment, const RunResult& result);

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err);

struct SweepOptions {
  std::vector<double> deltas;
  /// Seeds config.seed, config.seed + 1, ... per delta.
  int seeds = 1;
  int jobs = 1;
};

/// One run per (delta, seed) in a worker pool; each run's artifacts go to
/// <output>/run_<k>/ and the aggregate to <output>/sweep.csv.
int cmd_sweep(const RunConfig& config, const SweepOptions& options, std::ostream& out, std::ostream& err);

struct VerifyOptions {
  std::string suite;
  double nu = 1.0;
  int rule = 3;
  int seeds = 5;
  std::vector<double> deltas;
  /// Where rates.csv goes; empty means no file.
  std::string output;
};

int cmd_verify(const VerifyOptions& options, std::ostream& out, std::ostream& err);

/// Full command-line entry point (subcommands run, sweep, verify).
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace birgn::cli
