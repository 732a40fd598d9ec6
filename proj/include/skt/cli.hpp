#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace skt {

/// Process exit codes of `skt-spde run`.
enum ExitCode : int {
  kExitOk = 0,
  kExitError = 1,
  kExitInadmissible = 2,
  kExitBlowUp = 3,
  kExitUsage = 64,
};

struct RunOptions {
  std::filesystem::path config;
  std::vector<std::string> overrides;
  std::optional<unsigned> workers;
  std::optional<std::filesystem::path> output;
  std::optional<std::string> study;
};

/**
 * Loads the config, gates on admissibility, runs the ensemble (and the
 * study, if any) and writes into the output directory:
 *
 *   stats.csv        per save time, field and species (header-only for the
 *                    self-contained heat and moment studies)
 *   summary.json     headline estimators with standard errors, study results
 *   conditions.json  the coercivity report
 *   manifest.json    version, seed and the resolved config
 */
int run_experiment(const RunOptions& opts, std::ostream& log, std::ostream& err);

/// Entry point of the command-line tool.
int cli_main(int argc, char** argv);

}  // namespace skt
