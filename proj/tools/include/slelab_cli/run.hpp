#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slelab/experiments.hpp"
#include "slelab_cli/config.hpp"

namespace slelab::cli {

struct CommandOptions {
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::optional<std::filesystem::path> out;
};

struct RunOutcome {
  ExperimentReport report;
  nlohmann::json report_json;
  std::vector<std::filesystem::path> files;
};

/// Seed precedence: --seed, then the config's seed, then SLE_LAB_SEED, then 0.
std::uint64_t resolve_seed(const RunConfig& config, std::optional<std::uint64_t> cli_seed);

/// Runs the configured experiment and writes its files. On any exception
/// every file written so far is removed before rethrowing.
RunOutcome run(RunConfig config, const CommandOptions& options);

/// Report as written to report.json: all report fields except runtime,
/// plus the resolved config and its hash.
nlohmann::json report_to_json(const ExperimentReport& report, const RunConfig& config, const std::string& hash,
                              const std::vector<std::string>& files);

/// Parameter schema and the result an experiment tests. Throws
/// ConfigError listing the valid names for an unknown experiment.
std::string describe(const std::string& experiment);

/// Exit codes of the sle-lab command.
inline constexpr int kExitPassed = 0;
inline constexpr int kExitFailedChecks = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitRuntimeError = 3;

/// `sle-lab run`: loads the file, runs, prints a summary to `out` and
/// errors to `err`; returns the exit code.
int run_command(const std::filesystem::path& config_file, const CommandOptions& options, std::ostream& out,
                std::ostream& err);

}  // namespace slelab::cli
