#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "imverde/config.hpp"

namespace imverde {

struct CommandOptions {
  std::optional<std::uint64_t> seed;  // overrides cfg.seed
  std::filesystem::path out_dir = "out";
  bool deterministic = false;         // forces one thread
};

/// Files written by a command, relative to the output directory.
struct CommandOutput {
  std::vector<std::string> artifacts;
};

/// purity.csv, purity_by_node.csv and trace.csv.
CommandOutput cmd_walk_stats(const ExperimentConfig& cfg, const CommandOptions& options);

/// <variant>/{embeddings.txt, model.json, train_report.jsonl} for every variant.
/// On a numeric abort the partial report and last finite parameters are still
/// written, then NumericError is rethrown.
CommandOutput cmd_train(const ExperimentConfig& cfg, const CommandOptions& options);

/// Scores the artifacts written by cmd_train: metrics.json and roc_<variant>.csv.
/// A missing artifact is a ValidationError.
CommandOutput cmd_eval(const ExperimentConfig& cfg, const CommandOptions& options);

/// sweep.csv (one row per grid point and seed) and sweep_summary.csv.
CommandOutput cmd_sweep(const ExperimentConfig& cfg, const CommandOptions& options);

/// Lowercase hex SHA-256.
std::string sha256_hex(const std::string& data);

/// Full command line: parses arguments, runs the command and maps errors to
/// exit codes (0 ok, 2 config or input, 3 IO, 4 numeric abort).
int run_cli(int argc, char** argv);

}  // namespace imverde
