#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "imverde/graph.hpp"
#include "imverde/model.hpp"

namespace imverde {

struct DatasetSpec {
  std::string kind = "karate";  // karate | edge_list | planetoid | planted
  std::string name;             // display name; defaults to kind (or planetoid name)
  // edge_list
  std::filesystem::path path;
  std::filesystem::path labels;
  bool directed = false;
  bool weighted = false;
  // planetoid
  std::filesystem::path dir;
  // planted
  std::vector<std::size_t> sizes{20, 200};
  double p_in = 0.1;
  double p_out = 0.01;
  bool features = true;  // false drops the one-hot class features
};

struct SplitSpec {
  std::string kind = "random";  // random | given (planetoid only)
  ClassId minority_class = 1;
  std::size_t n_min = 20;
  std::size_t n_maj = 120;
  std::size_t n_test = 1000;
};

struct ContextSpec {
  double r = 0.2;
  std::size_t walk_length = 10;
  std::size_t window = 5;
};

struct WalkStatsSpec {
  std::vector<std::string> walkers{"rw", "vrrw", "vdrw"};
  std::size_t walk_length = 10;
  std::size_t repeats = 100;
  std::uint64_t trace_length = 2000;
  std::uint64_t trace_interval = 100;
  NodeId trace_start = 0;
  std::string trace_walker = "vdrw";
};

struct SweepSpec {
  std::string kind = "ratio";  // ratio | params
  std::vector<double> ratios;
  std::vector<double> alphas;
  std::vector<double> rs;
  std::size_t num_seeds = 3;
};

/// One experiment. Defaults: alpha 0.7, r 0.2, T 10, k 10, d 50.
struct ExperimentConfig {
  DatasetSpec dataset;
  SplitSpec split;
  double alpha = 0.7;
  ContextSpec context;
  Hyper model;
  std::vector<std::string> variants{"vdrw-imverde", "rw-baseline"};
  double logreg_l2 = 1e-4;
  WalkStatsSpec walk_stats;
  SweepSpec sweep;
  std::uint64_t seed = 42;
  std::size_t threads = 1;
  /// Relative dataset paths resolve against this (the config file's directory).
  std::filesystem::path base_dir;

  /// Checks every field; throws ValidationError naming the offending key.
  void validate() const;
  /// Canonical JSON of every field (used for the manifest hash).
  std::string to_json() const;
};

/// JSON with // and /* */ comments. Unknown keys are rejected.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<string>",
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace imverde
