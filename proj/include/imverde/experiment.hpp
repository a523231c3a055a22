#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "imverde/config.hpp"
#include "imverde/graph.hpp"
#include "imverde/metrics.hpp"
#include "imverde/train.hpp"
#include "imverde/walk.hpp"

namespace imverde {

struct Dataset {
  std::string name;
  AttributedGraph graph;
  LabeledSplit split;
};

/// Builds the graph described by `spec`; relative paths resolve against base_dir.
/// The second value is the split shipped with planetoid data (empty otherwise).
std::pair<AttributedGraph, LabeledSplit> load_graph(const DatasetSpec& spec,
                                                    const std::filesystem::path& base_dir,
                                                    std::uint64_t seed);

/// Graph plus split for the config. Random splits draw from `seed`; a split
/// with n_test = 0 puts every remaining node in the test set.
Dataset load_dataset(const ExperimentConfig& cfg, std::uint64_t seed);

/// "<walker>-imverde" trains the two-phase model with label jumps and
/// balanced batches and scores with its classifier head. "<walker>-baseline"
/// trains unsupervised embeddings only (r = 0, uniform batches, T2 = 0) and
/// scores with logistic regression on the embeddings.
struct VariantSpec {
  std::string name;
  std::string walker;  // rw | vrrw | vdrw
  bool imverde = true;

  static VariantSpec parse(const std::string& name);
};

TrainResult train_variant(const Dataset& data, const VariantSpec& variant, const ExperimentConfig& cfg,
                          std::uint64_t seed, std::size_t threads);

ScoredExamples score_variant(const Dataset& data, const VariantSpec& variant, const ModelParams& params,
                             const ExperimentConfig& cfg);

struct VariantRun {
  VariantSpec variant;
  TrainResult trained;
  ScoredExamples scored;
  MetricSummary metrics;
};

/// train_variant then score_variant. Throws NumericError if training aborted.
VariantRun run_variant(const Dataset& data, const VariantSpec& variant, const ExperimentConfig& cfg,
                       std::uint64_t seed, std::size_t threads);

// ---- walk case study ---------------------------------------------------------

struct PurityRow {
  std::string walker;
  ClassId cls;
  double mean_purity;
};

struct NodePurity {
  std::string walker;
  NodeId node;
  ClassId cls;
  double mean_purity;
};

struct PurityStudy {
  std::vector<PurityRow> by_class;  // walkers x classes
  std::vector<NodePurity> by_node;
};

/// For each walker: `repeats` rounds, each a walk of length T from every node
/// in id order. Visit counts persist across all walks of one walker, so the
/// diminishing applies to the whole extraction run. Each walker uses its own
/// rng stream named after it, so results for one walker do not depend on the
/// others (or on alpha for the constant walker).
PurityStudy purity_study(const AttributedGraph& graph, const std::vector<VisitingFunction>& walkers,
                         std::size_t walk_length, std::size_t repeats, std::uint64_t seed);

// ---- sweeps ------------------------------------------------------------------

struct SweepRow {
  double ratio;  // n_min / n_maj of the split used
  double alpha;
  double r;
  std::string variant;
  std::uint64_t seed;
  double auc;
  double ap;
  double accuracy;
};

/// Seeds used by sweeps: cfg.seed, cfg.seed + 1, ...
std::vector<std::uint64_t> sweep_seeds(const ExperimentConfig& cfg);

/// For each ratio rebuilds the split with n_min = max(1, round(ratio * n_maj)).
std::vector<SweepRow> imbalance_sweep(const ExperimentConfig& cfg, const std::vector<double>& ratios,
                                      const std::vector<std::uint64_t>& seeds, std::size_t threads);

/// Grid over (alpha, r) on the configured split.
std::vector<SweepRow> parameter_sweep(const ExperimentConfig& cfg, const std::vector<double>& alphas,
                                      const std::vector<double>& rs,
                                      const std::vector<std::uint64_t>& seeds, std::size_t threads);

struct SweepSummaryRow {
  double ratio;
  double alpha;
  double r;
  std::string variant;
  std::size_t runs;
  double mean_auc;
  double mean_ap;
  double mean_accuracy;
};

/// Means over seeds, keyed by (ratio, alpha, r, variant) in first-seen order.
std::vector<SweepSummaryRow> summarize_sweep(const std::vector<SweepRow>& rows);

}  // namespace imverde
