#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "imverde/graph.hpp"
#include "imverde/model.hpp"
#include "imverde/sampling.hpp"

namespace imverde {

struct LossRecord {
  int phase;              // 1 unsupervised, 2 supervised
  std::size_t iteration;  // counted across rounds within a phase
  double loss;            // phase 1: mean per pair; phase 2: batch mean
};

struct TrainReport {
  std::vector<LossRecord> losses;
  std::uint64_t seed = 0;
  bool aborted = false;
  std::string abort_reason;
};

struct TrainResult {
  ModelParams params;
  TrainReport report;
};

struct TrainOptions {
  /// Worker threads for context-path generation; results do not depend on it.
  std::size_t threads = 1;
};

/// Two-phase training. Phase 1 runs T1 iterations of: start batch (balanced or
/// uniform) -> one label-jump context path per start node -> window pairs ->
/// k negatives per pair -> unsup_grad_step. Phase 2 runs T2 iterations of
/// sup_grad_step on class-balanced labeled batches. With hyper.rounds > 1 the
/// two phases alternate. Jumps only see labels of split.labeled_train.
///
/// Non-finite values stop training; the result then carries the parameters
/// of the last good state and report.aborted = true.
TrainResult train(const AttributedGraph& graph, const TransitionMatrix& r, const LabeledSplit& split,
                  const ContextConfig& cfg, const NegativeSampler& sampler, const Hyper& hyper,
                  std::uint64_t seed, const TrainOptions& options = {});

// ---- artifacts -------------------------------------------------------------

/// One line per node: "id v1 ... vd" with 17 significant digits.
std::string format_embeddings(const Matrix& embeddings);
void save_embeddings(const Matrix& embeddings, const std::filesystem::path& path);
Matrix parse_embeddings(const std::string& text, const std::string& source = "<string>");
Matrix load_embeddings(const std::filesystem::path& path);

/// JSON checkpoint {"format":"imverde-model","version":1, ...}; see docs/checkpoint.md.
std::string checkpoint_to_json(const ModelParams& params);
ModelParams checkpoint_from_json(const std::string& text, const std::string& source = "<string>");
void save_checkpoint(const ModelParams& params, const std::filesystem::path& path);
ModelParams load_checkpoint(const std::filesystem::path& path);

/// JSON lines {"phase":p,"iter":i,"loss":x}.
std::string format_report(const TrainReport& report);

/// Writes `text` to `path`, throwing IoError on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace imverde
