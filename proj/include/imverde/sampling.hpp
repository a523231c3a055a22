#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "imverde/graph.hpp"
#include "imverde/rng.hpp"
#include "imverde/walk.hpp"

namespace imverde {

/// Inputs of label-jump context sampling.
struct ContextConfig {
  double jump_prob = 0.2;       // r
  std::size_t walk_length = 10; // T
  std::size_t window = 5;       // w
  VisitingFunction visiting = VisitingFunction::exponential(0.7);

  void validate() const;
};

struct NodeContextPair {
  NodeId center;
  NodeId context;

  friend bool operator==(const NodeContextPair&, const NodeContextPair&) = default;
};

/// Per-class member lists used as jump targets.
class LabelIndex {
 public:
  LabelIndex() = default;
  explicit LabelIndex(std::span<const ClassId> labels);

  std::span<const ClassId> labels() const { return labels_; }
  std::span<const NodeId> members(ClassId c) const;

 private:
  std::vector<ClassId> labels_;
  std::vector<std::vector<NodeId>> members_;
};

/// Label-jump walk. From a labeled node, with probability r jump uniformly to
/// another node of the same class; otherwise take a reweighted step on R.
/// Jumps count as visits. Counts live in a fresh state unless `state` is given.
WalkPath sample_context_path(const TransitionMatrix& r, const LabelIndex& labels, NodeId start,
                             const ContextConfig& cfg, Rng& rng);
WalkPath sample_context_path(const TransitionMatrix& r, const LabelIndex& labels,
                             VisitState& state, NodeId start, const ContextConfig& cfg, Rng& rng);

/// All (path[i], path[j]) with 0 < |i - j| <= window and path[i] != path[j].
std::vector<NodeContextPair> extract_pairs(std::span<const NodeId> path, std::size_t window);

/// Negative-sampling distribution P_n(v) ∝ degree(v)^exponent (isolated nodes count as degree 1).
class NegativeSampler {
 public:
  NegativeSampler(std::vector<double> probabilities, std::size_t k);

  std::span<const double> probabilities() const { return probs_; }
  std::size_t k() const { return k_; }
  std::size_t num_nodes() const { return probs_.size(); }

  NodeId draw(Rng& rng) const { return static_cast<NodeId>(dist_(rng)); }

 private:
  std::vector<double> probs_;
  std::size_t k_;
  mutable std::discrete_distribution<std::size_t> dist_;
};

NegativeSampler build_negative_sampler(const AttributedGraph& graph, double exponent = 0.75,
                                       std::size_t k = 10);

/// k i.i.d. draws from P_n, redrawing any that equal `center`. Needs >= 2 nodes.
std::vector<NodeId> sample_negatives(const NegativeSampler& sampler, NodeId center, std::size_t k,
                                     Rng& rng);

/// Under-sampled start set: every labeled node of the smallest labeled class
/// (size m), m nodes drawn from each other labeled class, then unlabeled nodes
/// (unlabeled_train and test, whose labels are hidden) up to `batch_size`.
std::vector<NodeId> balanced_batch(const LabeledSplit& split, std::span<const ClassId> labels,
                                   std::size_t batch_size, Rng& rng);

/// The labeled part of balanced_batch only: m nodes per labeled class.
std::vector<NodeId> balanced_labeled_batch(const LabeledSplit& split,
                                           std::span<const ClassId> labels, Rng& rng);

/// min(batch_size, n) distinct nodes drawn uniformly.
std::vector<NodeId> uniform_batch(std::size_t num_nodes, std::size_t batch_size, Rng& rng);

/// Walk corpus: one path per line, space-separated ids.
std::string format_corpus(std::span<const WalkPath> paths);

}  // namespace imverde
