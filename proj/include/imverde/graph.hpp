#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "imverde/rng.hpp"

namespace imverde {

using NodeId = std::uint32_t;
using ClassId = std::int32_t;

inline constexpr ClassId kNoLabel = -1;

struct WeightedEdge {
  NodeId src;
  NodeId dst;
  double weight = 1.0;
};

struct FeatureEntry {
  std::uint32_t index;
  double value;
};

/// Weighted graph in CSR layout with optional sparse node features and partial labels.
///
/// Adjacency rows are sorted by neighbor id. For undirected graphs every edge is
/// stored in both orientations (a self-loop is stored once).
class AttributedGraph {
 public:
  AttributedGraph() = default;

  /// Builds the CSR structure. For undirected graphs each edge may be given in
  /// either orientation; repeated (src, dst) entries collapse by summing weights,
  /// and for undirected graphs (a, b) and (b, a) are the same entry.
  static AttributedGraph from_edges(std::size_t n, std::span<const WeightedEdge> edges,
                                    bool directed);

  std::size_t num_nodes() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  bool directed() const { return directed_; }

  /// Number of stored (directed) adjacency entries.
  std::size_t num_entries() const { return targets_.size(); }
  /// Number of edges: entries for directed graphs, unordered pairs otherwise.
  std::size_t num_edges() const;

  std::span<const NodeId> neighbors(NodeId v) const {
    return {targets_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  std::span<const double> weights(NodeId v) const {
    return {weights_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }

  /// Each undirected edge once (src <= dst), or every directed entry.
  std::vector<WeightedEdge> edges() const;

  // Labels.
  void set_labels(std::vector<ClassId> labels, int num_classes);
  std::span<const ClassId> labels() const { return labels_; }
  ClassId label(NodeId v) const { return labels_.empty() ? kNoLabel : labels_[v]; }
  bool labeled(NodeId v) const { return label(v) != kNoLabel; }
  int num_classes() const { return num_classes_; }
  std::vector<NodeId> nodes_of_class(ClassId c) const;

  // Features.
  void set_features(std::size_t dim, std::vector<std::vector<FeatureEntry>> rows);
  bool has_features() const { return feature_dim_ > 0; }
  std::size_t feature_dim() const { return feature_dim_; }
  std::span<const FeatureEntry> features(NodeId v) const {
    if (feature_offsets_.empty()) return {};
    return {feature_entries_.data() + feature_offsets_[v],
            feature_offsets_[v + 1] - feature_offsets_[v]};
  }

  /// Throws ValidationError when an invariant is broken.
  void validate() const;

 private:
  bool directed_ = false;
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> targets_;
  std::vector<double> weights_;

  std::vector<ClassId> labels_;
  int num_classes_ = 0;

  std::size_t feature_dim_ = 0;
  std::vector<std::size_t> feature_offsets_;
  std::vector<FeatureEntry> feature_entries_;
};

/// Row-stochastic base transition matrix R with the sparsity pattern of the graph.
class TransitionMatrix {
 public:
  using Row = std::vector<std::pair<NodeId, double>>;

  TransitionMatrix() = default;

  /// Validates that every row is non-empty, in range and sums to 1 within 1e-12.
  static TransitionMatrix from_rows(const std::vector<Row>& rows);

  std::size_t num_nodes() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::span<const NodeId> targets(NodeId i) const {
    return {targets_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  std::span<const double> probs(NodeId i) const {
    return {probs_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  /// R_ij, zero when j is not a target of i.
  double at(NodeId i, NodeId j) const;

 private:
  friend TransitionMatrix build_transition(const AttributedGraph& graph);

  std::vector<std::size_t> offsets_;
  std::vector<NodeId> targets_;
  std::vector<double> probs_;
};

/// R_ij = w_ij / sum_j w_ij. Isolated nodes get the self-loop row {(i, 1)}.
TransitionMatrix build_transition(const AttributedGraph& graph);

/// Partition of the nodes into labeled training, unlabeled training and test sets.
struct LabeledSplit {
  std::vector<NodeId> labeled_train;
  std::vector<NodeId> unlabeled_train;
  std::vector<NodeId> test;
  ClassId minority_class = kNoLabel;

  /// Nodes whose labels are hidden during training: unlabeled_train then test.
  std::vector<NodeId> unlabeled_pool() const;

  /// Labels restricted to labeled_train; kNoLabel everywhere else.
  std::vector<ClassId> visible_labels(const AttributedGraph& graph) const;

  void validate(const AttributedGraph& graph) const;
};

// ---- ingestion -------------------------------------------------------------

/// Reads "src dst [weight]" lines. Blank lines and lines starting with '#' are skipped.
AttributedGraph load_edge_list(const std::filesystem::path& path, bool directed, bool weighted);
AttributedGraph parse_edge_list(const std::string& text, bool directed, bool weighted,
                                const std::string& source = "<string>");

/// Writes each edge once as "src dst weight" with 17 significant digits.
void save_edge_list(const AttributedGraph& graph, const std::filesystem::path& path);
std::string format_edge_list(const AttributedGraph& graph);

/// Reads "node label" lines and attaches them to the graph; C = max label + 1.
void load_labels(AttributedGraph& graph, const std::filesystem::path& path);

/// {"n":..., "directed":..., "edges":[[i,j,w],...], "labels":[...]}
std::string graph_to_json(const AttributedGraph& graph);

struct PlanetoidDataset {
  AttributedGraph graph;
  LabeledSplit split;
};

/// Loads ind.<name>.{x,y,tx,ty,allx,ally,graph,test.index} from `dir`.
PlanetoidDataset load_planetoid_format(const std::filesystem::path& dir, const std::string& name);

// ---- fixtures and generators ---------------------------------------------

/// Nodes (0-based) of the 5-node minority class of the Karate fixture.
std::span<const NodeId> karate_minority_nodes();

/// Zachary's karate club, 34 nodes, 78 undirected edges, relabeled 5 (class 1) vs 29 (class 0).
AttributedGraph karate_fixture();

/// Deterministic split: n_min minority nodes plus n_maj nodes drawn from the
/// other classes (proportionally stratified), n_test test nodes from the rest.
LabeledSplit make_imbalanced_split(const AttributedGraph& graph, ClassId minority_class,
                                   std::size_t n_min, std::size_t n_maj, std::size_t n_test,
                                   std::uint64_t seed);

/// Undirected planted-partition graph with one-hot class-id features.
AttributedGraph planted_partition(std::span<const std::size_t> n_per_class, double p_in,
                                  double p_out, std::uint64_t seed);

}  // namespace imverde
