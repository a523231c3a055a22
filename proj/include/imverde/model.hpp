#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "imverde/graph.hpp"
#include "imverde/sampling.hpp"

namespace imverde {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// y = weight * x + bias; weight is out x in.
struct DenseLayer {
  Matrix weight;
  Vector bias;

  std::size_t in_dim() const { return static_cast<std::size_t>(weight.cols()); }
  std::size_t out_dim() const { return static_cast<std::size_t>(weight.rows()); }
};

/// Training hyperparameters. Defaults: T=10, k=10, d=50 walk/model settings;
/// the rest (lambda, rates, T1, T2, B, hidden sizes) are our own choices.
struct Hyper {
  std::size_t dim = 50;                          // d
  std::size_t negatives = 10;                    // k
  double lambda = 1.0;                           // scales the unsupervised step
  double lr_unsup = 0.025;                       // eta_u
  double lr_sup = 0.025;                         // eta_s
  std::size_t iters_unsup = 2000;                // T1
  std::size_t iters_sup = 1000;                  // T2
  std::size_t batch_size = 256;                  // B
  std::vector<std::size_t> hidden_x{50};         // ffn_x hidden sizes (l1 = size)
  std::vector<std::size_t> hidden_e{50};         // ffn_e hidden sizes (l2 = size)
  double neg_exponent = 0.75;
  std::size_t rounds = 1;                        // > 1 alternates the two phases
  bool balanced_batches = true;                  // false: uniform start nodes

  void validate() const;
};

/// Every trainable block. Gradients share this shape.
struct ParamBlocks {
  Matrix E;  // n x d node embeddings
  Matrix W;  // n x d context / negative vectors
  std::vector<DenseLayer> ffn_x;
  std::vector<DenseLayer> ffn_e;
  DenseLayer out;  // C x (head_x_out + head_e_out)

  std::size_t num_parameters() const;
  /// Flattened in block order E, W, ffn_x, ffn_e, out (weights before biases).
  Vector pack() const;
  void unpack(const Vector& flat);
  bool all_finite() const;
  /// Same shapes, all zero.
  ParamBlocks zeros_like() const;
};

struct ModelParams : ParamBlocks {
  Hyper hyper;
  std::size_t feature_dim = 0;
  std::size_t num_classes = 0;

  std::size_t num_nodes() const { return static_cast<std::size_t>(E.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(E.cols()); }
};

/// E and W uniform in [-0.5/d, 0.5/d]; head weights uniform in
/// [-1/sqrt(fan_in), 1/sqrt(fan_in)]; biases zero. Uses the "init" stream of `seed`.
ModelParams init_params(std::size_t n, std::size_t feature_dim, std::size_t num_classes,
                        const Hyper& hyper, std::uint64_t seed);

/// Sparse node features. Graphs without features use one-hot node ids (F = n).
class FeatureTable {
 public:
  static FeatureTable from_graph(const AttributedGraph& graph);
  static FeatureTable one_hot(std::size_t n);
  FeatureTable(std::size_t dim, std::vector<std::vector<FeatureEntry>> rows);

  std::size_t dim() const { return dim_; }
  std::size_t num_nodes() const { return offsets_.size() - 1; }
  std::span<const FeatureEntry> row(NodeId v) const {
    return {entries_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }

 private:
  FeatureTable() = default;
  std::size_t dim_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<FeatureEntry> entries_;
};

struct LabeledExample {
  NodeId node;
  ClassId label;
};

/// log(sigmoid(z)) without overflow for large |z|.
double log_sigmoid(double z);
double sigmoid(double z);

// ---- unsupervised (skip-gram with negative sampling) ------------------------

/// Sum over pairs of -log s(w_c.e_i) - sum_n log s(-w_n.e_i); negatives[p] holds the
/// draws for pairs[p].
double unsup_loss(const ModelParams& params, std::span<const NodeContextPair> pairs,
                  std::span<const std::vector<NodeId>> negatives);

/// Dense gradient of unsup_loss (E and W blocks only; the rest stay zero).
ParamBlocks unsup_gradient(const ModelParams& params, std::span<const NodeContextPair> pairs,
                           std::span<const std::vector<NodeId>> negatives);

/// Sequential per-pair SGD: for each pair in order, every touched row moves by
/// -lr * lambda * (gradient of that pair's loss at the current params).
/// Returns the summed pre-update pair losses. Throws NumericError naming the
/// pair index if a non-finite value appears; rows already updated stay updated.
double unsup_grad_step(ModelParams& params, std::span<const NodeContextPair> pairs,
                       std::span<const std::vector<NodeId>> negatives, double lr, double lambda);

// ---- supervised (two feed-forward heads + softmax) --------------------------

/// Mean softmax cross-entropy of out([h_x(x_i), h_e(e_i)]) over the batch.
double sup_loss(const ModelParams& params, const FeatureTable& features,
                std::span<const LabeledExample> batch);

/// Gradient of sup_loss over every block (E rows of batch nodes only are non-zero).
ParamBlocks sup_gradient(const ModelParams& params, const FeatureTable& features,
                         std::span<const LabeledExample> batch);

/// One gradient step on sup_loss; returns the pre-step loss.
double sup_grad_step(ModelParams& params, const FeatureTable& features,
                     std::span<const LabeledExample> batch, double lr);

/// Class probabilities of one node.
Vector predict(const ModelParams& params, const FeatureTable& features, NodeId node);

}  // namespace imverde
