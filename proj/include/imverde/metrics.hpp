#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "imverde/graph.hpp"
#include "imverde/model.hpp"

namespace imverde {

struct RocPoint {
  double fpr;
  double tpr;
  double threshold;  // +inf for the (0, 0) corner
};

struct RocResult {
  std::vector<RocPoint> curve;
  double auc;
};

/// Staircase ROC over all distinct thresholds, and AUC as the Mann-Whitney
/// statistic P(s+ > s-) + P(s+ == s-)/2. Labels are 0/1.
/// Throws DegenerateError unless both classes are present.
RocResult roc_auc(std::span<const double> scores, std::span<const int> labels);

/// Rank-based AP: mean over positives of precision at the positive's rank.
/// Ranking is score-descending; ties keep input order (stable sort).
/// Throws DegenerateError with no positives.
double average_precision(std::span<const double> scores, std::span<const int> labels);

/// Fraction of predicted == truth. Throws ValidationError on empty input.
double multiclass_accuracy(std::span<const ClassId> predicted, std::span<const ClassId> truth);

// ---- logistic regression ---------------------------------------------------

struct LogregOptions {
  double l2 = 1e-4;            // on weights only; the bias is unregularized
  double tolerance = 1e-6;     // stop when max |gradient| falls below
  std::size_t max_iters = 10000;
};

/// Multinomial logistic regression fitted by full-batch gradient descent with
/// Armijo backtracking, so the recorded loss never increases. Inputs are
/// standardized with the training mean and deviation.
class LogisticRegression {
 public:
  static LogisticRegression fit(const Matrix& x, std::span<const ClassId> y, std::size_t num_classes,
                                const LogregOptions& options = {});

  /// Row-wise class probabilities.
  Matrix predict_proba(const Matrix& x) const;
  std::span<const double> loss_history() const { return losses_; }
  std::size_t iterations() const { return losses_.empty() ? 0 : losses_.size() - 1; }

 private:
  Matrix weight_;  // C x d
  Vector bias_;
  Vector mean_, scale_;
  std::vector<double> losses_;
};

/// Test-set predictions of one classifier.
struct ScoredExamples {
  std::vector<NodeId> nodes;
  std::vector<double> scores;       // minority-class probability
  std::vector<int> is_minority;     // 0/1 truth
  std::vector<ClassId> predicted;   // argmax class
  std::vector<ClassId> truth;
};

/// Fits logistic regression on the labeled_train rows of `embeddings` and
/// scores the test nodes. Throws DegenerateError if only one class is labeled.
ScoredExamples logreg_eval(const Matrix& embeddings, const AttributedGraph& graph,
                           const LabeledSplit& split, const LogregOptions& options = {});

/// Scores the test nodes with the trained two-head classifier.
ScoredExamples model_eval(const ModelParams& params, const AttributedGraph& graph,
                          const LabeledSplit& split);

struct MetricSummary {
  double auc;
  double ap;
  double accuracy;
  RocResult roc;
};

MetricSummary summarize(const ScoredExamples& scored);

}  // namespace imverde
