#include "imverde/metrics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "imverde/error.hpp"

namespace imverde {
namespace {

void check_binary(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw ValidationError("scores and labels differ in length");
  if (scores.empty()) throw ValidationError("no scored examples");
  for (int y : labels) {
    if (y != 0 && y != 1) throw ValidationError("binary labels must be 0 or 1");
  }
}

}  // namespace

RocResult roc_auc(std::span<const double> scores, std::span<const int> labels) {
  check_binary(scores, labels);
  const std::size_t m = scores.size();
  std::uint64_t pos = 0;
  for (int y : labels) pos += static_cast<std::uint64_t>(y);
  const std::uint64_t neg = m - pos;
  if (pos == 0 || neg == 0) throw DegenerateError("AUC needs at least one positive and one negative");

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocResult out;
  out.curve.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  // Twice the Mann-Whitney count, kept integral so the result is exact.
  std::uint64_t twice_u = 0;
  std::uint64_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < m;) {
    std::size_t j = i;
    std::uint64_t gp = 0, gn = 0;
    while (j < m && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] ? gp : gn) += 1;
      ++j;
    }
    // Positives in this tie group beat every negative ranked lower and tie with gn.
    twice_u += gp * (2 * (neg - fp - gn) + gn);
    tp += gp;
    fp += gn;
    out.curve.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                         static_cast<double>(tp) / static_cast<double>(pos), scores[order[i]]});
    i = j;
  }
  out.auc = static_cast<double>(twice_u) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
  return out;
}

double average_precision(std::span<const double> scores, std::span<const int> labels) {
  check_binary(scores, labels);
  const std::size_t m = scores.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double sum = 0.0;
  std::size_t tp = 0;
  for (std::size_t rank = 0; rank < m; ++rank) {
    if (labels[order[rank]]) {
      ++tp;
      sum += static_cast<double>(tp) / static_cast<double>(rank + 1);
    }
  }
  if (tp == 0) throw DegenerateError("average precision needs at least one positive");
  return sum / static_cast<double>(tp);
}

double multiclass_accuracy(std::span<const ClassId> predicted, std::span<const ClassId> truth) {
  if (predicted.size() != truth.size()) throw ValidationError("prediction and truth differ in length");
  if (predicted.empty()) throw ValidationError("accuracy of an empty set");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) hits += predicted[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

MetricSummary summarize(const ScoredExamples& s) {
  MetricSummary m;
  m.roc = roc_auc(s.scores, s.is_minority);
  m.auc = m.roc.auc;
  m.ap = average_precision(s.scores, s.is_minority);
  m.accuracy = multiclass_accuracy(s.predicted, s.truth);
  return m;
}

ScoredExamples model_eval(const ModelParams& params, const AttributedGraph& graph,
                          const LabeledSplit& split) {
  if (split.minority_class == kNoLabel) throw ValidationError("split has no minority class");
  const FeatureTable features = FeatureTable::from_graph(graph);
  ScoredExamples out;
  for (NodeId v : split.test) {
    const Vector p = predict(params, features, v);
    Eigen::Index best = 0;
    p.maxCoeff(&best);
    out.nodes.push_back(v);
    out.scores.push_back(p[split.minority_class]);
    out.truth.push_back(graph.label(v));
    out.is_minority.push_back(graph.label(v) == split.minority_class ? 1 : 0);
    out.predicted.push_back(static_cast<ClassId>(best));
  }
  return out;
}

}  // namespace imverde
