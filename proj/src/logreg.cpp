#include <cmath>
#include <set>

#include "imverde/error.hpp"
#include "imverde/metrics.hpp"

namespace imverde {
namespace {

struct Objective {
  const Matrix& x;  // standardized, rows = examples
  const Matrix& y;  // one-hot
  double l2;

  // Mean cross-entropy + l2/2 ||W||^2; fills gradients when asked.
  double eval(const Matrix& w, const Vector& b, Matrix* gw, Vector* gb) const {
    Matrix logits = x * w.transpose();
    logits.rowwise() += b.transpose();
    const double inv = 1.0 / static_cast<double>(x.rows());
    double loss = 0.0;
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
      const double m = logits.row(i).maxCoeff();
      auto ex = (logits.row(i).array() - m).exp();
      const double z = ex.sum();
      loss += (m + std::log(z) - (logits.row(i).array() * y.row(i).array()).sum()) * inv;
      if (gw) logits.row(i) = (ex / z).matrix() - y.row(i);
    }
    loss += 0.5 * l2 * w.squaredNorm();
    if (gw) {
      *gw = inv * (logits.transpose() * x) + l2 * w;
      *gb = inv * logits.colwise().sum().transpose();
    }
    return loss;
  }
};

}  // namespace

LogisticRegression LogisticRegression::fit(const Matrix& x, std::span<const ClassId> y,
                                           std::size_t num_classes, const LogregOptions& options) {
  if (x.rows() == 0 || static_cast<std::size_t>(x.rows()) != y.size()) {
    throw ValidationError("logistic regression needs one label per non-empty row");
  }
  std::set<ClassId> seen;
  for (ClassId c : y) {
    if (c < 0 || static_cast<std::size_t>(c) >= num_classes) throw ValidationError("class label out of range");
    seen.insert(c);
  }
  if (seen.size() < 2) throw DegenerateError("logistic regression needs at least two classes in training");

  LogisticRegression model;
  const Eigen::Index d = x.cols();
  const auto k = static_cast<Eigen::Index>(num_classes);
  model.mean_ = x.colwise().mean().transpose();
  model.scale_ = ((x.rowwise() - model.mean_.transpose()).array().square().colwise().mean()).sqrt().transpose();
  for (Eigen::Index j = 0; j < d; ++j) {
    if (!(model.scale_[j] > 1e-12)) model.scale_[j] = 1.0;
  }
  const Matrix xs = ((x.rowwise() - model.mean_.transpose()).array().rowwise() / model.scale_.transpose().array()).matrix();
  Matrix onehot = Matrix::Zero(x.rows(), k);
  for (Eigen::Index i = 0; i < x.rows(); ++i) onehot(i, y[static_cast<std::size_t>(i)]) = 1.0;

  const Objective obj{xs, onehot, options.l2};
  model.weight_ = Matrix::Zero(k, d);
  model.bias_ = Vector::Zero(k);
  Matrix gw;
  Vector gb;
  double loss = obj.eval(model.weight_, model.bias_, &gw, &gb);
  model.losses_.push_back(loss);
  double step = 1.0;
  for (std::size_t it = 0; it < options.max_iters; ++it) {
    const double gmax = std::max(gw.cwiseAbs().maxCoeff(), gb.cwiseAbs().maxCoeff());
    if (gmax < options.tolerance) break;
    const double gnorm2 = gw.squaredNorm() + gb.squaredNorm();
    step = std::min(step * 2.0, 1e3);
    Matrix w_new;
    Vector b_new;
    double loss_new = loss;
    bool accepted = false;
    for (int tries = 0; tries < 60; ++tries) {
      w_new = model.weight_ - step * gw;
      b_new = model.bias_ - step * gb;
      loss_new = obj.eval(w_new, b_new, nullptr, nullptr);
      if (loss_new <= loss - 1e-4 * step * gnorm2) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no representable descent step left
    model.weight_ = std::move(w_new);
    model.bias_ = std::move(b_new);
    loss = obj.eval(model.weight_, model.bias_, &gw, &gb);
    if (!std::isfinite(loss)) throw NumericError("logistic regression diverged");
    model.losses_.push_back(loss);
  }
  return model;
}

Matrix LogisticRegression::predict_proba(const Matrix& x) const {
  if (x.cols() != weight_.cols()) throw ValidationError("feature width does not match the fitted model");
  const Matrix xs = ((x.rowwise() - mean_.transpose()).array().rowwise() / scale_.transpose().array()).matrix();
  Matrix logits = xs * weight_.transpose();
  logits.rowwise() += bias_.transpose();
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    logits.row(i).array() -= logits.row(i).maxCoeff();
    logits.row(i) = logits.row(i).array().exp().matrix();
    logits.row(i) /= logits.row(i).sum();
  }
  return logits;
}

ScoredExamples logreg_eval(const Matrix& embeddings, const AttributedGraph& graph,
                           const LabeledSplit& split, const LogregOptions& options) {
  split.validate(graph);
  if (static_cast<std::size_t>(embeddings.rows()) != graph.num_nodes()) {
    throw ValidationError("embeddings do not cover every node");
  }
  if (split.minority_class == kNoLabel) throw ValidationError("split has no minority class");
  Matrix xtrain(split.labeled_train.size(), embeddings.cols());
  std::vector<ClassId> ytrain;
  for (std::size_t i = 0; i < split.labeled_train.size(); ++i) {
    xtrain.row(static_cast<Eigen::Index>(i)) = embeddings.row(split.labeled_train[i]);
    ytrain.push_back(graph.label(split.labeled_train[i]));
  }
  const auto model = LogisticRegression::fit(xtrain, ytrain, static_cast<std::size_t>(graph.num_classes()), options);
  Matrix xtest(split.test.size(), embeddings.cols());
  for (std::size_t i = 0; i < split.test.size(); ++i) xtest.row(static_cast<Eigen::Index>(i)) = embeddings.row(split.test[i]);
  const Matrix proba = model.predict_proba(xtest);
  ScoredExamples out;
  for (std::size_t i = 0; i < split.test.size(); ++i) {
    const NodeId v = split.test[i];
    Eigen::Index best = 0;
    proba.row(static_cast<Eigen::Index>(i)).maxCoeff(&best);
    out.nodes.push_back(v);
    out.scores.push_back(proba(static_cast<Eigen::Index>(i), split.minority_class));
    out.truth.push_back(graph.label(v));
    out.is_minority.push_back(graph.label(v) == split.minority_class ? 1 : 0);
    out.predicted.push_back(static_cast<ClassId>(best));
  }
  return out;
}

}  // namespace imverde
