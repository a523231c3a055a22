#include "imverde/model.hpp"

#include <cmath>
#include <string>

#include "imverde/error.hpp"
#include "imverde/rng.hpp"

namespace imverde {

void Hyper::validate() const {
  if (dim < 1) throw ValidationError("model.d must be >= 1");
  if (negatives < 1) throw ValidationError("model.k must be >= 1");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ValidationError("model.lambda must be >= 0");
  if (!(lr_unsup >= 0.0) || !std::isfinite(lr_unsup)) throw ValidationError("model.lr_unsup must be >= 0");
  if (!(lr_sup >= 0.0) || !std::isfinite(lr_sup)) throw ValidationError("model.lr_sup must be >= 0");
  if (batch_size < 1) throw ValidationError("model.batch_size must be >= 1");
  for (auto h : hidden_x) if (h < 1) throw ValidationError("hidden sizes must be >= 1");
  for (auto h : hidden_e) if (h < 1) throw ValidationError("hidden sizes must be >= 1");
  if (!(neg_exponent >= 0.0)) throw ValidationError("model.neg_exponent must be >= 0");
  if (rounds < 1) throw ValidationError("model.rounds must be >= 1");
}

// ---- ParamBlocks -----------------------------------------------------------

namespace {

template <typename F>
void for_each_block(ParamBlocks& p, F&& fn) {
  fn(p.E.data(), p.E.size());
  fn(p.W.data(), p.W.size());
  for (auto* head : {&p.ffn_x, &p.ffn_e}) {
    for (auto& layer : *head) {
      fn(layer.weight.data(), layer.weight.size());
      fn(layer.bias.data(), layer.bias.size());
    }
  }
  fn(p.out.weight.data(), p.out.weight.size());
  fn(p.out.bias.data(), p.out.bias.size());
}

}  // namespace

std::size_t ParamBlocks::num_parameters() const {
  std::size_t total = 0;
  for_each_block(const_cast<ParamBlocks&>(*this), [&](double*, Eigen::Index size) {
    total += static_cast<std::size_t>(size);
  });
  return total;
}

Vector ParamBlocks::pack() const {
  Vector flat(static_cast<Eigen::Index>(num_parameters()));
  Eigen::Index at = 0;
  for_each_block(const_cast<ParamBlocks&>(*this), [&](double* data, Eigen::Index size) {
    flat.segment(at, size) = Eigen::Map<const Vector>(data, size);
    at += size;
  });
  return flat;
}

void ParamBlocks::unpack(const Vector& flat) {
  if (static_cast<std::size_t>(flat.size()) != num_parameters()) {
    throw ValidationError("flat parameter vector has the wrong length");
  }
  Eigen::Index at = 0;
  for_each_block(*this, [&](double* data, Eigen::Index size) {
    Eigen::Map<Vector>(data, size) = flat.segment(at, size);
    at += size;
  });
}

bool ParamBlocks::all_finite() const {
  bool ok = true;
  for_each_block(const_cast<ParamBlocks&>(*this), [&](double* data, Eigen::Index size) {
    if (ok) ok = Eigen::Map<const Vector>(data, size).allFinite();
  });
  return ok;
}

ParamBlocks ParamBlocks::zeros_like() const {
  ParamBlocks z = *this;
  for_each_block(z, [](double* data, Eigen::Index size) { Eigen::Map<Vector>(data, size).setZero(); });
  return z;
}

// ---- init ------------------------------------------------------------------

namespace {

void fill_uniform(Matrix& m, double bound, Rng& rng) {
  std::uniform_real_distribution<double> u(-bound, bound);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
}

std::vector<DenseLayer> make_head(std::size_t in, const std::vector<std::size_t>& hidden, Rng& rng) {
  std::vector<DenseLayer> head;
  for (std::size_t h : hidden) {
    DenseLayer layer{Matrix(h, in), Vector::Zero(static_cast<Eigen::Index>(h))};
    fill_uniform(layer.weight, 1.0 / std::sqrt(static_cast<double>(in)), rng);
    head.push_back(std::move(layer));
    in = h;
  }
  return head;
}

std::size_t head_out(std::size_t in, const std::vector<std::size_t>& hidden) {
  return hidden.empty() ? in : hidden.back();
}

}  // namespace

ModelParams init_params(std::size_t n, std::size_t feature_dim, std::size_t num_classes,
                        const Hyper& hyper, std::uint64_t seed) {
  hyper.validate();
  if (n < 1 || feature_dim < 1 || num_classes < 1) throw ValidationError("model dimensions must be >= 1");
  Rng rng = make_rng(seed, "init");
  ModelParams p;
  p.hyper = hyper;
  p.feature_dim = feature_dim;
  p.num_classes = num_classes;
  const std::size_t d = hyper.dim;
  p.E.resize(n, d);
  p.W.resize(n, d);
  fill_uniform(p.E, 0.5 / static_cast<double>(d), rng);
  fill_uniform(p.W, 0.5 / static_cast<double>(d), rng);
  p.ffn_x = make_head(feature_dim, hyper.hidden_x, rng);
  p.ffn_e = make_head(d, hyper.hidden_e, rng);
  const std::size_t concat = head_out(feature_dim, hyper.hidden_x) + head_out(d, hyper.hidden_e);
  p.out.weight.resize(num_classes, concat);
  fill_uniform(p.out.weight, 1.0 / std::sqrt(static_cast<double>(concat)), rng);
  p.out.bias = Vector::Zero(static_cast<Eigen::Index>(num_classes));
  return p;
}

// ---- features --------------------------------------------------------------

FeatureTable::FeatureTable(std::size_t dim, std::vector<std::vector<FeatureEntry>> rows) : dim_(dim) {
  for (auto& row : rows) {
    for (const auto& e : row) {
      if (e.index >= dim) throw ValidationError("feature index out of range");
      entries_.push_back(e);
    }
    offsets_.push_back(entries_.size());
  }
}

FeatureTable FeatureTable::one_hot(std::size_t n) {
  FeatureTable t;
  t.dim_ = n;
  for (std::size_t v = 0; v < n; ++v) {
    t.entries_.push_back({static_cast<std::uint32_t>(v), 1.0});
    t.offsets_.push_back(t.entries_.size());
  }
  return t;
}

FeatureTable FeatureTable::from_graph(const AttributedGraph& graph) {
  if (!graph.has_features()) return one_hot(graph.num_nodes());
  FeatureTable t;
  t.dim_ = graph.feature_dim();
  for (NodeId v = 0; v < graph.num_nodes(); ++v) {
    for (const auto& e : graph.features(v)) t.entries_.push_back(e);
    t.offsets_.push_back(t.entries_.size());
  }
  return t;
}

// ---- unsupervised ----------------------------------------------------------

double log_sigmoid(double z) {
  // log s(z) = -softplus(-z)
  return z >= 0.0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

void check_pairs(const ModelParams& params, std::span<const NodeContextPair> pairs,
                 std::span<const std::vector<NodeId>> negatives) {
  if (pairs.size() != negatives.size()) throw ValidationError("one negative list per pair is required");
  const std::size_t n = params.num_nodes();
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    if (pairs[p].center >= n || pairs[p].context >= n) throw ValidationError("pair node out of range");
    for (NodeId v : negatives[p]) {
      if (v >= n) throw ValidationError("negative node out of range");
    }
  }
}

}  // namespace

double unsup_loss(const ModelParams& params, std::span<const NodeContextPair> pairs,
                  std::span<const std::vector<NodeId>> negatives) {
  check_pairs(params, pairs, negatives);
  double loss = 0.0;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto e = params.E.row(pairs[p].center);
    loss -= log_sigmoid(params.W.row(pairs[p].context).dot(e));
    for (NodeId v : negatives[p]) loss -= log_sigmoid(-params.W.row(v).dot(e));
  }
  return loss;
}

ParamBlocks unsup_gradient(const ModelParams& params, std::span<const NodeContextPair> pairs,
                           std::span<const std::vector<NodeId>> negatives) {
  check_pairs(params, pairs, negatives);
  ParamBlocks g = params.zeros_like();
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const NodeId i = pairs[p].center;
    const auto e = params.E.row(i);
    const auto wc = params.W.row(pairs[p].context);
    const double gpos = sigmoid(wc.dot(e)) - 1.0;
    g.E.row(i) += gpos * wc;
    g.W.row(pairs[p].context) += gpos * e;
    for (NodeId v : negatives[p]) {
      const auto wn = params.W.row(v);
      const double gneg = sigmoid(wn.dot(e));
      g.E.row(i) += gneg * wn;
      g.W.row(v) += gneg * e;
    }
  }
  return g;
}

double unsup_grad_step(ModelParams& params, std::span<const NodeContextPair> pairs,
                       std::span<const std::vector<NodeId>> negatives, double lr, double lambda) {
  check_pairs(params, pairs, negatives);
  const double scale = lr * lambda;
  const auto d = static_cast<Eigen::Index>(params.dim());
  Eigen::RowVectorXd grad_e(d);
  std::vector<double> coeff;
  double total = 0.0;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const NodeId i = pairs[p].center;
    const auto& negs = negatives[p];
    // Coefficients come from the pre-update rows so the step is an exact
    // gradient step on this pair's loss, even with repeated negatives.
    coeff.resize(negs.size() + 1);
    const double zc = params.W.row(pairs[p].context).dot(params.E.row(i));
    double loss = -log_sigmoid(zc);
    coeff[0] = sigmoid(zc) - 1.0;
    for (std::size_t k = 0; k < negs.size(); ++k) {
      const double zn = params.W.row(negs[k]).dot(params.E.row(i));
      loss -= log_sigmoid(-zn);
      coeff[k + 1] = sigmoid(zn);
    }
    if (!std::isfinite(loss)) {
      throw NumericError("non-finite unsupervised loss at pair " + std::to_string(p));
    }
    total += loss;
    if (scale == 0.0) continue;
    grad_e = coeff[0] * params.W.row(pairs[p].context);
    for (std::size_t k = 0; k < negs.size(); ++k) grad_e += coeff[k + 1] * params.W.row(negs[k]);
    const Eigen::RowVectorXd e_old = params.E.row(i);
    params.W.row(pairs[p].context) -= (scale * coeff[0]) * e_old;
    for (std::size_t k = 0; k < negs.size(); ++k) params.W.row(negs[k]) -= (scale * coeff[k + 1]) * e_old;
    params.E.row(i) -= scale * grad_e;
    if (!params.E.row(i).allFinite()) {
      throw NumericError("non-finite embedding after pair " + std::to_string(p));
    }
  }
  return total;
}

// ---- supervised ------------------------------------------------------------

namespace {

struct HeadTrace {
  std::vector<Vector> acts;  // post-ReLU output of each layer
};

Vector relu(Vector z) { return z.cwiseMax(0.0); }

// x-head: the first layer reads the sparse feature row directly.
Vector forward_x(const ModelParams& p, std::span<const FeatureEntry> x, HeadTrace& trace) {
  trace.acts.clear();
  if (p.ffn_x.empty()) {
    Vector dense = Vector::Zero(static_cast<Eigen::Index>(p.feature_dim));
    for (const auto& f : x) dense[f.index] += f.value;
    return dense;
  }
  Vector z = p.ffn_x[0].bias;
  for (const auto& f : x) z += f.value * p.ffn_x[0].weight.col(f.index);
  trace.acts.push_back(relu(std::move(z)));
  for (std::size_t l = 1; l < p.ffn_x.size(); ++l) {
    trace.acts.push_back(relu(p.ffn_x[l].weight * trace.acts.back() + p.ffn_x[l].bias));
  }
  return trace.acts.back();
}

Vector forward_e(const ModelParams& p, const Vector& e, HeadTrace& trace) {
  trace.acts.clear();
  Vector a = e;
  for (const auto& layer : p.ffn_e) {
    a = relu(layer.weight * a + layer.bias);
    trace.acts.push_back(a);
  }
  return a;
}

struct Forward {
  HeadTrace tx, te;
  Vector hidden;  // concat(h_x, h_e)
  Vector logits;
  Vector probs;
  Eigen::Index split = 0;
};

Vector softmax(const Vector& logits) {
  Vector p = (logits.array() - logits.maxCoeff()).exp();
  return p / p.sum();
}

double cross_entropy(const Vector& logits, ClassId label) {
  const double m = logits.maxCoeff();
  return m + std::log((logits.array() - m).exp().sum()) - logits[label];
}

Forward forward(const ModelParams& p, const FeatureTable& features, NodeId v) {
  Forward f;
  const Vector hx = forward_x(p, features.row(v), f.tx);
  const Vector he = forward_e(p, p.E.row(v).transpose(), f.te);
  f.split = hx.size();
  f.hidden.resize(hx.size() + he.size());
  f.hidden << hx, he;
  f.logits = p.out.weight * f.hidden + p.out.bias;
  f.probs = softmax(f.logits);
  return f;
}

void check_batch(const ModelParams& params, const FeatureTable& features,
                 std::span<const LabeledExample> batch) {
  if (batch.empty()) throw ValidationError("supervised batch is empty");
  if (features.dim() != params.feature_dim || features.num_nodes() != params.num_nodes()) {
    throw ValidationError("feature table does not match the model");
  }
  for (const auto& ex : batch) {
    if (ex.node >= params.num_nodes()) throw ValidationError("batch node out of range");
    if (ex.label < 0 || static_cast<std::size_t>(ex.label) >= params.num_classes) {
      throw ValidationError("batch label out of range");
    }
  }
}

// Backprop through one head given the gradient at its output. Returns the
// gradient at the head input when `need_input` (dense heads only).
Vector backward_head(const std::vector<DenseLayer>& layers, std::vector<DenseLayer>& grads,
                     const HeadTrace& trace, Vector g, const Vector* dense_input,
                     std::span<const FeatureEntry> sparse_input, bool need_input) {
  for (std::size_t l = layers.size(); l-- > 0;) {
    const Vector gz = (trace.acts[l].array() > 0.0).select(g, 0.0);
    grads[l].bias += gz;
    if (l > 0) {
      grads[l].weight.noalias() += gz * trace.acts[l - 1].transpose();
    } else if (dense_input) {
      grads[l].weight.noalias() += gz * dense_input->transpose();
    } else {
      for (const auto& f : sparse_input) grads[l].weight.col(f.index) += f.value * gz;
    }
    if (l > 0 || need_input) g = layers[l].weight.transpose() * gz;
  }
  return g;
}

}  // namespace

double sup_loss(const ModelParams& params, const FeatureTable& features,
                std::span<const LabeledExample> batch) {
  check_batch(params, features, batch);
  double loss = 0.0;
  for (const auto& ex : batch) {
    loss += cross_entropy(forward(params, features, ex.node).logits, ex.label);
  }
  return loss / static_cast<double>(batch.size());
}

namespace {

double accumulate_sup(const ModelParams& params, const FeatureTable& features,
                      std::span<const LabeledExample> batch, ParamBlocks& g) {
  const double inv = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  for (const auto& ex : batch) {
    const Forward f = forward(params, features, ex.node);
    loss += cross_entropy(f.logits, ex.label);
    Vector gl = f.probs * inv;
    gl[ex.label] -= inv;
    g.out.bias += gl;
    g.out.weight.noalias() += gl * f.hidden.transpose();
    const Vector gh = params.out.weight.transpose() * gl;
    const Vector e = params.E.row(ex.node).transpose();
    backward_head(params.ffn_x, g.ffn_x, f.tx, gh.head(f.split), nullptr, features.row(ex.node), false);
    const Vector ge = backward_head(params.ffn_e, g.ffn_e, f.te, gh.tail(gh.size() - f.split), &e, {}, true);
    g.E.row(ex.node) += ge.transpose();
  }
  return loss * inv;
}

}  // namespace

ParamBlocks sup_gradient(const ModelParams& params, const FeatureTable& features,
                         std::span<const LabeledExample> batch) {
  check_batch(params, features, batch);
  ParamBlocks g = params.zeros_like();
  accumulate_sup(params, features, batch, g);
  return g;
}

double sup_grad_step(ModelParams& params, const FeatureTable& features,
                     std::span<const LabeledExample> batch, double lr) {
  check_batch(params, features, batch);
  ParamBlocks g = params.zeros_like();
  const double loss = accumulate_sup(params, features, batch, g);
  if (!std::isfinite(loss) || !g.all_finite()) throw NumericError("non-finite supervised gradient");
  if (lr == 0.0) return loss;
  for (std::size_t l = 0; l < params.ffn_x.size(); ++l) {
    params.ffn_x[l].weight -= lr * g.ffn_x[l].weight;
    params.ffn_x[l].bias -= lr * g.ffn_x[l].bias;
  }
  for (std::size_t l = 0; l < params.ffn_e.size(); ++l) {
    params.ffn_e[l].weight -= lr * g.ffn_e[l].weight;
    params.ffn_e[l].bias -= lr * g.ffn_e[l].bias;
  }
  params.out.weight -= lr * g.out.weight;
  params.out.bias -= lr * g.out.bias;
  // Only rows of batch nodes carry gradient; a node repeated in the batch is updated once.
  std::vector<char> done(params.num_nodes(), 0);
  for (const auto& ex : batch) {
    if (done[ex.node]) continue;
    done[ex.node] = 1;
    params.E.row(ex.node) -= lr * g.E.row(ex.node);
  }
  return loss;
}

Vector predict(const ModelParams& params, const FeatureTable& features, NodeId node) {
  if (node >= params.num_nodes()) throw ValidationError("node out of range");
  return forward(params, features, node).probs;
}

}  // namespace imverde
