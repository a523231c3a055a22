#include "imverde/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "imverde/error.hpp"

namespace imverde {

void ContextConfig::validate() const {
  if (!(jump_prob >= 0.0 && jump_prob < 1.0)) throw ValidationError("jump_prob must be in [0, 1)");
  if (walk_length < 1) throw ValidationError("walk_length must be >= 1");
  if (window < 1) throw ValidationError("window must be >= 1");
}

LabelIndex::LabelIndex(std::span<const ClassId> labels) : labels_(labels.begin(), labels.end()) {
  for (NodeId v = 0; v < labels_.size(); ++v) {
    const ClassId c = labels_[v];
    if (c == kNoLabel) continue;
    if (static_cast<std::size_t>(c) >= members_.size()) members_.resize(static_cast<std::size_t>(c) + 1);
    members_[static_cast<std::size_t>(c)].push_back(v);
  }
}

std::span<const NodeId> LabelIndex::members(ClassId c) const {
  if (c < 0 || static_cast<std::size_t>(c) >= members_.size()) return {};
  return members_[static_cast<std::size_t>(c)];
}

WalkPath sample_context_path(const TransitionMatrix& r, const LabelIndex& labels, NodeId start,
                             const ContextConfig& cfg, Rng& rng) {
  VisitState state(r.num_nodes());
  return sample_context_path(r, labels, state, start, cfg, rng);
}

WalkPath sample_context_path(const TransitionMatrix& r, const LabelIndex& labels,
                             VisitState& state, NodeId start, const ContextConfig& cfg, Rng& rng) {
  if (start >= r.num_nodes()) throw ValidationError("start node out of range");
  const auto lab = labels.labels();
  WalkPath path;
  path.reserve(cfg.walk_length + 1);
  state.begin_at(start);
  path.push_back(start);
  NodeId current = start;
  for (std::size_t t = 0; t < cfg.walk_length; ++t) {
    std::optional<NodeId> next;
    const ClassId c = current < lab.size() ? lab[current] : kNoLabel;
    // No draw is consumed when r = 0, so the path then matches walk() exactly.
    if (c != kNoLabel && cfg.jump_prob > 0.0 && uniform01(rng) < cfg.jump_prob) {
      const auto members = labels.members(c);
      if (members.size() >= 2) {
        // Uniform over the other members: draw among size-1 slots and skip current.
        std::size_t pick = uniform_index(rng, members.size() - 1);
        if (members[pick] == current) pick = members.size() - 1;
        next = members[pick];
      }
    }
    if (!next) next = sample_step(r, state, cfg.visiting, rng);
    state.record_visit(*next);
    path.push_back(*next);
    current = *next;
  }
  return path;
}

std::vector<NodeContextPair> extract_pairs(std::span<const NodeId> path, std::size_t window) {
  std::vector<NodeContextPair> pairs;
  const std::size_t len = path.size();
  for (std::size_t i = 0; i < len; ++i) {
    const std::size_t lo = i >= window ? i - window : 0;
    const std::size_t hi = std::min(len - 1, i + window);
    for (std::size_t j = lo; j <= hi; ++j) {
      if (j != i && path[i] != path[j]) pairs.push_back({path[i], path[j]});
    }
  }
  return pairs;
}

// ---- negatives -------------------------------------------------------------

NegativeSampler::NegativeSampler(std::vector<double> probabilities, std::size_t k)
    : probs_(std::move(probabilities)), k_(k), dist_(probs_.begin(), probs_.end()) {
  if (k_ < 1) throw ValidationError("negatives per pair must be >= 1");
  if (probs_.empty()) throw ValidationError("negative sampler needs at least one node");
}

NegativeSampler build_negative_sampler(const AttributedGraph& graph, double exponent, std::size_t k) {
  if (!(exponent >= 0.0)) throw ValidationError("negative sampling exponent must be >= 0");
  std::vector<double> p(graph.num_nodes());
  double total = 0.0;
  for (NodeId v = 0; v < p.size(); ++v) {
    const double deg = static_cast<double>(std::max<std::size_t>(graph.degree(v), 1));
    p[v] = std::pow(deg, exponent);
    total += p[v];
  }
  for (double& x : p) x /= total;
  return NegativeSampler(std::move(p), k);
}

std::vector<NodeId> sample_negatives(const NegativeSampler& sampler, NodeId center, std::size_t k,
                                     Rng& rng) {
  if (k < 1) throw ValidationError("k must be >= 1");
  if (sampler.num_nodes() < 2) throw ValidationError("negative sampling needs at least two nodes");
  std::vector<NodeId> out;
  out.reserve(k);
  while (out.size() < k) {
    const NodeId v = sampler.draw(rng);
    if (v != center) out.push_back(v);
  }
  return out;
}

// ---- batches ---------------------------------------------------------------

namespace {

// Labeled nodes grouped by class, in class order.
std::vector<std::vector<NodeId>> labeled_by_class(const LabeledSplit& split,
                                                  std::span<const ClassId> labels) {
  std::map<ClassId, std::vector<NodeId>> groups;
  for (NodeId v : split.labeled_train) {
    if (v >= labels.size() || labels[v] == kNoLabel) {
      throw ValidationError("labeled_train node " + std::to_string(v) + " has no label");
    }
    groups[labels[v]].push_back(v);
  }
  std::vector<std::vector<NodeId>> out;
  for (auto& [c, nodes] : groups) out.push_back(std::move(nodes));
  return out;
}

void take_sample(std::vector<NodeId> pool, std::size_t count, Rng& rng, std::vector<NodeId>& out) {
  count = std::min(count, pool.size());
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + uniform_index(rng, pool.size() - i);
    std::swap(pool[i], pool[j]);
    out.push_back(pool[i]);
  }
}

}  // namespace

std::vector<NodeId> balanced_labeled_batch(const LabeledSplit& split,
                                           std::span<const ClassId> labels, Rng& rng) {
  const auto groups = labeled_by_class(split, labels);
  std::vector<NodeId> batch;
  if (groups.empty()) return batch;
  std::size_t m = groups.front().size();
  for (const auto& g : groups) m = std::min(m, g.size());
  for (const auto& g : groups) {
    if (g.size() == m) {
      batch.insert(batch.end(), g.begin(), g.end());
    } else {
      take_sample(g, m, rng, batch);
    }
  }
  return batch;
}

std::vector<NodeId> balanced_batch(const LabeledSplit& split, std::span<const ClassId> labels,
                                   std::size_t batch_size, Rng& rng) {
  const auto groups = labeled_by_class(split, labels);
  std::size_t m = groups.empty() ? 0 : groups.front().size();
  for (const auto& g : groups) m = std::min(m, g.size());
  if (batch_size < groups.size() * m) {
    throw SizeError("batch size " + std::to_string(batch_size) + " is smaller than " +
                    std::to_string(groups.size()) + " classes x " + std::to_string(m) +
                    " labeled nodes");
  }
  auto batch = balanced_labeled_batch(split, labels, rng);
  take_sample(split.unlabeled_pool(), batch_size - batch.size(), rng, batch);
  return batch;
}

std::vector<NodeId> uniform_batch(std::size_t num_nodes, std::size_t batch_size, Rng& rng) {
  std::vector<NodeId> all(num_nodes);
  for (NodeId v = 0; v < num_nodes; ++v) all[v] = v;
  std::vector<NodeId> out;
  take_sample(std::move(all), batch_size, rng, out);
  return out;
}

std::string format_corpus(std::span<const WalkPath> paths) {
  std::ostringstream out;
  for (const auto& p : paths) {
    for (std::size_t i = 0; i < p.size(); ++i) out << (i ? " " : "") << p[i];
    out << '\n';
  }
  return out.str();
}

}  // namespace imverde
