#include "imverde/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "imverde/error.hpp"

namespace imverde {

AttributedGraph AttributedGraph::from_edges(std::size_t n, std::span<const WeightedEdge> edges,
                                            bool directed) {
  if (n == 0) throw ValidationError("graph must have at least one node");
  std::map<std::pair<NodeId, NodeId>, double> merged;
  for (const auto& e : edges) {
    if (e.src >= n || e.dst >= n) {
      throw ValidationError("edge (" + std::to_string(e.src) + ", " + std::to_string(e.dst) +
                            ") out of range for n = " + std::to_string(n));
    }
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw ValidationError("edge (" + std::to_string(e.src) + ", " + std::to_string(e.dst) +
                            ") has non-positive weight");
    }
    auto key = directed ? std::pair{e.src, e.dst}
                        : std::pair{std::min(e.src, e.dst), std::max(e.src, e.dst)};
    merged[key] += e.weight;
  }

  std::vector<std::vector<std::pair<NodeId, double>>> rows(n);
  for (const auto& [key, w] : merged) {
    rows[key.first].emplace_back(key.second, w);
    if (!directed && key.first != key.second) rows[key.second].emplace_back(key.first, w);
  }

  AttributedGraph g;
  g.directed_ = directed;
  g.offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto& row = rows[i];
    std::sort(row.begin(), row.end());
    g.offsets_[i + 1] = g.offsets_[i] + row.size();
    for (const auto& [j, w] : row) {
      g.targets_.push_back(j);
      g.weights_.push_back(w);
    }
  }
  return g;
}

std::size_t AttributedGraph::num_edges() const {
  if (directed_) return num_entries();
  std::size_t loops = 0;
  for (NodeId i = 0; i < num_nodes(); ++i) {
    for (NodeId j : neighbors(i)) loops += (i == j);
  }
  return (num_entries() - loops) / 2 + loops;
}

std::vector<WeightedEdge> AttributedGraph::edges() const {
  std::vector<WeightedEdge> out;
  for (NodeId i = 0; i < num_nodes(); ++i) {
    auto nb = neighbors(i);
    auto w = weights(i);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      if (directed_ || i <= nb[k]) out.push_back({i, nb[k], w[k]});
    }
  }
  return out;
}

void AttributedGraph::set_labels(std::vector<ClassId> labels, int num_classes) {
  if (labels.size() != num_nodes()) {
    throw ValidationError("label vector has " + std::to_string(labels.size()) +
                          " entries, expected " + std::to_string(num_nodes()));
  }
  for (ClassId c : labels) {
    if (c != kNoLabel && (c < 0 || c >= num_classes)) {
      throw ValidationError("label " + std::to_string(c) + " outside [0, " +
                            std::to_string(num_classes) + ")");
    }
  }
  labels_ = std::move(labels);
  num_classes_ = num_classes;
}

std::vector<NodeId> AttributedGraph::nodes_of_class(ClassId c) const {
  std::vector<NodeId> out;
  for (NodeId v = 0; v < labels_.size(); ++v) {
    if (labels_[v] == c) out.push_back(v);
  }
  return out;
}

void AttributedGraph::set_features(std::size_t dim, std::vector<std::vector<FeatureEntry>> rows) {
  if (rows.size() != num_nodes()) throw ValidationError("feature rows do not match node count");
  feature_dim_ = dim;
  feature_offsets_.assign(rows.size() + 1, 0);
  feature_entries_.clear();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& f : rows[i]) {
      if (f.index >= dim) throw ValidationError("feature index out of range");
      feature_entries_.push_back(f);
    }
    feature_offsets_[i + 1] = feature_entries_.size();
  }
}

void AttributedGraph::validate() const {
  const std::size_t n = num_nodes();
  if (n == 0) throw ValidationError("graph has no nodes");
  std::map<std::pair<NodeId, NodeId>, double> entries;
  for (NodeId i = 0; i < n; ++i) {
    auto nb = neighbors(i);
    auto w = weights(i);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      if (nb[k] >= n) throw ValidationError("neighbor id out of range");
      if (!(w[k] > 0.0)) throw ValidationError("non-positive edge weight");
      if (!entries.emplace(std::pair{i, nb[k]}, w[k]).second) {
        throw ValidationError("duplicate adjacency entry");
      }
    }
  }
  if (!directed_) {
    for (const auto& [key, w] : entries) {
      auto it = entries.find({key.second, key.first});
      if (it == entries.end() || it->second != w) {
        throw ValidationError("undirected graph is not symmetric");
      }
    }
  }
  if (!labels_.empty()) {
    if (labels_.size() != n) throw ValidationError("label vector length mismatch");
    for (ClassId c : labels_) {
      if (c != kNoLabel && (c < 0 || c >= num_classes_)) throw ValidationError("label out of range");
    }
  }
}

// ---- transition matrix ----------------------------------------------------

TransitionMatrix TransitionMatrix::from_rows(const std::vector<Row>& rows) {
  TransitionMatrix r;
  const std::size_t n = rows.size();
  r.offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].empty()) throw ValidationError("transition row " + std::to_string(i) + " is empty");
    double sum = 0.0;
    for (const auto& [j, p] : rows[i]) {
      if (j >= n) throw ValidationError("transition target out of range");
      if (!(p > 0.0) || p > 1.0) throw ValidationError("transition probability outside (0, 1]");
      r.targets_.push_back(j);
      r.probs_.push_back(p);
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw ValidationError("transition row " + std::to_string(i) + " does not sum to 1");
    }
    r.offsets_[i + 1] = r.targets_.size();
  }
  return r;
}

double TransitionMatrix::at(NodeId i, NodeId j) const {
  auto t = targets(i);
  auto p = probs(i);
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] == j) return p[k];
  }
  return 0.0;
}

TransitionMatrix build_transition(const AttributedGraph& graph) {
  TransitionMatrix r;
  const std::size_t n = graph.num_nodes();
  r.offsets_.assign(n + 1, 0);
  for (NodeId i = 0; i < n; ++i) {
    auto nb = graph.neighbors(i);
    auto w = graph.weights(i);
    if (nb.empty()) {
      r.targets_.push_back(i);
      r.probs_.push_back(1.0);
    } else {
      const double total = std::accumulate(w.begin(), w.end(), 0.0);
      for (std::size_t k = 0; k < nb.size(); ++k) {
        r.targets_.push_back(nb[k]);
        r.probs_.push_back(w[k] / total);
      }
    }
    r.offsets_[i + 1] = r.targets_.size();
  }
  return r;
}

// ---- splits ----------------------------------------------------------------

std::vector<NodeId> LabeledSplit::unlabeled_pool() const {
  std::vector<NodeId> pool = unlabeled_train;
  pool.insert(pool.end(), test.begin(), test.end());
  return pool;
}

std::vector<ClassId> LabeledSplit::visible_labels(const AttributedGraph& graph) const {
  std::vector<ClassId> visible(graph.num_nodes(), kNoLabel);
  for (NodeId v : labeled_train) visible[v] = graph.label(v);
  return visible;
}

void LabeledSplit::validate(const AttributedGraph& graph) const {
  std::vector<char> seen(graph.num_nodes(), 0);
  auto mark = [&](const std::vector<NodeId>& nodes, const char* what) {
    for (NodeId v : nodes) {
      if (v >= graph.num_nodes()) {
        throw ValidationError(std::string(what) + " node " + std::to_string(v) + " out of range");
      }
      if (seen[v]) throw ValidationError("node " + std::to_string(v) + " appears in two split sets");
      seen[v] = 1;
    }
  };
  mark(labeled_train, "labeled_train");
  mark(unlabeled_train, "unlabeled_train");
  mark(test, "test");
  for (NodeId v : labeled_train) {
    if (!graph.labeled(v)) {
      throw ValidationError("labeled_train node " + std::to_string(v) + " has no label");
    }
  }
}

LabeledSplit make_imbalanced_split(const AttributedGraph& graph, ClassId minority_class,
                                   std::size_t n_min, std::size_t n_maj, std::size_t n_test,
                                   std::uint64_t seed) {
  const int num_classes = graph.num_classes();
  if (minority_class < 0 || minority_class >= num_classes) {
    throw ValidationError("minority class " + std::to_string(minority_class) + " does not exist");
  }
  Rng rng = make_rng(seed, "split");
  std::vector<char> used(graph.num_nodes(), 0);
  LabeledSplit split;
  split.minority_class = minority_class;

  auto minority = graph.nodes_of_class(minority_class);
  if (minority.size() < n_min) {
    throw SizeError("class " + std::to_string(minority_class) + " has " +
                    std::to_string(minority.size()) + " nodes, " + std::to_string(n_min) +
                    " requested");
  }
  std::shuffle(minority.begin(), minority.end(), rng);
  for (std::size_t i = 0; i < n_min; ++i) {
    split.labeled_train.push_back(minority[i]);
    used[minority[i]] = 1;
  }

  // Largest-remainder allocation of n_maj across the other classes.
  std::vector<std::vector<NodeId>> others;
  std::vector<ClassId> other_ids;
  std::size_t total_other = 0;
  for (ClassId c = 0; c < num_classes; ++c) {
    if (c == minority_class) continue;
    others.push_back(graph.nodes_of_class(c));
    other_ids.push_back(c);
    total_other += others.back().size();
  }
  if (total_other < n_maj) {
    throw SizeError("majority classes have " + std::to_string(total_other) + " nodes, " +
                    std::to_string(n_maj) + " requested");
  }
  std::vector<std::size_t> quota(others.size(), 0);
  if (n_maj > 0) {
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < others.size(); ++k) {
      const double exact = static_cast<double>(n_maj) * static_cast<double>(others[k].size()) /
                           static_cast<double>(total_other);
      quota[k] = static_cast<std::size_t>(std::floor(exact));
      assigned += quota[k];
      remainders.emplace_back(exact - std::floor(exact), k);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t r = 0; assigned < n_maj; ++r, ++assigned) ++quota[remainders[r].second];
  }
  for (std::size_t k = 0; k < others.size(); ++k) {
    auto& nodes = others[k];
    std::shuffle(nodes.begin(), nodes.end(), rng);
    for (std::size_t i = 0; i < quota[k]; ++i) {
      split.labeled_train.push_back(nodes[i]);
      used[nodes[i]] = 1;
    }
  }

  std::vector<NodeId> rest;
  for (NodeId v = 0; v < graph.num_nodes(); ++v) {
    if (!used[v]) rest.push_back(v);
  }
  if (rest.size() < n_test) {
    throw SizeError("only " + std::to_string(rest.size()) + " nodes left for " +
                    std::to_string(n_test) + " test nodes");
  }
  std::shuffle(rest.begin(), rest.end(), rng);
  split.test.assign(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(n_test));
  split.unlabeled_train.assign(rest.begin() + static_cast<std::ptrdiff_t>(n_test), rest.end());

  std::sort(split.labeled_train.begin(), split.labeled_train.end());
  std::sort(split.test.begin(), split.test.end());
  std::sort(split.unlabeled_train.begin(), split.unlabeled_train.end());
  return split;
}

// ---- planted partition -----------------------------------------------------

namespace {

// Visits each of `count` candidate slots with probability p, skipping geometrically.
template <typename Fn>
void bernoulli_slots(std::uint64_t count, double p, Rng& rng, Fn&& emit) {
  if (p <= 0.0 || count == 0) return;
  if (p >= 1.0) {
    for (std::uint64_t s = 0; s < count; ++s) emit(s);
    return;
  }
  const double log_q = std::log1p(-p);
  std::uint64_t s = 0;
  while (true) {
    const double u = 1.0 - uniform01(rng);  // (0, 1]
    const double skip = std::floor(std::log(u) / log_q);
    if (skip >= static_cast<double>(count - s)) return;
    s += static_cast<std::uint64_t>(skip);
    emit(s);
    if (++s >= count) return;
  }
}

}  // namespace

AttributedGraph planted_partition(std::span<const std::size_t> n_per_class, double p_in,
                                  double p_out, std::uint64_t seed) {
  if (n_per_class.empty()) throw ValidationError("planted_partition needs at least one class");
  if (!(p_out >= 0.0 && p_out < p_in && p_in <= 1.0)) {
    throw ValidationError("planted_partition requires 0 <= p_out < p_in <= 1");
  }
  std::vector<std::size_t> first(n_per_class.size() + 1, 0);
  for (std::size_t c = 0; c < n_per_class.size(); ++c) {
    if (n_per_class[c] == 0) throw ValidationError("planted_partition class sizes must be >= 1");
    first[c + 1] = first[c] + n_per_class[c];
  }
  const std::size_t n = first.back();
  Rng rng = make_rng(seed, "planted_partition");

  std::vector<WeightedEdge> edges;
  for (std::size_t a = 0; a < n_per_class.size(); ++a) {
    const std::uint64_t na = n_per_class[a];
    // Intra-block: strict upper triangle, row-major. Slots arrive in increasing
    // order so the (row, row start) cursor only moves forward.
    std::uint64_t i = 0, row_len = na - 1, base = 0;
    bernoulli_slots(na * (na - 1) / 2, p_in, rng, [&](std::uint64_t s) {
      while (s >= base + row_len) {
        base += row_len;
        --row_len;
        ++i;
      }
      const std::uint64_t j = i + 1 + (s - base);
      edges.push_back({static_cast<NodeId>(first[a] + i), static_cast<NodeId>(first[a] + j), 1.0});
    });
    for (std::size_t b = a + 1; b < n_per_class.size(); ++b) {
      const std::uint64_t nb = n_per_class[b];
      bernoulli_slots(na * nb, p_out, rng, [&](std::uint64_t s) {
        edges.push_back({static_cast<NodeId>(first[a] + s / nb),
                         static_cast<NodeId>(first[b] + s % nb), 1.0});
      });
    }
  }

  auto graph = AttributedGraph::from_edges(n, edges, /*directed=*/false);
  std::vector<ClassId> labels(n);
  std::vector<std::vector<FeatureEntry>> features(n);
  for (std::size_t c = 0; c < n_per_class.size(); ++c) {
    for (std::size_t v = first[c]; v < first[c + 1]; ++v) {
      labels[v] = static_cast<ClassId>(c);
      features[v].push_back({static_cast<std::uint32_t>(c), 1.0});
    }
  }
  graph.set_labels(std::move(labels), static_cast<int>(n_per_class.size()));
  graph.set_features(n_per_class.size(), std::move(features));
  return graph;
}

}  // namespace imverde
