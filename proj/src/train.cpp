#include "imverde/train.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "imverde/error.hpp"
#include "imverde/rng.hpp"

namespace imverde {
namespace {

// Paths for one batch. Each start node owns an rng stream, so the output is
// the same for any thread count.
std::vector<WalkPath> batch_paths(const TransitionMatrix& r, const LabelIndex& labels,
                                  const std::vector<NodeId>& starts, const ContextConfig& cfg,
                                  std::uint64_t iteration_seed, std::size_t threads) {
  std::vector<WalkPath> paths(starts.size());
  auto work = [&](std::size_t lo, std::size_t hi) {
    VisitState state(r.num_nodes());
    for (std::size_t j = lo; j < hi; ++j) {
      state.reset();
      Rng rng = make_rng(iteration_seed, "path", j);
      paths[j] = sample_context_path(r, labels, state, starts[j], cfg, rng);
    }
  };
  threads = std::max<std::size_t>(1, std::min(threads, starts.size()));
  if (threads == 1) {
    work(0, starts.size());
    return paths;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (starts.size() + threads - 1) / threads;
  for (std::size_t t = 0; t < threads; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(starts.size(), lo + chunk);
    if (lo < hi) pool.emplace_back(work, lo, hi);
  }
  for (auto& th : pool) th.join();
  return paths;
}

}  // namespace

TrainResult train(const AttributedGraph& graph, const TransitionMatrix& r, const LabeledSplit& split,
                  const ContextConfig& cfg, const NegativeSampler& sampler, const Hyper& hyper,
                  std::uint64_t seed, const TrainOptions& options) {
  hyper.validate();
  cfg.validate();
  split.validate(graph);
  if (r.num_nodes() != graph.num_nodes() || sampler.num_nodes() != graph.num_nodes()) {
    throw ValidationError("transition matrix, sampler and graph sizes differ");
  }
  const std::size_t n = graph.num_nodes();
  const int num_classes = graph.num_classes();
  if (num_classes < 1) throw ValidationError("training needs a labeled graph");
  const FeatureTable features = FeatureTable::from_graph(graph);

  TrainResult result{init_params(n, features.dim(), static_cast<std::size_t>(num_classes), hyper, seed), {}};
  result.report.seed = seed;
  const auto visible = split.visible_labels(graph);
  const LabelIndex label_index(visible);

  std::size_t iter1 = 0;
  std::size_t iter2 = 0;
  ModelParams last_good;
  auto abort_with = [&](const std::string& why) {
    result.report.aborted = true;
    result.report.abort_reason = why;
    result.params = std::move(last_good);
  };

  for (std::size_t round = 0; round < hyper.rounds; ++round) {
    for (std::size_t it = 0; it < hyper.iters_unsup; ++it, ++iter1) {
      Rng batch_rng = make_rng(seed, "batches", iter1);
      const auto starts = hyper.balanced_batches
                              ? balanced_batch(split, visible, hyper.batch_size, batch_rng)
                              : uniform_batch(n, hyper.batch_size, batch_rng);
      const auto paths = batch_paths(r, label_index, starts, cfg, derive_seed(seed, "walks", iter1),
                                     options.threads);
      std::vector<NodeContextPair> pairs;
      for (const auto& p : paths) {
        auto ps = extract_pairs(p, cfg.window);
        pairs.insert(pairs.end(), ps.begin(), ps.end());
      }
      Rng neg_rng = make_rng(seed, "negatives", iter1);
      std::vector<std::vector<NodeId>> negatives;
      negatives.reserve(pairs.size());
      for (const auto& pr : pairs) negatives.push_back(sample_negatives(sampler, pr.center, hyper.negatives, neg_rng));

      last_good = result.params;
      try {
        const double total = unsup_grad_step(result.params, pairs, negatives, hyper.lr_unsup, hyper.lambda);
        if (!result.params.W.allFinite()) throw NumericError("non-finite context vectors");
        const double mean = pairs.empty() ? 0.0 : total / static_cast<double>(pairs.size());
        result.report.losses.push_back({1, iter1, mean});
      } catch (const NumericError& e) {
        abort_with("phase 1 iteration " + std::to_string(iter1) + ": " + e.what());
        return result;
      }
    }
    for (std::size_t it = 0; it < hyper.iters_sup; ++it, ++iter2) {
      Rng batch_rng = make_rng(seed, "labeled_batches", iter2);
      const auto nodes = hyper.balanced_batches ? balanced_labeled_batch(split, visible, batch_rng)
                                                : split.labeled_train;
      if (nodes.empty()) throw ValidationError("phase 2 needs labeled training nodes");
      std::vector<LabeledExample> batch;
      for (NodeId v : nodes) batch.push_back({v, visible[v]});
      last_good = result.params;
      try {
        const double loss = sup_grad_step(result.params, features, batch, hyper.lr_sup);
        if (!result.params.all_finite()) throw NumericError("non-finite parameters");
        result.report.losses.push_back({2, iter2, loss});
      } catch (const NumericError& e) {
        abort_with("phase 2 iteration " + std::to_string(iter2) + ": " + e.what());
        return result;
      }
    }
  }
  return result;
}

}  // namespace imverde
