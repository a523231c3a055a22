#include "imverde/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "imverde/error.hpp"
#include "imverde/rng.hpp"
#include "imverde/sampling.hpp"

namespace imverde {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::filesystem::path& p) {
  return p.is_absolute() || base.empty() ? p : base / p;
}

}  // namespace

std::pair<AttributedGraph, LabeledSplit> load_graph(const DatasetSpec& spec,
                                                    const std::filesystem::path& base_dir,
                                                    std::uint64_t seed) {
  if (spec.kind == "karate") return {karate_fixture(), {}};
  if (spec.kind == "edge_list") {
    auto g = load_edge_list(resolve(base_dir, spec.path), spec.directed, spec.weighted);
    load_labels(g, resolve(base_dir, spec.labels));
    return {std::move(g), {}};
  }
  if (spec.kind == "planetoid") {
    auto data = load_planetoid_format(resolve(base_dir, spec.dir), spec.name);
    return {std::move(data.graph), std::move(data.split)};
  }
  if (spec.kind == "planted") {
    auto g = planted_partition(spec.sizes, spec.p_in, spec.p_out, derive_seed(seed, "planted_partition"));
    if (!spec.features) g.set_features(0, std::vector<std::vector<FeatureEntry>>(g.num_nodes()));
    return {std::move(g), {}};
  }
  throw ValidationError("unknown dataset kind '" + spec.kind + "'");
}

Dataset load_dataset(const ExperimentConfig& cfg, std::uint64_t seed) {
  auto [graph, given] = load_graph(cfg.dataset, cfg.base_dir, seed);
  Dataset data;
  data.name = cfg.dataset.name.empty() ? cfg.dataset.kind : cfg.dataset.name;
  if (cfg.split.kind == "given") {
    data.split = std::move(given);
    data.split.minority_class = cfg.split.minority_class;
  } else {
    if (cfg.split.minority_class >= graph.num_classes()) {
      throw ValidationError("split.minority_class " + std::to_string(cfg.split.minority_class) +
                            " is not a class of the dataset");
    }
    std::size_t n_test = cfg.split.n_test;
    if (n_test == 0) {
      const std::size_t used = cfg.split.n_min + cfg.split.n_maj;
      n_test = graph.num_nodes() > used ? graph.num_nodes() - used : 0;
    }
    data.split = make_imbalanced_split(graph, cfg.split.minority_class, cfg.split.n_min, cfg.split.n_maj,
                                       n_test, seed);
  }
  data.split.validate(graph);
  data.graph = std::move(graph);
  return data;
}

VariantSpec VariantSpec::parse(const std::string& name) {
  const auto dash = name.find('-');
  if (dash == std::string::npos) throw ValidationError("variant '" + name + "' must be <walker>-<mode>");
  VariantSpec v{name, name.substr(0, dash), true};
  const std::string mode = name.substr(dash + 1);
  if (mode == "baseline") {
    v.imverde = false;
  } else if (mode != "imverde") {
    throw ValidationError("variant '" + name + "': mode must be imverde or baseline");
  }
  VisitingFunction::from_name(v.walker, 0.5);  // validates the walker name
  return v;
}

TrainResult train_variant(const Dataset& data, const VariantSpec& variant, const ExperimentConfig& cfg,
                          std::uint64_t seed, std::size_t threads) {
  ContextConfig ctx;
  ctx.jump_prob = variant.imverde ? cfg.context.r : 0.0;
  ctx.walk_length = cfg.context.walk_length;
  ctx.window = cfg.context.window;
  ctx.visiting = VisitingFunction::from_name(variant.walker, cfg.alpha);
  Hyper hyper = cfg.model;
  if (!variant.imverde) {
    hyper.iters_sup = 0;
    hyper.balanced_batches = false;
  }
  const auto r = build_transition(data.graph);
  const auto sampler = build_negative_sampler(data.graph, hyper.neg_exponent, hyper.negatives);
  return train(data.graph, r, data.split, ctx, sampler, hyper, seed, TrainOptions{threads});
}

ScoredExamples score_variant(const Dataset& data, const VariantSpec& variant, const ModelParams& params,
                             const ExperimentConfig& cfg) {
  if (variant.imverde) return model_eval(params, data.graph, data.split);
  LogregOptions opts;
  opts.l2 = cfg.logreg_l2;
  return logreg_eval(params.E, data.graph, data.split, opts);
}

VariantRun run_variant(const Dataset& data, const VariantSpec& variant, const ExperimentConfig& cfg,
                       std::uint64_t seed, std::size_t threads) {
  VariantRun run{variant, train_variant(data, variant, cfg, seed, threads), {}, {}};
  if (run.trained.report.aborted) throw NumericError(variant.name + ": " + run.trained.report.abort_reason);
  run.scored = score_variant(data, variant, run.trained.params, cfg);
  run.metrics = summarize(run.scored);
  return run;
}

// ---- purity ----------------------------------------------------------------

PurityStudy purity_study(const AttributedGraph& graph, const std::vector<VisitingFunction>& walkers,
                         std::size_t walk_length, std::size_t repeats, std::uint64_t seed) {
  const std::size_t n = graph.num_nodes();
  const auto labels = graph.labels();
  for (NodeId v = 0; v < n; ++v) {
    if (!graph.labeled(v)) throw ValidationError("purity study needs every node labeled");
  }
  if (walk_length < 1 || repeats < 1) throw ValidationError("walk length and repeats must be >= 1");
  const auto r = build_transition(graph);
  PurityStudy study;
  for (const auto& f : walkers) {
    Rng rng = make_rng(seed, "walks:" + f.name());
    VisitState state(n);
    std::vector<double> node_sum(n, 0.0);
    for (std::size_t rep = 0; rep < repeats; ++rep) {
      for (NodeId v = 0; v < n; ++v) {
        const auto path = walk(r, f, state, v, walk_length, rng);
        node_sum[v] += path_class_purity(path, labels);
      }
    }
    std::map<ClassId, std::pair<double, std::size_t>> per_class;
    for (NodeId v = 0; v < n; ++v) {
      const double mean = node_sum[v] / static_cast<double>(repeats);
      study.by_node.push_back({f.name(), v, labels[v], mean});
      auto& acc = per_class[labels[v]];
      acc.first += mean;
      acc.second += 1;
    }
    for (const auto& [c, acc] : per_class) {
      study.by_class.push_back({f.name(), c, acc.first / static_cast<double>(acc.second)});
    }
  }
  return study;
}

// ---- sweeps ----------------------------------------------------------------

std::vector<std::uint64_t> sweep_seeds(const ExperimentConfig& cfg) {
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < cfg.sweep.num_seeds; ++i) seeds.push_back(cfg.seed + i);
  return seeds;
}

namespace {

void run_grid_point(const ExperimentConfig& cfg, const std::vector<std::uint64_t>& seeds,
                    std::size_t threads, std::vector<SweepRow>& rows) {
  for (std::uint64_t seed : seeds) {
    const Dataset data = load_dataset(cfg, seed);
    const double ratio = static_cast<double>(cfg.split.n_min) / static_cast<double>(cfg.split.n_maj);
    for (const auto& name : cfg.variants) {
      const auto run = run_variant(data, VariantSpec::parse(name), cfg, seed, threads);
      rows.push_back({ratio, cfg.alpha, cfg.context.r, name, seed, run.metrics.auc, run.metrics.ap,
                      run.metrics.accuracy});
    }
  }
}

}  // namespace

std::vector<SweepRow> imbalance_sweep(const ExperimentConfig& cfg, const std::vector<double>& ratios,
                                      const std::vector<std::uint64_t>& seeds, std::size_t threads) {
  if (ratios.empty()) throw ValidationError("imbalance sweep needs at least one ratio");
  if (cfg.split.kind != "random") throw ValidationError("imbalance sweep needs split.kind = random");
  std::vector<SweepRow> rows;
  for (double ratio : ratios) {
    if (!(ratio > 0.0 && ratio <= 1.0)) throw ValidationError("ratios must lie in (0, 1]");
    ExperimentConfig point = cfg;
    point.split.n_min = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(ratio * static_cast<double>(cfg.split.n_maj))));
    run_grid_point(point, seeds, threads, rows);
  }
  return rows;
}

std::vector<SweepRow> parameter_sweep(const ExperimentConfig& cfg, const std::vector<double>& alphas,
                                      const std::vector<double>& rs,
                                      const std::vector<std::uint64_t>& seeds, std::size_t threads) {
  const std::vector<double> a = alphas.empty() ? std::vector<double>{cfg.alpha} : alphas;
  const std::vector<double> r = rs.empty() ? std::vector<double>{cfg.context.r} : rs;
  if (alphas.empty() && rs.empty()) throw ValidationError("parameter sweep needs alphas or rs");
  std::vector<SweepRow> rows;
  for (double alpha : a) {
    for (double jump : r) {
      ExperimentConfig point = cfg;
      point.alpha = alpha;
      point.context.r = jump;
      point.validate();
      run_grid_point(point, seeds, threads, rows);
    }
  }
  return rows;
}

std::vector<SweepSummaryRow> summarize_sweep(const std::vector<SweepRow>& rows) {
  std::vector<SweepSummaryRow> out;
  for (const auto& row : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const SweepSummaryRow& s) {
      return s.ratio == row.ratio && s.alpha == row.alpha && s.r == row.r && s.variant == row.variant;
    });
    if (it == out.end()) {
      out.push_back({row.ratio, row.alpha, row.r, row.variant, 0, 0.0, 0.0, 0.0});
      it = out.end() - 1;
    }
    it->runs += 1;
    it->mean_auc += row.auc;
    it->mean_ap += row.ap;
    it->mean_accuracy += row.accuracy;
  }
  for (auto& s : out) {
    const double k = static_cast<double>(s.runs);
    s.mean_auc /= k;
    s.mean_ap /= k;
    s.mean_accuracy /= k;
  }
  return out;
}

}  // namespace imverde
