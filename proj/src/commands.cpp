#include "imverde/commands.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "imverde/dynamics.hpp"
#include "imverde/error.hpp"
#include "imverde/experiment.hpp"
#include "imverde/rng.hpp"

namespace imverde {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed");
  }
  std::ostringstream out;
  out << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) out << std::setw(2) << static_cast<int>(digest[i]);
  return out.str();
}

namespace {

struct Run {
  ExperimentConfig cfg;
  fs::path out;
  std::size_t threads;
};

Run prepare(const ExperimentConfig& cfg, const CommandOptions& options) {
  Run run{cfg, options.out_dir, options.deterministic ? 1 : cfg.threads};
  if (options.seed) run.cfg.seed = *options.seed;
  run.cfg.validate();
  std::error_code ec;
  fs::create_directories(run.out, ec);
  if (ec) throw IoError("cannot create " + run.out.string() + ": " + ec.message());
  return run;
}

std::string fmt(double x) {
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

class Writer {
 public:
  explicit Writer(const Run& run) : run_(run) {}

  void put(const std::string& rel, const std::string& text) {
    const fs::path p = run_.out / rel;
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
    if (ec) throw IoError("cannot create " + p.parent_path().string() + ": " + ec.message());
    write_text_file(p, text);
    files_.emplace_back(rel, sha256_hex(text));
  }

  // manifest.json accumulates artifacts across commands sharing an output
  // directory, as long as they ran with the same config and seed.
  CommandOutput finish(const std::string& command) {
    const fs::path path = run_.out / "manifest.json";
    const std::string hash = sha256_hex(run_.cfg.to_json());
    ordered_json m;
    if (fs::exists(path)) {
      try {
        m = ordered_json::parse(read_text_file(path));
        if (m.value("config_sha256", "") != hash || m.value("seed", std::uint64_t{0}) != run_.cfg.seed) {
          m = ordered_json();
        }
      } catch (const nlohmann::json::exception&) {
        m = ordered_json();
      }
    }
    if (m.is_null()) {
      m["config_sha256"] = hash;
      m["seed"] = run_.cfg.seed;
      m["commands"] = ordered_json::array();
      m["artifacts"] = ordered_json::object();
    }
    auto& cmds = m["commands"];
    if (std::find(cmds.begin(), cmds.end(), command) == cmds.end()) cmds.push_back(command);
    CommandOutput out;
    for (const auto& [rel, sum] : files_) {
      m["artifacts"][rel] = sum;
      out.artifacts.push_back(rel);
    }
    write_text_file(path, m.dump(2) + "\n");
    return out;
  }

 private:
  const Run& run_;
  std::vector<std::pair<std::string, std::string>> files_;
};

std::vector<VisitingFunction> walkers_for(const ExperimentConfig& cfg) {
  std::vector<VisitingFunction> out;
  for (const auto& name : cfg.walk_stats.walkers) out.push_back(VisitingFunction::from_name(name, cfg.alpha));
  return out;
}

}  // namespace

CommandOutput cmd_walk_stats(const ExperimentConfig& config, const CommandOptions& options) {
  const Run run = prepare(config, options);
  const auto& ws = run.cfg.walk_stats;
  const auto graph = load_graph(run.cfg.dataset, run.cfg.base_dir, run.cfg.seed).first;
  if (ws.trace_start >= graph.num_nodes()) throw ValidationError("walk_stats.trace_start is not a node");

  const auto study = purity_study(graph, walkers_for(run.cfg), ws.walk_length, ws.repeats, run.cfg.seed);
  std::string purity = "walker,class,mean_purity\n";
  for (const auto& row : study.by_class) purity += row.walker + "," + std::to_string(row.cls) + "," + fmt(row.mean_purity) + "\n";
  std::string by_node = "walker,node,class,mean_purity\n";
  for (const auto& row : study.by_node) {
    by_node += row.walker + "," + std::to_string(row.node) + "," + std::to_string(row.cls) + "," + fmt(row.mean_purity) + "\n";
  }

  Rng rng = make_rng(run.cfg.seed, "trace");
  const auto trace = convergence_trace(build_transition(graph), VisitingFunction::from_name(ws.trace_walker, run.cfg.alpha),
                                       ws.trace_start, ws.trace_length, ws.trace_interval, rng);
  std::string trace_csv = "step,value\n";
  for (const auto& p : trace) trace_csv += std::to_string(p.step) + "," + fmt(p.value) + "\n";

  Writer w(run);
  w.put("purity.csv", purity);
  w.put("purity_by_node.csv", by_node);
  w.put("trace.csv", trace_csv);
  return w.finish("walk-stats");
}

CommandOutput cmd_train(const ExperimentConfig& config, const CommandOptions& options) {
  const Run run = prepare(config, options);
  const Dataset data = load_dataset(run.cfg, run.cfg.seed);
  Writer w(run);
  std::string aborted;
  for (const auto& name : run.cfg.variants) {
    const auto variant = VariantSpec::parse(name);
    const auto result = train_variant(data, variant, run.cfg, run.cfg.seed, run.threads);
    w.put(name + "/embeddings.txt", format_embeddings(result.params.E));
    w.put(name + "/model.json", checkpoint_to_json(result.params));
    w.put(name + "/train_report.jsonl", format_report(result.report));
    if (result.report.aborted) {
      aborted = name + ": " + result.report.abort_reason;
      break;
    }
  }
  auto out = w.finish("train");
  if (!aborted.empty()) throw NumericError(aborted);
  return out;
}

CommandOutput cmd_eval(const ExperimentConfig& config, const CommandOptions& options) {
  const Run run = prepare(config, options);
  const Dataset data = load_dataset(run.cfg, run.cfg.seed);
  LogregOptions logreg;
  logreg.l2 = run.cfg.logreg_l2;
  Writer w(run);
  ordered_json rows = ordered_json::array();
  for (const auto& name : run.cfg.variants) {
    const auto variant = VariantSpec::parse(name);
    const fs::path dir = run.out / name;
    const fs::path artifact = variant.imverde ? dir / "model.json" : dir / "embeddings.txt";
    if (!fs::exists(artifact)) {
      throw ValidationError("missing artifact " + artifact.string() + " (run train first)");
    }
    ScoredExamples scored;
    if (variant.imverde) {
      const auto params = load_checkpoint(artifact);
      if (params.num_nodes() != data.graph.num_nodes() || params.num_classes != static_cast<std::size_t>(data.graph.num_classes())) {
        throw ValidationError(artifact.string() + " does not match the configured dataset");
      }
      scored = model_eval(params, data.graph, data.split);
    } else {
      const Matrix emb = load_embeddings(artifact);
      if (static_cast<std::size_t>(emb.rows()) != data.graph.num_nodes()) {
        throw ValidationError(artifact.string() + " does not match the configured dataset");
      }
      scored = logreg_eval(emb, data.graph, data.split, logreg);
    }
    const auto m = summarize(scored);
    ordered_json row;
    row["dataset"] = data.name;
    row["variant"] = name;
    row["seed"] = run.cfg.seed;
    row["minority_class"] = data.split.minority_class;
    row["n_test"] = scored.nodes.size();
    row["auc"] = m.auc;
    row["ap"] = m.ap;
    row["accuracy"] = m.accuracy;
    rows.push_back(std::move(row));

    std::string roc = "fpr,tpr,threshold\n";
    for (const auto& p : m.roc.curve) roc += fmt(p.fpr) + "," + fmt(p.tpr) + "," + fmt(p.threshold) + "\n";
    w.put("roc_" + name + ".csv", roc);
  }
  w.put("metrics.json", rows.dump(2) + "\n");
  return w.finish("eval");
}

CommandOutput cmd_sweep(const ExperimentConfig& config, const CommandOptions& options) {
  const Run run = prepare(config, options);
  const auto& sw = run.cfg.sweep;
  const auto seeds = sweep_seeds(run.cfg);
  std::vector<SweepRow> rows;
  if (sw.kind == "ratio") {
    if (sw.ratios.empty()) throw ValidationError("config: sweep.ratios must not be empty for a ratio sweep");
    rows = imbalance_sweep(run.cfg, sw.ratios, seeds, run.threads);
  } else {
    if (sw.alphas.empty() && sw.rs.empty()) {
      throw ValidationError("config: sweep.alphas or sweep.rs must be non-empty for a params sweep");
    }
    rows = parameter_sweep(run.cfg, sw.alphas, sw.rs, seeds, run.threads);
  }
  std::string csv = "ratio,alpha,r,variant,seed,auc,ap,accuracy\n";
  for (const auto& r : rows) {
    csv += fmt(r.ratio) + "," + fmt(r.alpha) + "," + fmt(r.r) + "," + r.variant + "," + std::to_string(r.seed) + "," +
           fmt(r.auc) + "," + fmt(r.ap) + "," + fmt(r.accuracy) + "\n";
  }
  std::string summary = "ratio,alpha,r,variant,runs,mean_auc,mean_ap,mean_accuracy\n";
  for (const auto& s : summarize_sweep(rows)) {
    summary += fmt(s.ratio) + "," + fmt(s.alpha) + "," + fmt(s.r) + "," + s.variant + "," + std::to_string(s.runs) +
               "," + fmt(s.mean_auc) + "," + fmt(s.mean_ap) + "," + fmt(s.mean_accuracy) + "\n";
  }
  Writer w(run);
  w.put("sweep.csv", csv);
  w.put("sweep_summary.csv", summary);
  return w.finish("sweep");
}

}  // namespace imverde
