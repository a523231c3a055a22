#include "imverde/config.hpp"

#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "imverde/error.hpp"
#include "imverde/train.hpp"
#include "imverde/walk.hpp"

namespace imverde {

using nlohmann::json;

namespace {

// Reads optional keys from one JSON object and rejects leftovers.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError("config: '" + label() + "' must be an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
        if (!it->is_number_unsigned()) throw ValidationError("");
      } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        if (!it->is_number_integer()) throw ValidationError("");
      }
      out = it->get<T>();
    } catch (const std::exception&) {
      throw ValidationError("config: '" + key_path(key) + "' has the wrong type (" + it->dump() + ")");
    }
  }

  void get_path(const char* key, std::filesystem::path& out) {
    std::string s = out.string();
    get(key, s);
    out = s;
  }

  const json* child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ValidationError("config: unknown key '" + key_path(it.key()) + "'");
    }
  }

  std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  std::string label() const { return path_.empty() ? "<root>" : path_; }
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError("config: " + msg);
}

bool in_open_unit(double x) { return x > 0.0 && x < 1.0; }

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& source,
                              const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ParseError(source, 0, e.what());
  }
  ExperimentConfig c;
  c.base_dir = base_dir;
  Section root(j, "");
  if (const json* d = root.child("dataset")) {
    Section s(*d, "dataset");
    s.get("kind", c.dataset.kind);
    s.get("name", c.dataset.name);
    s.get_path("path", c.dataset.path);
    s.get_path("labels", c.dataset.labels);
    s.get("directed", c.dataset.directed);
    s.get("weighted", c.dataset.weighted);
    s.get_path("dir", c.dataset.dir);
    s.get("sizes", c.dataset.sizes);
    s.get("p_in", c.dataset.p_in);
    s.get("p_out", c.dataset.p_out);
    s.get("features", c.dataset.features);
    s.finish();
  }
  if (const json* d = root.child("split")) {
    Section s(*d, "split");
    s.get("kind", c.split.kind);
    s.get("minority_class", c.split.minority_class);
    s.get("n_min", c.split.n_min);
    s.get("n_maj", c.split.n_maj);
    s.get("n_test", c.split.n_test);
    s.finish();
  }
  if (const json* d = root.child("walker")) {
    Section s(*d, "walker");
    s.get("alpha", c.alpha);
    s.finish();
  }
  if (const json* d = root.child("context")) {
    Section s(*d, "context");
    s.get("r", c.context.r);
    s.get("T", c.context.walk_length);
    s.get("window", c.context.window);
    s.finish();
  }
  if (const json* d = root.child("model")) {
    Section s(*d, "model");
    auto& m = c.model;
    s.get("d", m.dim);
    s.get("k", m.negatives);
    s.get("lambda", m.lambda);
    s.get("lr_unsup", m.lr_unsup);
    s.get("lr_sup", m.lr_sup);
    s.get("T1", m.iters_unsup);
    s.get("T2", m.iters_sup);
    s.get("batch_size", m.batch_size);
    s.get("hidden_x", m.hidden_x);
    s.get("hidden_e", m.hidden_e);
    s.get("neg_exponent", m.neg_exponent);
    s.get("rounds", m.rounds);
    s.finish();
  }
  root.get("variants", c.variants);
  if (const json* d = root.child("eval")) {
    Section s(*d, "eval");
    s.get("logreg_l2", c.logreg_l2);
    s.finish();
  }
  if (const json* d = root.child("walk_stats")) {
    Section s(*d, "walk_stats");
    auto& w = c.walk_stats;
    s.get("walkers", w.walkers);
    s.get("T", w.walk_length);
    s.get("repeats", w.repeats);
    s.get("trace_length", w.trace_length);
    s.get("trace_interval", w.trace_interval);
    s.get("trace_start", w.trace_start);
    s.get("trace_walker", w.trace_walker);
    s.finish();
  }
  if (const json* d = root.child("sweep")) {
    Section s(*d, "sweep");
    s.get("kind", c.sweep.kind);
    s.get("ratios", c.sweep.ratios);
    s.get("alphas", c.sweep.alphas);
    s.get("rs", c.sweep.rs);
    s.get("num_seeds", c.sweep.num_seeds);
    s.finish();
  }
  root.get("seed", c.seed);
  root.get("threads", c.threads);
  root.finish();
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  return parse_config(text, path.string(), path.parent_path());
}

void ExperimentConfig::validate() const {
  const auto& d = dataset;
  if (d.kind == "edge_list") {
    require(!d.path.empty(), "dataset.path is required for edge_list");
    require(!d.labels.empty(), "dataset.labels is required for edge_list");
  } else if (d.kind == "planetoid") {
    require(!d.dir.empty(), "dataset.dir is required for planetoid");
    require(!d.name.empty(), "dataset.name is required for planetoid");
  } else if (d.kind == "planted") {
    require(d.sizes.size() >= 2, "dataset.sizes needs at least two classes");
    for (auto s : d.sizes) require(s >= 1, "dataset.sizes entries must be >= 1");
    require(d.p_in > d.p_out && d.p_out >= 0.0 && d.p_in <= 1.0, "need 0 <= p_out < p_in <= 1");
  } else {
    require(d.kind == "karate", "dataset.kind must be karate, edge_list, planetoid or planted");
  }

  require(split.kind == "random" || split.kind == "given", "split.kind must be random or given");
  require(split.kind != "given" || d.kind == "planetoid", "split.kind 'given' needs a planetoid dataset");
  require(split.minority_class >= 0, "split.minority_class must be >= 0");
  if (split.kind == "random") {
    require(split.n_min >= 1 && split.n_maj >= 1, "split.n_min and split.n_maj must be >= 1");
  }

  require(in_open_unit(alpha), "walker.alpha must be in (0, 1)");
  require(context.r >= 0.0 && context.r < 1.0, "context.r must be in [0, 1)");
  require(context.walk_length >= 1, "context.T must be >= 1");
  require(context.window >= 1, "context.window must be >= 1");
  try {
    model.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  require(!variants.empty(), "variants must not be empty");
  for (const auto& v : variants) {
    const auto dash = v.find('-');
    require(dash != std::string::npos, "variant '" + v + "' must look like <walker>-<imverde|baseline>");
    const std::string w = v.substr(0, dash), mode = v.substr(dash + 1);
    require(w == "rw" || w == "vrrw" || w == "vdrw", "variant '" + v + "': walker must be rw, vrrw or vdrw");
    require(mode == "imverde" || mode == "baseline", "variant '" + v + "': mode must be imverde or baseline");
  }
  require(logreg_l2 >= 0.0, "eval.logreg_l2 must be >= 0");

  const auto& w = walk_stats;
  require(!w.walkers.empty(), "walk_stats.walkers must not be empty");
  for (const auto& name : w.walkers) {
    require(name == "rw" || name == "vrrw" || name == "vdrw", "walk_stats.walkers: unknown walker '" + name + "'");
  }
  require(w.trace_walker == "rw" || w.trace_walker == "vrrw" || w.trace_walker == "vdrw",
          "walk_stats.trace_walker must be rw, vrrw or vdrw");
  require(w.walk_length >= 1 && w.repeats >= 1, "walk_stats.T and walk_stats.repeats must be >= 1");
  require(w.trace_interval >= 1 && w.trace_length >= 2 * w.trace_interval,
          "walk_stats needs trace_length >= 2 * trace_interval >= 2");

  require(sweep.kind == "ratio" || sweep.kind == "params", "sweep.kind must be ratio or params");
  for (double r : sweep.ratios) require(r > 0.0 && r <= 1.0, "sweep.ratios must lie in (0, 1]");
  for (double a : sweep.alphas) require(in_open_unit(a), "sweep.alphas must lie in (0, 1)");
  for (double r : sweep.rs) require(r >= 0.0 && r < 1.0, "sweep.rs must lie in [0, 1)");
  require(sweep.num_seeds >= 1, "sweep.num_seeds must be >= 1");
  require(threads >= 1, "threads must be >= 1");
}

std::string ExperimentConfig::to_json() const {
  json j;
  j["dataset"] = {{"kind", dataset.kind},         {"name", dataset.name},
                  {"path", dataset.path.string()}, {"labels", dataset.labels.string()},
                  {"directed", dataset.directed}, {"weighted", dataset.weighted},
                  {"dir", dataset.dir.string()},  {"sizes", dataset.sizes},
                  {"p_in", dataset.p_in},         {"p_out", dataset.p_out},
                  {"features", dataset.features}};
  j["split"] = {{"kind", split.kind}, {"minority_class", split.minority_class}, {"n_min", split.n_min},
                {"n_maj", split.n_maj}, {"n_test", split.n_test}};
  j["walker"] = {{"alpha", alpha}};
  j["context"] = {{"r", context.r}, {"T", context.walk_length}, {"window", context.window}};
  j["model"] = {{"d", model.dim},           {"k", model.negatives},      {"lambda", model.lambda},
                {"lr_unsup", model.lr_unsup}, {"lr_sup", model.lr_sup},  {"T1", model.iters_unsup},
                {"T2", model.iters_sup},    {"batch_size", model.batch_size},
                {"hidden_x", model.hidden_x}, {"hidden_e", model.hidden_e},
                {"neg_exponent", model.neg_exponent}, {"rounds", model.rounds}};
  j["variants"] = variants;
  j["eval"] = {{"logreg_l2", logreg_l2}};
  j["walk_stats"] = {{"walkers", walk_stats.walkers},         {"T", walk_stats.walk_length},
                     {"repeats", walk_stats.repeats},         {"trace_length", walk_stats.trace_length},
                     {"trace_interval", walk_stats.trace_interval}, {"trace_start", walk_stats.trace_start},
                     {"trace_walker", walk_stats.trace_walker}};
  j["sweep"] = {{"kind", sweep.kind}, {"ratios", sweep.ratios}, {"alphas", sweep.alphas},
                {"rs", sweep.rs}, {"num_seeds", sweep.num_seeds}};
  j["seed"] = seed;
  j["threads"] = threads;
  return j.dump();
}

}  // namespace imverde
