#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "imverde/commands.hpp"
#include "imverde/dynamics.hpp"
#include "imverde/error.hpp"
#include "imverde/experiment.hpp"

namespace py = pybind11;
using namespace imverde;

namespace {

std::vector<ClassId> labels_of(const AttributedGraph& g) { return {g.labels().begin(), g.labels().end()}; }

std::vector<std::tuple<NodeId, NodeId, double>> edges_of(const AttributedGraph& g) {
  std::vector<std::tuple<NodeId, NodeId, double>> out;
  for (const auto& e : g.edges()) out.emplace_back(e.src, e.dst, e.weight);
  return out;
}

std::vector<VisitingFunction> walkers_from(const std::vector<std::string>& names, double alpha) {
  std::vector<VisitingFunction> out;
  for (const auto& n : names) out.push_back(VisitingFunction::from_name(n, alpha));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Class-aware node embeddings from diminishing random walks";

  // ValidationError and friends surface as ValueError subclasses so callers
  // can catch either.
  static py::exception<Error> base(m, "ImverdeError");
  static py::exception<ValidationError> validation(m, "ValidationError", PyExc_ValueError);
  static py::exception<ParseError> parse(m, "ParseError", PyExc_ValueError);
  static py::exception<DegenerateError> degenerate(m, "DegenerateError", PyExc_ValueError);
  static py::exception<NumericError> numeric(m, "NumericError", PyExc_ArithmeticError);
  static py::exception<IoError> io(m, "IoError", PyExc_OSError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ParseError& e) {
      py::set_error(parse, e.what());
    } catch (const ValidationError& e) {
      py::set_error(validation, e.what());
    } catch (const DegenerateError& e) {
      py::set_error(degenerate, e.what());
    } catch (const NumericError& e) {
      py::set_error(numeric, e.what());
    } catch (const IoError& e) {
      py::set_error(io, e.what());
    } catch (const Error& e) {
      py::set_error(base, e.what());
    }
  });

  py::class_<AttributedGraph>(m, "Graph")
      .def_property_readonly("num_nodes", &AttributedGraph::num_nodes)
      .def_property_readonly("num_edges", &AttributedGraph::num_edges)
      .def_property_readonly("num_classes", &AttributedGraph::num_classes)
      .def_property_readonly("directed", &AttributedGraph::directed)
      .def_property_readonly("feature_dim", &AttributedGraph::feature_dim)
      .def_property_readonly("labels", &labels_of)
      .def("edges", &edges_of, "Edges as (src, dst, weight); undirected edges appear once.")
      .def("degree", &AttributedGraph::degree, py::arg("node"))
      .def("__repr__", [](const AttributedGraph& g) {
        return "<imverde.Graph n=" + std::to_string(g.num_nodes()) + " edges=" + std::to_string(g.num_edges()) + ">";
      });

  m.def("karate_graph", &karate_fixture, "Zachary karate club with a 5-node minority class 1.");
  m.def(
      "planted_partition",
      [](const std::vector<std::size_t>& sizes, double p_in, double p_out, std::uint64_t seed) {
        return planted_partition(sizes, p_in, p_out, seed);
      },
      py::arg("sizes"), py::arg("p_in"), py::arg("p_out"), py::arg("seed"));
  m.def(
      "load_edge_list",
      [](const std::filesystem::path& path, const std::optional<std::filesystem::path>& labels, bool directed,
         bool weighted) {
        auto g = load_edge_list(path, directed, weighted);
        if (labels) load_labels(g, *labels);
        return g;
      },
      py::arg("path"), py::arg("labels") = py::none(), py::arg("directed") = false, py::arg("weighted") = false);
  m.def(
      "load_planetoid",
      [](const std::filesystem::path& dir, const std::string& name) {
        auto data = load_planetoid_format(dir, name);
        py::dict split;
        split["labeled_train"] = data.split.labeled_train;
        split["unlabeled_train"] = data.split.unlabeled_train;
        split["test"] = data.split.test;
        return py::make_tuple(std::move(data.graph), split);
      },
      py::arg("dir"), py::arg("name"), "Returns (graph, split dict).");

  m.def(
      "walk",
      [](const AttributedGraph& g, const std::string& walker, double alpha, NodeId start, std::size_t length,
         std::uint64_t seed) {
        if (start >= g.num_nodes()) throw ValidationError("start node out of range");
        Rng rng = make_rng(seed, "walk");
        return walk(build_transition(g), VisitingFunction::from_name(walker, alpha), start, length, rng);
      },
      py::arg("graph"), py::arg("walker"), py::arg("alpha") = 0.7, py::arg("start") = 0, py::arg("length") = 10,
      py::arg("seed") = 0, "One walk; walker is rw, vrrw or vdrw. The start node is included.");

  m.def(
      "purity_study",
      [](const AttributedGraph& g, const std::vector<std::string>& walkers, double alpha, std::size_t length,
         std::size_t repeats, std::uint64_t seed) {
        const auto study = purity_study(g, walkers_from(walkers, alpha), length, repeats, seed);
        std::vector<std::tuple<std::string, ClassId, double>> rows;
        for (const auto& r : study.by_class) rows.emplace_back(r.walker, r.cls, r.mean_purity);
        return rows;
      },
      py::arg("graph"), py::arg("walkers") = std::vector<std::string>{"rw", "vrrw", "vdrw"}, py::arg("alpha") = 0.7,
      py::arg("length") = 10, py::arg("repeats") = 100, py::arg("seed") = 0,
      "Mean path purity per (walker, class).");

  m.def(
      "convergence_trace",
      [](const AttributedGraph& g, const std::string& walker, double alpha, NodeId start, std::uint64_t length,
         std::uint64_t interval, std::uint64_t seed) {
        Rng rng = make_rng(seed, "trace");
        std::vector<std::pair<std::uint64_t, double>> out;
        for (const auto& p : convergence_trace(build_transition(g), VisitingFunction::from_name(walker, alpha), start,
                                               length, interval, rng)) {
          out.emplace_back(p.step, p.value);
        }
        return out;
      },
      py::arg("graph"), py::arg("walker") = "vdrw", py::arg("alpha") = 0.7, py::arg("start") = 0,
      py::arg("length") = 2000, py::arg("interval") = 100, py::arg("seed") = 0);

  m.def(
      "roc_auc",
      [](const std::vector<double>& scores, const std::vector<int>& labels) {
        const auto r = roc_auc(scores, labels);
        std::vector<std::tuple<double, double, double>> curve;
        for (const auto& p : r.curve) curve.emplace_back(p.fpr, p.tpr, p.threshold);
        return py::make_tuple(r.auc, curve);
      },
      py::arg("scores"), py::arg("labels"), "Returns (auc, [(fpr, tpr, threshold), ...]).");
  m.def(
      "average_precision",
      [](const std::vector<double>& scores, const std::vector<int>& labels) {
        return average_precision(scores, labels);
      },
      py::arg("scores"), py::arg("labels"));

  m.def(
      "train_embeddings",
      [](const std::filesystem::path& config, const std::string& variant, std::optional<std::uint64_t> seed) {
        const auto cfg = load_config(config);
        const std::uint64_t s = seed.value_or(cfg.seed);
        const Dataset data = load_dataset(cfg, s);
        auto result = [&] {
          py::gil_scoped_release release;
          return train_variant(data, VariantSpec::parse(variant), cfg, s, cfg.threads);
        }();
        if (result.report.aborted) throw NumericError(result.report.abort_reason);
        return Matrix(result.params.E);
      },
      py::arg("config"), py::arg("variant") = "vdrw-imverde", py::arg("seed") = py::none(),
      "Trains one variant from a config file and returns the n x d embedding matrix.");

  m.def(
      "run_command",
      [](const std::string& command, const std::filesystem::path& config, const std::filesystem::path& out,
         std::optional<std::uint64_t> seed, bool deterministic) {
        CommandOptions opts;
        opts.seed = seed;
        opts.out_dir = out;
        opts.deterministic = deterministic;
        const auto cfg = load_config(config);
        py::gil_scoped_release release;
        if (command == "walk-stats") return cmd_walk_stats(cfg, opts).artifacts;
        if (command == "train") return cmd_train(cfg, opts).artifacts;
        if (command == "eval") return cmd_eval(cfg, opts).artifacts;
        if (command == "sweep") return cmd_sweep(cfg, opts).artifacts;
        throw ValidationError("unknown command '" + command + "'");
      },
      py::arg("command"), py::arg("config"), py::arg("out") = "out", py::arg("seed") = py::none(),
      py::arg("deterministic") = false, "Same as the imverde tool; returns the written files relative to out.");
}
