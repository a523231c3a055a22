#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "imverde/detail/pickle.hpp"
#include "imverde/error.hpp"
#include "imverde/graph.hpp"

namespace imverde {
namespace {

std::string read_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("missing dataset file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

pickle::ValuePtr load_pickle(const std::filesystem::path& path) {
  return pickle::load(read_binary(path), path.string());
}

using FeatureRow = std::vector<FeatureEntry>;

std::vector<FeatureRow> csr_rows(const pickle::CsrMatrix& m) {
  std::vector<FeatureRow> rows(m.rows);
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (auto k = m.indptr[r]; k < m.indptr[r + 1]; ++k) {
      const auto idx = static_cast<std::size_t>(k);
      if (m.values[idx] != 0.0) {
        rows[r].push_back({static_cast<std::uint32_t>(m.indices[idx]), m.values[idx]});
      }
    }
    std::sort(rows[r].begin(), rows[r].end(),
              [](const FeatureEntry& a, const FeatureEntry& b) { return a.index < b.index; });
  }
  return rows;
}

// Argmax of each one-hot row; all-zero rows are unlabeled.
std::vector<ClassId> onehot_labels(const pickle::NdArray& a) {
  if (a.shape.size() != 2) throw ValidationError("label matrix must be 2-D");
  std::vector<ClassId> out(a.shape[0], kNoLabel);
  for (std::size_t r = 0; r < a.shape[0]; ++r) {
    double best = 0.0;
    for (std::size_t c = 0; c < a.shape[1]; ++c) {
      const double v = a.at(r, c);
      if (v > best) {
        best = v;
        out[r] = static_cast<ClassId>(c);
      }
    }
  }
  return out;
}

}  // namespace

PlanetoidDataset load_planetoid_format(const std::filesystem::path& dir, const std::string& name) {
  auto file = [&](const std::string& suffix) { return dir / ("ind." + name + "." + suffix); };

  const auto y = pickle::as_ndarray(*load_pickle(file("y")));
  const auto allx = csr_rows(pickle::as_csr(*load_pickle(file("allx"))));
  const auto tx_matrix = pickle::as_csr(*load_pickle(file("tx")));
  const auto tx = csr_rows(tx_matrix);
  const auto ally = onehot_labels(pickle::as_ndarray(*load_pickle(file("ally"))));
  const auto ty_array = pickle::as_ndarray(*load_pickle(file("ty")));
  const auto ty = onehot_labels(ty_array);
  const auto adjacency = pickle::as_int_adjacency(*load_pickle(file("graph")));
  // ind.<name>.x only duplicates the first rows of allx; read it so a missing
  // or corrupt file is reported like the others.
  const auto x = pickle::as_csr(*load_pickle(file("x")));

  std::vector<std::int64_t> test_order;
  {
    std::ifstream in(file("test.index"));
    if (!in) throw IoError("missing dataset file " + file("test.index").string());
    std::int64_t idx;
    while (in >> idx) test_order.push_back(idx);
  }
  if (test_order.empty()) throw ValidationError("empty test index for " + name);
  if (tx.size() != test_order.size() || ty.size() != test_order.size()) {
    throw ValidationError("test feature/label rows do not match the test index");
  }
  const std::size_t num_classes = ty_array.shape.at(1);
  const std::size_t feature_dim = tx_matrix.cols;
  if (x.cols != feature_dim) throw ValidationError("feature dimensions disagree");
  if (allx.size() != ally.size()) throw ValidationError("allx and ally row counts differ");

  std::vector<std::int64_t> sorted = test_order;
  std::sort(sorted.begin(), sorted.end());
  const std::int64_t lo = sorted.front();
  const std::int64_t hi = sorted.back();
  if (lo < 0) throw ValidationError("negative test index");
  // Test ids may skip isolated nodes (Citeseer); the gaps become empty rows.
  const auto test_block = static_cast<std::size_t>(hi - lo + 1);
  const std::size_t base = allx.size();

  std::vector<FeatureRow> stacked_x(allx);
  std::vector<ClassId> stacked_y(ally);
  stacked_x.resize(base + test_block);
  stacked_y.resize(base + test_block, kNoLabel);
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    const auto row = base + static_cast<std::size_t>(sorted[k] - lo);
    stacked_x[row] = tx[k];
    stacked_y[row] = ty[k];
  }
  const std::size_t n = stacked_x.size();

  std::vector<FeatureRow> features = stacked_x;
  std::vector<ClassId> labels = stacked_y;
  for (std::size_t k = 0; k < test_order.size(); ++k) {
    const auto dst = static_cast<std::size_t>(test_order[k]);
    const auto src = static_cast<std::size_t>(sorted[k]);
    if (dst >= n || src >= n) throw ValidationError("test index out of range");
    features[dst] = stacked_x[src];
    labels[dst] = stacked_y[src];
  }

  std::set<std::pair<NodeId, NodeId>> pairs;
  for (const auto& [node, nbrs] : adjacency) {
    for (auto other : nbrs) {
      if (node < 0 || other < 0 || static_cast<std::size_t>(node) >= n ||
          static_cast<std::size_t>(other) >= n) {
        throw ValidationError("graph node index out of range in " + file("graph").string());
      }
      const auto a = static_cast<NodeId>(std::min(node, other));
      const auto b = static_cast<NodeId>(std::max(node, other));
      pairs.emplace(a, b);
    }
  }
  std::vector<WeightedEdge> edges;
  edges.reserve(pairs.size());
  for (const auto& [a, b] : pairs) edges.push_back({a, b, 1.0});

  PlanetoidDataset ds;
  ds.graph = AttributedGraph::from_edges(n, edges, /*directed=*/false);
  ds.graph.set_labels(std::move(labels), static_cast<int>(num_classes));
  ds.graph.set_features(feature_dim, std::move(features));

  const std::size_t num_train = y.shape.at(0);
  if (num_train > base) throw ValidationError("more training labels than allx rows");
  std::vector<char> role(n, 0);
  for (std::size_t v = 0; v < num_train; ++v) {
    if (ds.graph.labeled(static_cast<NodeId>(v))) {
      ds.split.labeled_train.push_back(static_cast<NodeId>(v));
      role[v] = 1;
    }
  }
  for (auto t : sorted) {
    const auto v = static_cast<NodeId>(t);
    if (!role[v]) {
      ds.split.test.push_back(v);
      role[v] = 2;
    }
  }
  for (NodeId v = 0; v < n; ++v) {
    if (!role[v]) ds.split.unlabeled_train.push_back(v);
  }

  std::vector<std::size_t> counts(num_classes, 0);
  for (NodeId v : ds.split.labeled_train) ++counts[static_cast<std::size_t>(ds.graph.label(v))];
  ds.split.minority_class = static_cast<ClassId>(
      std::min_element(counts.begin(), counts.end()) - counts.begin());
  ds.split.validate(ds.graph);
  return ds;
}

}  // namespace imverde
