#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "imverde/error.hpp"
#include "imverde/graph.hpp"

using namespace imverde;

namespace {

std::size_t components(const AttributedGraph& g) {
  std::vector<int> seen(g.num_nodes(), 0);
  std::size_t count = 0;
  for (NodeId s = 0; s < g.num_nodes(); ++s) {
    if (seen[s]) continue;
    ++count;
    std::vector<NodeId> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      const NodeId v = stack.back();
      stack.pop_back();
      for (NodeId u : g.neighbors(v)) {
        if (!seen[u]) {
          seen[u] = 1;
          stack.push_back(u);
        }
      }
    }
  }
  return count;
}

}  // namespace

TEST_CASE("duplicate edges sum and undirected orientations merge") {
  const std::vector<WeightedEdge> edges{{0, 1, 1.0}, {1, 0, 2.0}, {1, 2, 0.5}, {1, 2, 0.5}};
  const auto g = AttributedGraph::from_edges(3, edges, false);
  CHECK(g.num_edges() == 2);
  CHECK(g.num_entries() == 4);
  const auto r = build_transition(g);
  CHECK(r.at(0, 1) == 1.0);
  CHECK(r.at(1, 0) == doctest::Approx(3.0 / 4.0).epsilon(1e-15));
  CHECK(r.at(1, 2) == doctest::Approx(1.0 / 4.0).epsilon(1e-15));
}

TEST_CASE("directed graphs keep orientation") {
  const std::vector<WeightedEdge> edges{{0, 1, 1.0}, {1, 2, 1.0}, {2, 0, 1.0}};
  const auto g = AttributedGraph::from_edges(3, edges, true);
  CHECK(g.num_entries() == 3);
  CHECK(g.neighbors(0).size() == 1);
  CHECK(g.neighbors(0)[0] == 1);
}

TEST_CASE("transition rows are stochastic and isolated nodes self-loop") {
  const std::vector<WeightedEdge> edges{{0, 1, 2.0}, {0, 2, 6.0}};
  const auto g = AttributedGraph::from_edges(4, edges, false);
  const auto r = build_transition(g);
  for (NodeId i = 0; i < 4; ++i) {
    double s = 0.0;
    for (double p : r.probs(i)) s += p;
    CHECK(std::abs(s - 1.0) <= 1e-12);
  }
  CHECK(r.at(0, 1) == doctest::Approx(0.25));
  CHECK(r.at(3, 3) == 1.0);
  CHECK(r.targets(3).size() == 1);
}

TEST_CASE("edge list parsing") {
  SUBCASE("comments, blanks and optional weights") {
    const auto g = parse_edge_list("# header\n0 1\n\n1 2 3.5\n", false, true);
    CHECK(g.num_nodes() == 3);
    CHECK(g.num_edges() == 2);
    CHECK(g.weights(2)[0] == 3.5);
  }
  SUBCASE("weights ignored for unweighted graphs") {
    const auto g = parse_edge_list("0 1 7\n", false, false);
    CHECK(g.weights(0)[0] == 1.0);
  }
  SUBCASE("errors carry the line number") {
    try {
      parse_edge_list("0 1\n0 x\n", false, false, "edges.txt");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
      CHECK(std::string(e.what()).find("edges.txt:2") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_edge_list("0 1 -2\n", false, true), ParseError);
    CHECK_THROWS_AS(parse_edge_list("0 1 0\n", false, true), ParseError);
    CHECK_THROWS_AS(parse_edge_list("-1 2\n", false, false), ParseError);
    CHECK_THROWS_AS(parse_edge_list("1 2 3 4\n", false, false), ParseError);
  }
  SUBCASE("round trip keeps weights bit-exact") {
    const std::vector<WeightedEdge> edges{{0, 1, 0.1}, {1, 2, 1.0 / 3.0}, {2, 2, 2.5}};
    const auto g = AttributedGraph::from_edges(3, edges, false);
    const auto back = parse_edge_list(format_edge_list(g), false, true);
    CHECK(back.edges().size() == g.edges().size());
    for (std::size_t i = 0; i < g.edges().size(); ++i) {
      CHECK(back.edges()[i].src == g.edges()[i].src);
      CHECK(back.edges()[i].dst == g.edges()[i].dst);
      CHECK(back.edges()[i].weight == g.edges()[i].weight);
    }
  }
}

TEST_CASE("missing files raise IoError") {
  CHECK_THROWS_AS(load_edge_list("/nonexistent/edges.txt", false, false), IoError);
}

TEST_CASE("graph json lists unlabeled nodes as null") {
  auto g = parse_edge_list("0 1\n", false, false);
  g.set_labels({0, kNoLabel}, 1);
  const auto json = graph_to_json(g);
  CHECK(json.find("null") != std::string::npos);
  CHECK(json.find("\"n\":2") != std::string::npos);
}

TEST_CASE("karate fixture") {
  const auto g = karate_fixture();
  CHECK(g.num_nodes() == 34);
  CHECK(g.num_edges() == 78);
  CHECK(g.num_classes() == 2);
  const auto minority = karate_minority_nodes();
  CHECK(std::vector<NodeId>(minority.begin(), minority.end()) == std::vector<NodeId>{4, 5, 6, 10, 16});
  CHECK(g.nodes_of_class(1).size() == 5);
  CHECK(g.nodes_of_class(0).size() == 29);
  CHECK(components(g) == 1);
  // Node 34 (1-based) is the hub with degree 17.
  CHECK(g.degree(33) == 17);
}

TEST_CASE("imbalanced split") {
  const std::size_t sizes[] = {30, 100, 70};
  const auto g = planted_partition(sizes, 0.2, 0.01, 5);
  const auto s = make_imbalanced_split(g, 0, 20, 120, 50, 9);
  CHECK(s.labeled_train.size() == 140);
  CHECK(s.test.size() == 50);
  CHECK(s.unlabeled_train.size() == 200 - 140 - 50);
  std::size_t minority = 0, c1 = 0, c2 = 0;
  for (NodeId v : s.labeled_train) {
    minority += g.label(v) == 0;
    c1 += g.label(v) == 1;
    c2 += g.label(v) == 2;
  }
  CHECK(minority == 20);
  // Proportional allocation of 120 over class sizes 100 : 70.
  CHECK(c1 == 71);
  CHECK(c2 == 49);
  std::set<NodeId> all(s.labeled_train.begin(), s.labeled_train.end());
  all.insert(s.test.begin(), s.test.end());
  all.insert(s.unlabeled_train.begin(), s.unlabeled_train.end());
  CHECK(all.size() == 200);
  const auto again = make_imbalanced_split(g, 0, 20, 120, 50, 9);
  CHECK(again.labeled_train == s.labeled_train);
  CHECK(again.test == s.test);
  CHECK_THROWS_AS(make_imbalanced_split(g, 0, 31, 10, 10, 1), SizeError);
  try {
    make_imbalanced_split(g, 0, 31, 10, 10, 1);
  } catch (const SizeError& e) {
    CHECK(std::string(e.what()).find("class 0") != std::string::npos);
  }
  const auto visible = s.visible_labels(g);
  for (NodeId v : s.test) CHECK(visible[v] == kNoLabel);
}

TEST_CASE("planted partition") {
  SUBCASE("extreme probabilities give disjoint cliques") {
    const std::size_t sizes[] = {10, 50};
    const auto g = planted_partition(sizes, 1.0, 0.0, 3);
    CHECK(g.num_edges() == 10 * 9 / 2 + 50 * 49 / 2);
    CHECK(components(g) == 2);
    CHECK(g.feature_dim() == 2);
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      for (NodeId u : g.neighbors(v)) CHECK(g.label(u) == g.label(v));
    }
  }
  SUBCASE("inter-class edge count matches its expectation") {
    const std::size_t sizes[] = {20, 200};
    double sum = 0.0;
    const int runs = 100;
    for (int seed = 0; seed < runs; ++seed) {
      const auto g = planted_partition(sizes, 0.2, 0.01, static_cast<std::uint64_t>(seed));
      std::size_t inter = 0;
      for (const auto& e : g.edges()) inter += g.label(e.src) != g.label(e.dst);
      sum += static_cast<double>(inter);
    }
    // Binomial(4000, 0.01): mean 40, sd of the mean of 100 runs ~0.63.
    const double sd = std::sqrt(4000 * 0.01 * 0.99 / runs);
    CHECK(std::abs(sum / runs - 40.0) < 3 * sd);
  }
  SUBCASE("determinism and validation") {
    const std::size_t sizes[] = {5, 7};
    CHECK(planted_partition(sizes, 0.5, 0.1, 1).edges().size() ==
          planted_partition(sizes, 0.5, 0.1, 1).edges().size());
    CHECK_THROWS_AS(planted_partition(sizes, 0.1, 0.5, 1), ValidationError);
    CHECK_THROWS_AS(planted_partition(std::span<const std::size_t>{}, 0.5, 0.1, 1), ValidationError);
  }
}

TEST_CASE("planetoid loader on the bundled fixture") {
  const std::filesystem::path dir = std::filesystem::path(IMVERDE_TEST_DATA) / "planetoid";
  const auto data = load_planetoid_format(dir, "tiny");
  const auto& g = data.graph;
  CHECK(g.num_nodes() == 12);
  CHECK(g.num_classes() == 3);
  CHECK(g.feature_dim() == 5);
  for (NodeId v = 0; v < 12; ++v) CHECK(g.label(v) == static_cast<ClassId>(v % 3));
  // Ring of 12 plus the chord 0-6 plus a self-loop on 1; the repeated 2-3 collapses.
  CHECK(g.num_edges() == 14);
  CHECK(data.split.labeled_train == std::vector<NodeId>{0, 1, 2});
  CHECK(data.split.test == std::vector<NodeId>{8, 9, 10, 11});
  CHECK(data.split.unlabeled_train == std::vector<NodeId>{3, 4, 5, 6, 7});
  // Feature row of node 9 (stored as the 4th tx row) is e_4 + 0.5 e_1.
  const auto f = g.features(9);
  REQUIRE(f.size() == 2);
  CHECK(f[0].index == 1);
  CHECK(f[0].value == 0.5);
  CHECK(f[1].index == 4);
  CHECK(f[1].value == 1.0);
  CHECK_THROWS_AS(load_planetoid_format(dir, "absent"), IoError);
}
