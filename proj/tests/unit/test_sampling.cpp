#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "imverde/error.hpp"
#include "imverde/sampling.hpp"

using namespace imverde;

namespace {

using Pair = std::pair<NodeId, NodeId>;

std::multiset<Pair> as_set(const std::vector<NodeContextPair>& ps) {
  std::multiset<Pair> out;
  for (const auto& p : ps) out.insert({p.center, p.context});
  return out;
}

// Two disjoint labeled cliques of sizes a and b.
AttributedGraph two_cliques(std::size_t a, std::size_t b) {
  const std::size_t sizes[] = {a, b};
  return planted_partition(sizes, 1.0, 0.0, 1);
}

LabeledSplit split_with(const AttributedGraph& g, std::size_t n_min, std::size_t n_maj) {
  return make_imbalanced_split(g, 0, n_min, n_maj, 0, 4);
}

}  // namespace

TEST_CASE("extract_pairs") {
  CHECK(as_set(extract_pairs(std::vector<NodeId>{7, 8}, 1)) == std::multiset<Pair>{{7, 8}, {8, 7}});
  CHECK(extract_pairs(std::vector<NodeId>{1, 2, 3}, 2).size() == 6);
  CHECK(as_set(extract_pairs(std::vector<NodeId>{4, 4, 5}, 1)) == std::multiset<Pair>{{4, 5}, {5, 4}});

  SUBCASE("matches a brute-force double loop") {
    Rng rng(8);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<NodeId> path(2 + uniform_index(rng, 15));
      for (auto& v : path) v = static_cast<NodeId>(uniform_index(rng, 5));
      const std::size_t w = 1 + uniform_index(rng, 6);
      std::multiset<Pair> expected;
      for (std::size_t i = 0; i < path.size(); ++i) {
        for (std::size_t j = 0; j < path.size(); ++j) {
          const std::size_t gap = i > j ? i - j : j - i;
          if (gap >= 1 && gap <= w && path[i] != path[j]) expected.insert({path[i], path[j]});
        }
      }
      CHECK(as_set(extract_pairs(path, w)) == expected);
    }
  }
}

TEST_CASE("negative sampler") {
  SUBCASE("degree 1 and 16 with exponent 0.75") {
    AttributedGraph g = parse_edge_list("0 1\n0 2\n0 3\n0 4\n0 5\n0 6\n0 7\n0 8\n0 9\n0 10\n0 11\n0 12\n0 13\n0 14\n0 15\n0 16\n", false, false);
    const auto s = build_negative_sampler(g, 0.75, 10);
    // node 0 has degree 16 -> 8, each leaf 1
    CHECK(s.probabilities()[0] == doctest::Approx(8.0 / 24));
    CHECK(s.probabilities()[1] == doctest::Approx(1.0 / 24));
  }
  SUBCASE("two-node weighting [1, 8] / 9") {
    const std::vector<double> p{1.0 / 9, 8.0 / 9};
    const NegativeSampler s(p, 1);
    Rng rng(2);
    int ones = 0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) ones += s.draw(rng) == 1;
    CHECK(std::abs(ones / double(draws) - 8.0 / 9) < 0.01);
  }
  SUBCASE("exponent 0 is uniform; isolated nodes count as degree 1") {
    const auto g = parse_edge_list("0 1\n1 2\n", false, false);
    AttributedGraph g4 = AttributedGraph::from_edges(4, g.edges(), false);
    const auto s = build_negative_sampler(g4, 0.0, 5);
    for (double p : s.probabilities()) CHECK(p == doctest::Approx(0.25));
    const auto d = build_negative_sampler(g4, 1.0, 5);
    CHECK(d.probabilities()[3] == doctest::Approx(1.0 / 5));
  }
  SUBCASE("sample_negatives") {
    const auto g = karate_fixture();
    const auto s = build_negative_sampler(g);
    Rng a(4), b(4);
    const auto neg = sample_negatives(s, 33, 10, a);
    CHECK(neg.size() == 10);
    for (NodeId v : neg) CHECK(v != 33);
    CHECK(neg == sample_negatives(s, 33, 10, b));
    const NegativeSampler single(std::vector<double>{1.0}, 1);
    CHECK_THROWS_AS(sample_negatives(single, 0, 1, a), ValidationError);
    CHECK_THROWS_AS(sample_negatives(s, 0, 0, a), ValidationError);
  }
}

TEST_CASE("balanced batches") {
  SUBCASE("20 minority, 120 majority, B = 256") {
    const std::size_t sizes[] = {40, 400};
    const auto g = planted_partition(sizes, 0.05, 0.01, 2);
    const auto split = make_imbalanced_split(g, 0, 20, 120, 100, 3);
    Rng rng(5);
    const auto batch = balanced_batch(split, g.labels(), 256, rng);
    CHECK(batch.size() == 256);
    std::set<NodeId> labeled(split.labeled_train.begin(), split.labeled_train.end());
    std::size_t mino = 0, majo = 0, unl = 0;
    for (NodeId v : batch) {
      if (!labeled.count(v)) {
        ++unl;
      } else if (g.label(v) == 0) {
        ++mino;
      } else {
        ++majo;
      }
    }
    CHECK(mino == 20);
    CHECK(majo == 20);
    CHECK(unl == 216);
    CHECK(std::set<NodeId>(batch.begin(), batch.end()).size() == 256);
  }
  SUBCASE("four classes sized 5, 5, 5, 200 with B = 64") {
    const std::size_t sizes[] = {10, 10, 10, 400};
    const auto g = planted_partition(sizes, 0.05, 0.005, 7);
    LabeledSplit split;
    std::map<ClassId, std::size_t> want{{0, 5}, {1, 5}, {2, 5}, {3, 200}};
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      auto& left = want[g.label(v)];
      if (left > 0) {
        split.labeled_train.push_back(v);
        --left;
      } else {
        split.unlabeled_train.push_back(v);
      }
    }
    Rng rng(1);
    const auto batch = balanced_batch(split, g.labels(), 64, rng);
    std::map<ClassId, std::size_t> got;
    std::set<NodeId> labeled(split.labeled_train.begin(), split.labeled_train.end());
    for (NodeId v : batch) got[labeled.count(v) ? g.label(v) : kNoLabel] += 1;
    CHECK(got[0] == 5);
    CHECK(got[1] == 5);
    CHECK(got[2] == 5);
    CHECK(got[3] == 5);
    CHECK(got[kNoLabel] == 44);
    CHECK_THROWS_AS(balanced_batch(split, g.labels(), 19, rng), SizeError);
  }
  SUBCASE("balanced labels are all included") {
    const auto g = two_cliques(30, 30);
    const auto split = split_with(g, 10, 10);
    Rng rng(3);
    const auto batch = balanced_labeled_batch(split, g.labels(), rng);
    auto sorted = batch;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == split.labeled_train);
  }
  SUBCASE("deterministic given the seed") {
    const auto g = two_cliques(30, 60);
    const auto split = split_with(g, 5, 20);
    Rng a(9), b(9);
    CHECK(balanced_batch(split, g.labels(), 40, a) == balanced_batch(split, g.labels(), 40, b));
  }
}

TEST_CASE("uniform batch") {
  Rng rng(1);
  const auto b = uniform_batch(10, 4, rng);
  CHECK(std::set<NodeId>(b.begin(), b.end()).size() == 4);
  CHECK(uniform_batch(3, 10, rng).size() == 3);
}

TEST_CASE("context sampling") {
  const auto g = two_cliques(6, 9);
  const auto r = build_transition(g);
  const LabelIndex labels(g.labels());

  SUBCASE("r = 0 reproduces walk()") {
    ContextConfig cfg;
    cfg.jump_prob = 0.0;
    cfg.visiting = VisitingFunction::constant();
    const auto k = karate_fixture();
    const auto rk = build_transition(k);
    const LabelIndex lk(k.labels());
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      Rng a(seed), b(seed);
      CHECK(sample_context_path(rk, lk, 3, cfg, a) == walk(rk, cfg.visiting, 3, cfg.walk_length, b));
    }
  }
  SUBCASE("disjoint labeled cliques give pure paths") {
    ContextConfig cfg;  // r = 0.2, exponential(0.7)
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      Rng rng(seed);
      const NodeId start = static_cast<NodeId>(seed % g.num_nodes());
      const auto path = sample_context_path(r, labels, start, cfg, rng);
      CHECK(path.size() == cfg.walk_length + 1);
      CHECK(path_class_purity(path, g.labels()) == 1.0);
    }
  }
  SUBCASE("jumps preserve labels") {
    const auto k = karate_fixture();
    const auto rk = build_transition(k);
    const LabelIndex lk(k.labels());
    ContextConfig cfg;
    cfg.jump_prob = 0.9;
    cfg.walk_length = 40;
    int jumps = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      Rng rng(seed);
      const auto path = sample_context_path(rk, lk, 0, cfg, rng);
      for (std::size_t i = 1; i < path.size(); ++i) {
        if (rk.at(path[i - 1], path[i]) == 0.0) {
          ++jumps;
          CHECK(k.label(path[i]) == k.label(path[i - 1]));
          CHECK(path[i] != path[i - 1]);
        }
      }
    }
    CHECK(jumps > 0);
  }
  SUBCASE("a lone labeled node falls through to the walk branch") {
    const auto line = parse_edge_list("0 1\n1 2\n", false, false);
    const std::vector<ClassId> lab{0, kNoLabel, kNoLabel};
    const LabelIndex li(lab);
    ContextConfig cfg;
    cfg.jump_prob = 0.99;
    Rng rng(1);
    const auto path = sample_context_path(build_transition(line), li, 0, cfg, rng);
    CHECK(path[1] == 1);
  }
  SUBCASE("invalid config") {
    ContextConfig cfg;
    cfg.jump_prob = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg.jump_prob = 0.1;
    cfg.window = 0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
  }
}

TEST_CASE("corpus export") {
  const std::vector<WalkPath> paths{{0, 1, 2}, {3}};
  CHECK(format_corpus(paths) == "0 1 2\n3\n");
}
