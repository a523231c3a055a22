#include <doctest.h>

#include <cmath>

#include "imverde/error.hpp"
#include "imverde/graph.hpp"
#include "imverde/walk.hpp"

using namespace imverde;

namespace {

// Star around node 0 with edge weights 1, 2, 3 to nodes 1, 2, 3.
TransitionMatrix star() {
  const std::vector<WeightedEdge> edges{{0, 1, 1.0}, {0, 2, 2.0}, {0, 3, 3.0}};
  return build_transition(AttributedGraph::from_edges(4, edges, false));
}

VisitState state_with(std::vector<std::uint64_t> counts, NodeId current) {
  VisitState s(counts.size());
  s.set_counts(std::move(counts), current);
  return s;
}

}  // namespace

TEST_CASE("visiting functions") {
  CHECK(VisitingFunction::constant()(7) == 1.0);
  CHECK(VisitingFunction::linear()(0) == 1.0);
  CHECK(VisitingFunction::linear()(4) == 5.0);
  const auto f = VisitingFunction::exponential(0.5);
  CHECK(f(3) == 0.125);
  // 0.7^2000 underflows, its log does not.
  const auto g = VisitingFunction::exponential(0.7);
  CHECK(std::isfinite(g.log_value(2000)));
  CHECK(g.log_value(2000) == doctest::Approx(2000 * std::log(0.7)));
  CHECK_THROWS_AS(VisitingFunction::exponential(1.0), ValidationError);
  CHECK_THROWS_AS(VisitingFunction::exponential(0.0), ValidationError);
  CHECK_THROWS_AS(VisitingFunction::from_name("lazy", 0.5), ValidationError);
  CHECK(VisitingFunction::from_name("vdrw", 0.7).kind() == VisitingFunction::Kind::kExponential);
}

TEST_CASE("visit counting convention") {
  VisitState s(3);
  s.begin_at(1);
  CHECK(s.total_visits() == 1);
  CHECK(s.step() == 0);
  s.record_visit(2);
  s.record_visit(1);
  CHECK(s.count(1) == 2);
  CHECK(s.total_visits() == 3);
  CHECK(s.step() == 2);
  CHECK(*s.current() == 1);
}

TEST_CASE("step distribution oracles") {
  const auto r = star();
  const auto s = state_with({1, 2, 0, 3}, 0);
  SUBCASE("constant f returns the R row exactly") {
    const auto p = step_distribution(r, s, VisitingFunction::constant());
    const auto row = r.probs(0);
    REQUIRE(p.size() == row.size());
    for (std::size_t k = 0; k < p.size(); ++k) CHECK(p[k] == row[k]);
  }
  SUBCASE("linear f") {
    // weights (1/6)(3), (2/6)(1), (3/6)(4) -> 3/17, 2/17, 12/17
    const auto p = step_distribution(r, s, VisitingFunction::linear());
    CHECK(p[0] == doctest::Approx(3.0 / 17).epsilon(1e-14));
    CHECK(p[1] == doctest::Approx(2.0 / 17).epsilon(1e-14));
    CHECK(p[2] == doctest::Approx(12.0 / 17).epsilon(1e-14));
  }
  SUBCASE("exponential f") {
    // weights (1/6)(1/4), (2/6)(1), (3/6)(1/8) -> 2/21, 16/21, 3/21
    const auto p = step_distribution(r, s, VisitingFunction::exponential(0.5));
    CHECK(p[0] == doctest::Approx(2.0 / 21).epsilon(1e-14));
    CHECK(p[1] == doctest::Approx(16.0 / 21).epsilon(1e-14));
    CHECK(p[2] == doctest::Approx(3.0 / 21).epsilon(1e-14));
  }
  SUBCASE("huge counts stay well defined") {
    const auto big = state_with({0, 5000, 5000, 5001}, 0);
    const auto p = step_distribution(r, big, VisitingFunction::exponential(0.7));
    double sum = 0.0;
    for (double x : p) sum += x;
    CHECK(sum == doctest::Approx(1.0));
    CHECK(p[0] > 0.0);
  }
  SUBCASE("walker without a position") {
    VisitState empty(4);
    CHECK_THROWS_AS(step_distribution(r, empty, VisitingFunction::constant()), ValidationError);
  }
}

TEST_CASE("sampled steps follow the distribution") {
  const auto r = star();
  const auto s = state_with({1, 2, 0, 3}, 0);
  const auto f = VisitingFunction::exponential(0.5);
  const auto p = step_distribution(r, s, f);
  Rng rng(17);
  std::vector<double> freq(4, 0.0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) freq[sample_step(r, s, f, rng)] += 1.0 / draws;
  for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(freq[k + 1] - p[k]) < 0.01);
}

TEST_CASE("walks") {
  const auto g = karate_fixture();
  const auto r = build_transition(g);
  Rng rng(3);
  const auto path = walk(r, VisitingFunction::exponential(0.7), 0, 10, rng);
  CHECK(path.size() == 11);
  CHECK(path.front() == 0);
  for (std::size_t i = 1; i < path.size(); ++i) CHECK(r.at(path[i - 1], path[i]) > 0.0);

  SUBCASE("persistent state keeps counting across walks") {
    VisitState state(g.num_nodes());
    Rng a(5);
    walk(r, VisitingFunction::exponential(0.7), state, 0, 10, a);
    walk(r, VisitingFunction::exponential(0.7), state, 1, 10, a);
    CHECK(state.total_visits() == 22);
  }
  SUBCASE("same seed, same path") {
    Rng a(11), b(11);
    CHECK(walk(r, VisitingFunction::linear(), 5, 20, a) == walk(r, VisitingFunction::linear(), 5, 20, b));
  }
  CHECK_THROWS_AS(walk(r, VisitingFunction::constant(), 34, 3, rng), ValidationError);
}

TEST_CASE("path class purity") {
  const std::vector<ClassId> labels{0, 0, 1, kNoLabel};
  const std::vector<NodeId> path{0, 1, 2, 1};
  CHECK(path_class_purity(path, labels) == 0.75);
  const std::vector<NodeId> from_unlabeled{3, 0};
  CHECK_THROWS_AS(path_class_purity(from_unlabeled, labels), ValidationError);
}
