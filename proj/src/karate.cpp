#include <array>

#include "imverde/graph.hpp"

namespace imverde {
namespace {

// Zachary (1977), 1-based member ids.
constexpr std::array<std::pair<int, int>, 78> kKarateEdges = {{
    {1, 2},   {1, 3},   {1, 4},   {1, 5},   {1, 6},   {1, 7},   {1, 8},   {1, 9},
    {1, 11},  {1, 12},  {1, 13},  {1, 14},  {1, 18},  {1, 20},  {1, 22},  {1, 32},
    {2, 3},   {2, 4},   {2, 8},   {2, 14},  {2, 18},  {2, 20},  {2, 22},  {2, 31},
    {3, 4},   {3, 8},   {3, 9},   {3, 10},  {3, 14},  {3, 28},  {3, 29},  {3, 33},
    {4, 8},   {4, 13},  {4, 14},  {5, 7},   {5, 11},  {6, 7},   {6, 11},  {6, 17},
    {7, 17},  {9, 31},  {9, 33},  {9, 34},  {10, 34}, {14, 34}, {15, 33}, {15, 34},
    {16, 33}, {16, 34}, {19, 33}, {19, 34}, {20, 34}, {21, 33}, {21, 34}, {23, 33},
    {23, 34}, {24, 26}, {24, 28}, {24, 30}, {24, 33}, {24, 34}, {25, 26}, {25, 28},
    {25, 32}, {26, 32}, {27, 30}, {27, 34}, {28, 34}, {29, 32}, {29, 34}, {30, 33},
    {30, 34}, {31, 33}, {31, 34}, {32, 33}, {32, 34}, {33, 34},
}};

// Members 5, 6, 7, 11 and 17: the connected satellite group hanging off the
// instructor (member 1). All five belong to the instructor's faction.
constexpr std::array<NodeId, 5> kMinority = {4, 5, 6, 10, 16};

}  // namespace

std::span<const NodeId> karate_minority_nodes() { return kMinority; }

AttributedGraph karate_fixture() {
  std::vector<WeightedEdge> edges;
  edges.reserve(kKarateEdges.size());
  for (const auto& [a, b] : kKarateEdges) {
    edges.push_back({static_cast<NodeId>(a - 1), static_cast<NodeId>(b - 1), 1.0});
  }
  auto graph = AttributedGraph::from_edges(34, edges, /*directed=*/false);
  std::vector<ClassId> labels(34, 0);
  for (NodeId v : kMinority) labels[v] = 1;
  graph.set_labels(std::move(labels), 2);
  return graph;
}

}  // namespace imverde
