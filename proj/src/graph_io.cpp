#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "imverde/error.hpp"
#include "imverde/graph.hpp"

namespace imverde {
namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view token, T& out) {
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

template <typename Fn>
void for_each_line(const std::string& text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    ++line_no;
    std::string_view line(text.data() + pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto tokens = split_ws(line);
    if (!tokens.empty() && tokens[0].front() != '#') fn(line_no, tokens);
    pos = end + 1;
  }
}

}  // namespace

AttributedGraph parse_edge_list(const std::string& text, bool directed, bool weighted,
                                const std::string& source) {
  std::vector<WeightedEdge> edges;
  std::size_t n = 0;
  for_each_line(text, [&](std::size_t line_no, const std::vector<std::string_view>& tok) {
    if (tok.size() < 2 || tok.size() > 3) {
      throw ParseError(source, line_no, "expected 'src dst [weight]'");
    }
    std::uint64_t src = 0, dst = 0;
    if (!parse_number(tok[0], src) || !parse_number(tok[1], dst)) {
      throw ParseError(source, line_no, "node ids must be non-negative integers");
    }
    if (src >= std::numeric_limits<NodeId>::max() || dst >= std::numeric_limits<NodeId>::max()) {
      throw ParseError(source, line_no, "node id too large");
    }
    double w = 1.0;
    if (tok.size() == 3 && weighted) {
      if (!parse_number(tok[2], w) || !std::isfinite(w)) {
        throw ParseError(source, line_no, "weight is not a number");
      }
      if (w <= 0.0) throw ParseError(source, line_no, "weight must be positive");
    }
    edges.push_back({static_cast<NodeId>(src), static_cast<NodeId>(dst), w});
    n = std::max<std::size_t>(n, std::max(src, dst) + 1);
  });
  if (n == 0) throw ParseError(source, 1, "edge list is empty");
  return AttributedGraph::from_edges(n, edges, directed);
}

AttributedGraph load_edge_list(const std::filesystem::path& path, bool directed, bool weighted) {
  return parse_edge_list(read_file(path), directed, weighted, path.string());
}

std::string format_edge_list(const AttributedGraph& graph) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (const auto& e : graph.edges()) out << e.src << ' ' << e.dst << ' ' << e.weight << '\n';
  return out.str();
}

void save_edge_list(const AttributedGraph& graph, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << format_edge_list(graph);
  if (!out) throw IoError("write failed for " + path.string());
}

void load_labels(AttributedGraph& graph, const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::vector<ClassId> labels(graph.num_nodes(), kNoLabel);
  ClassId max_label = -1;
  for_each_line(text, [&](std::size_t line_no, const std::vector<std::string_view>& tok) {
    std::uint64_t node = 0;
    std::int64_t label = 0;
    if (tok.size() != 2 || !parse_number(tok[0], node) || !parse_number(tok[1], label) ||
        label < 0) {
      throw ParseError(path.string(), line_no, "expected 'node label'");
    }
    if (node >= graph.num_nodes()) throw ParseError(path.string(), line_no, "node out of range");
    labels[node] = static_cast<ClassId>(label);
    max_label = std::max<ClassId>(max_label, static_cast<ClassId>(label));
  });
  graph.set_labels(std::move(labels), max_label + 1);
}

std::string graph_to_json(const AttributedGraph& graph) {
  nlohmann::json j;
  j["n"] = graph.num_nodes();
  j["directed"] = graph.directed();
  auto edges = nlohmann::json::array();
  for (const auto& e : graph.edges()) edges.push_back({e.src, e.dst, e.weight});
  j["edges"] = std::move(edges);
  auto labels = nlohmann::json::array();
  for (NodeId v = 0; v < graph.num_nodes(); ++v) {
    if (graph.labeled(v)) {
      labels.push_back(graph.label(v));
    } else {
      labels.push_back(nullptr);
    }
  }
  j["labels"] = std::move(labels);
  return j.dump();
}

}  // namespace imverde
