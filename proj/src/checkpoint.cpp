#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "imverde/error.hpp"
#include "imverde/train.hpp"

namespace imverde {

using nlohmann::json;

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return buf.str();
}

// ---- embeddings ------------------------------------------------------------

std::string format_embeddings(const Matrix& embeddings) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < embeddings.rows(); ++i) {
    out << i;
    for (Eigen::Index j = 0; j < embeddings.cols(); ++j) out << ' ' << embeddings(i, j);
    out << '\n';
  }
  return out.str();
}

void save_embeddings(const Matrix& embeddings, const std::filesystem::path& path) {
  write_text_file(path, format_embeddings(embeddings));
}

Matrix parse_embeddings(const std::string& text, const std::string& source) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    std::size_t id = 0;
    if (!(ls >> id)) throw ParseError(source, line_no, "expected a node id");
    if (id != rows.size()) throw ParseError(source, line_no, "node ids must be 0..n-1 in order");
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
        throw ParseError(source, line_no, "bad value '" + tok + "'");
      }
      row.push_back(v);
    }
    if (row.empty()) throw ParseError(source, line_no, "row has no values");
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(source, line_no, "inconsistent embedding width");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(source, line_no, "no embeddings");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return m;
}

Matrix load_embeddings(const std::filesystem::path& path) {
  return parse_embeddings(read_text_file(path), path.string());
}

// ---- checkpoint ------------------------------------------------------------

namespace {

constexpr int kCheckpointVersion = 1;

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(rows)}};
}

Matrix matrix_from(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != rows) throw ValidationError("matrix row count mismatch");
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = data.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != cols) throw ValidationError("matrix column count mismatch");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
  }
  return m;
}

json layer_json(const DenseLayer& l) {
  return {{"weight", matrix_json(l.weight)}, {"bias", std::vector<double>(l.bias.begin(), l.bias.end())}};
}

DenseLayer layer_from(const json& j) {
  DenseLayer l;
  l.weight = matrix_from(j.at("weight"));
  const auto b = j.at("bias").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(b.size()) != l.weight.rows()) throw ValidationError("bias length mismatch");
  l.bias = Eigen::Map<const Vector>(b.data(), static_cast<Eigen::Index>(b.size()));
  return l;
}

json head_json(const std::vector<DenseLayer>& head) {
  json out = json::array();
  for (const auto& l : head) out.push_back(layer_json(l));
  return out;
}

std::vector<DenseLayer> head_from(const json& j) {
  std::vector<DenseLayer> head;
  for (const auto& l : j) head.push_back(layer_from(l));
  return head;
}

json hyper_json(const Hyper& h) {
  return {{"d", h.dim},           {"k", h.negatives},        {"lambda", h.lambda},
          {"lr_unsup", h.lr_unsup}, {"lr_sup", h.lr_sup},    {"T1", h.iters_unsup},
          {"T2", h.iters_sup},    {"batch_size", h.batch_size}, {"hidden_x", h.hidden_x},
          {"hidden_e", h.hidden_e}, {"neg_exponent", h.neg_exponent}, {"rounds", h.rounds},
          {"balanced_batches", h.balanced_batches}};
}

Hyper hyper_from(const json& j) {
  Hyper h;
  h.dim = j.at("d").get<std::size_t>();
  h.negatives = j.at("k").get<std::size_t>();
  h.lambda = j.at("lambda").get<double>();
  h.lr_unsup = j.at("lr_unsup").get<double>();
  h.lr_sup = j.at("lr_sup").get<double>();
  h.iters_unsup = j.at("T1").get<std::size_t>();
  h.iters_sup = j.at("T2").get<std::size_t>();
  h.batch_size = j.at("batch_size").get<std::size_t>();
  h.hidden_x = j.at("hidden_x").get<std::vector<std::size_t>>();
  h.hidden_e = j.at("hidden_e").get<std::vector<std::size_t>>();
  h.neg_exponent = j.at("neg_exponent").get<double>();
  h.rounds = j.at("rounds").get<std::size_t>();
  h.balanced_batches = j.at("balanced_batches").get<bool>();
  return h;
}

}  // namespace

std::string checkpoint_to_json(const ModelParams& p) {
  json j = {{"format", "imverde-model"},
            {"version", kCheckpointVersion},
            {"num_nodes", p.num_nodes()},
            {"dim", p.dim()},
            {"feature_dim", p.feature_dim},
            {"num_classes", p.num_classes},
            {"hyper", hyper_json(p.hyper)},
            {"E", matrix_json(p.E)},
            {"W", matrix_json(p.W)},
            {"ffn_x", head_json(p.ffn_x)},
            {"ffn_e", head_json(p.ffn_e)},
            {"out", layer_json(p.out)}};
  return j.dump() + "\n";
}

ModelParams checkpoint_from_json(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(source, 0, e.what());
  }
  try {
    if (j.at("format") != "imverde-model") throw ValidationError(source + ": not a model checkpoint");
    if (j.at("version") != kCheckpointVersion) {
      throw ValidationError(source + ": unsupported checkpoint version " + j.at("version").dump());
    }
    ModelParams p;
    p.hyper = hyper_from(j.at("hyper"));
    p.feature_dim = j.at("feature_dim").get<std::size_t>();
    p.num_classes = j.at("num_classes").get<std::size_t>();
    p.E = matrix_from(j.at("E"));
    p.W = matrix_from(j.at("W"));
    p.ffn_x = head_from(j.at("ffn_x"));
    p.ffn_e = head_from(j.at("ffn_e"));
    p.out = layer_from(j.at("out"));
    if (p.E.rows() != p.W.rows() || p.E.cols() != p.W.cols()) throw ValidationError(source + ": E/W shape mismatch");
    if (p.out.out_dim() != p.num_classes) throw ValidationError(source + ": output layer does not match num_classes");
    return p;
  } catch (const json::exception& e) {
    throw ValidationError(source + ": malformed checkpoint: " + e.what());
  }
}

void save_checkpoint(const ModelParams& params, const std::filesystem::path& path) {
  write_text_file(path, checkpoint_to_json(params));
}

ModelParams load_checkpoint(const std::filesystem::path& path) {
  return checkpoint_from_json(read_text_file(path), path.string());
}

std::string format_report(const TrainReport& report) {
  std::string out;
  for (const auto& r : report.losses) {
    out += nlohmann::ordered_json{{"phase", r.phase}, {"iter", r.iteration}, {"loss", r.loss}}.dump();
    out += '\n';
  }
  return out;
}

}  // namespace imverde
