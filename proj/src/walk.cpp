#include "imverde/walk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "imverde/error.hpp"

namespace imverde {

VisitingFunction VisitingFunction::exponential(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ValidationError("exponential visiting function needs 0 < alpha < 1, got " +
                          std::to_string(alpha));
  }
  return VisitingFunction(Kind::kExponential, alpha);
}

VisitingFunction VisitingFunction::from_name(const std::string& name, double alpha) {
  if (name == "rw" || name == "constant") return constant();
  if (name == "vrrw" || name == "linear") return linear();
  if (name == "vdrw" || name == "exponential") return exponential(alpha);
  throw ValidationError("unknown walker '" + name + "' (expected rw, vrrw or vdrw)");
}

std::string VisitingFunction::name() const {
  switch (kind_) {
    case Kind::kConstant: return "rw";
    case Kind::kLinear: return "vrrw";
    case Kind::kExponential: return "vdrw";
  }
  return "?";
}

double VisitingFunction::operator()(std::uint64_t count) const {
  switch (kind_) {
    case Kind::kConstant: return 1.0;
    case Kind::kLinear: return static_cast<double>(count) + 1.0;
    case Kind::kExponential: return std::pow(alpha_, static_cast<double>(count));
  }
  return 1.0;
}

double VisitingFunction::log_value(std::uint64_t count) const {
  switch (kind_) {
    case Kind::kConstant: return 0.0;
    case Kind::kLinear: return std::log1p(static_cast<double>(count));
    case Kind::kExponential: return static_cast<double>(count) * std::log(alpha_);
  }
  return 0.0;
}

double evaluate_visiting(const VisitingFunction& f, std::uint64_t count) { return f(count); }

// ---- VisitState ------------------------------------------------------------

void VisitState::begin_at(NodeId start) {
  if (start >= counts_.size()) throw ValidationError("start node out of range");
  ++counts_[start];
  ++total_;
  current_ = start;
}

void VisitState::record_visit(NodeId node) {
  if (node >= counts_.size()) throw ValidationError("visited node out of range");
  ++counts_[node];
  ++total_;
  ++step_;
  current_ = node;
}

void VisitState::reset() {
  std::fill(counts_.begin(), counts_.end(), 0);
  step_ = 0;
  total_ = 0;
  current_.reset();
}

void VisitState::set_counts(std::vector<std::uint64_t> counts, std::optional<NodeId> current) {
  if (counts.size() != counts_.size()) throw ValidationError("count vector has wrong length");
  counts_ = std::move(counts);
  total_ = 0;
  for (auto c : counts_) total_ += c;
  step_ = total_ > 0 ? total_ - 1 : 0;
  current_ = current;
}

// ---- stepping --------------------------------------------------------------

namespace {

NodeId require_current(const TransitionMatrix& r, const VisitState& state) {
  if (!state.current()) throw ValidationError("walker has no current node");
  const NodeId c = *state.current();
  if (c >= r.num_nodes()) throw ValidationError("current node out of range");
  return c;
}

// Unnormalized weights R_ij * f(S_j) / max_j f(S_j); computed from log f so
// long diminished walks never underflow to an all-zero row.
void step_weights(const TransitionMatrix& r, const VisitState& state, const VisitingFunction& f,
                  NodeId current, std::vector<double>& out) {
  auto targets = r.targets(current);
  auto probs = r.probs(current);
  out.assign(probs.begin(), probs.end());
  if (f.kind() == VisitingFunction::Kind::kConstant) return;

  double max_log = -std::numeric_limits<double>::infinity();
  std::vector<double> logs(targets.size());
  for (std::size_t k = 0; k < targets.size(); ++k) {
    logs[k] = f.log_value(state.count(targets[k]));
    max_log = std::max(max_log, logs[k]);
  }
  for (std::size_t k = 0; k < targets.size(); ++k) out[k] *= std::exp(logs[k] - max_log);
}

}  // namespace

std::vector<double> step_distribution(const TransitionMatrix& r, const VisitState& state,
                                      const VisitingFunction& f) {
  const NodeId current = require_current(r, state);
  std::vector<double> w;
  step_weights(r, state, f, current, w);
  if (f.kind() == VisitingFunction::Kind::kConstant) return w;
  double total = 0.0;
  for (double x : w) total += x;
  for (double& x : w) x /= total;
  return w;
}

NodeId sample_step(const TransitionMatrix& r, const VisitState& state, const VisitingFunction& f,
                   Rng& rng) {
  const NodeId current = require_current(r, state);
  thread_local std::vector<double> w;
  step_weights(r, state, f, current, w);
  double total = 0.0;
  for (double x : w) total += x;
  const double u = uniform01(rng) * total;
  auto targets = r.targets(current);
  double cumulative = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    cumulative += w[k];
    if (u < cumulative) return targets[k];
  }
  // Rounding can leave u == total; fall back to the last positive entry.
  for (std::size_t k = w.size(); k-- > 0;) {
    if (w[k] > 0.0) return targets[k];
  }
  return targets.back();
}

WalkPath walk(const TransitionMatrix& r, const VisitingFunction& f, NodeId start,
              std::size_t length, Rng& rng) {
  VisitState state(r.num_nodes());
  return walk(r, f, state, start, length, rng);
}

WalkPath walk(const TransitionMatrix& r, const VisitingFunction& f, VisitState& state,
              NodeId start, std::size_t length, Rng& rng) {
  if (start >= r.num_nodes()) throw ValidationError("start node out of range");
  WalkPath path;
  path.reserve(length + 1);
  state.begin_at(start);
  path.push_back(start);
  for (std::size_t t = 0; t < length; ++t) {
    const NodeId next = sample_step(r, state, f, rng);
    state.record_visit(next);
    path.push_back(next);
  }
  return path;
}

double path_class_purity(std::span<const NodeId> path, std::span<const ClassId> labels) {
  if (path.empty()) throw ValidationError("empty path");
  const NodeId start = path.front();
  if (start >= labels.size() || labels[start] == kNoLabel) {
    throw ValidationError("path purity needs a labeled start node");
  }
  std::size_t same = 0;
  for (NodeId v : path) same += (v < labels.size() && labels[v] == labels[start]);
  return static_cast<double>(same) / static_cast<double>(path.size());
}

}  // namespace imverde
