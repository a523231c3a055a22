#include "imverde/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "imverde/error.hpp"

namespace imverde {
namespace {

void check_length(const TransitionMatrix& r, std::span<const double> v) {
  if (v.size() != r.num_nodes()) throw ValidationError("vector length does not match R");
}

}  // namespace

std::vector<double> occupancy_vector(const VisitState& state, const VisitingFunction& f) {
  const std::size_t n = state.num_nodes();
  if (n == 0) throw ValidationError("occupancy of an empty state");
  std::vector<double> logs(n);
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    logs[i] = f.log_value(state.count(static_cast<NodeId>(i)));
    max_log = std::max(max_log, logs[i]);
  }
  double total = 0.0;
  for (double& x : logs) {
    x = std::exp(x - max_log);
    total += x;
  }
  for (double& x : logs) x /= total;
  return logs;
}

double h_energy(const TransitionMatrix& r, std::span<const double> v) {
  check_length(r, v);
  double h = 0.0;
  for (NodeId i = 0; i < r.num_nodes(); ++i) {
    auto t = r.targets(i);
    auto p = r.probs(i);
    double row = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) row += p[k] * v[t[k]];
    h += v[i] * row;
  }
  return h;
}

bool InducedChain::all_rows_defined() const {
  return std::all_of(row_defined.begin(), row_defined.end(), [](char c) { return c != 0; });
}

InducedChain markov_matrix(const TransitionMatrix& r, std::span<const double> v) {
  check_length(r, v);
  InducedChain m;
  const std::size_t n = r.num_nodes();
  m.offsets.assign(n + 1, 0);
  m.row_defined.assign(n, 0);
  for (NodeId i = 0; i < n; ++i) {
    auto t = r.targets(i);
    auto p = r.probs(i);
    double denom = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) denom += p[k] * v[t[k]];
    const bool defined = denom > 0.0;
    m.row_defined[i] = defined ? 1 : 0;
    for (std::size_t k = 0; k < t.size(); ++k) {
      m.targets.push_back(t[k]);
      m.probs.push_back(defined ? p[k] * v[t[k]] / denom : 0.0);
    }
    m.offsets[i + 1] = m.targets.size();
  }
  return m;
}

std::vector<double> pi_map(const TransitionMatrix& r, std::span<const double> v, double tolerance) {
  check_length(r, v);
  const std::size_t n = r.num_nodes();
  std::vector<double> out(n, 0.0);
  double h = 0.0;
  for (NodeId i = 0; i < n; ++i) {
    auto t = r.targets(i);
    auto p = r.probs(i);
    double row = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) row += p[k] * v[t[k]];
    out[i] = v[i] * row;
    h += out[i];
  }
  if (!(h > tolerance)) throw DegenerateError("H(v) is zero; pi(v) is undefined");
  for (double& x : out) x /= h;
  return out;
}

double fixed_point_residual(const TransitionMatrix& r, std::span<const double> v, double tolerance) {
  const auto p = pi_map(r, v, tolerance);
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += (p[i] - v[i]) * (p[i] - v[i]);
  return std::sqrt(s);
}

std::vector<TracePoint> convergence_trace(const TransitionMatrix& r, const VisitingFunction& f,
                                          NodeId start, std::uint64_t length,
                                          std::uint64_t interval, Rng& rng) {
  if (interval < 1 || length < 2 * interval) {
    throw ValidationError("convergence trace needs length >= 2 * interval >= 2");
  }
  const std::size_t n = r.num_nodes();
  VisitState state(n);
  state.begin_at(start);
  std::vector<double> previous;
  std::vector<TracePoint> trace;
  auto occupation = [&] {
    std::vector<double> p(n);
    const double total = static_cast<double>(state.total_visits());
    for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<double>(state.count(static_cast<NodeId>(i))) / total;
    return p;
  };
  for (std::uint64_t t = 1; t <= length; ++t) {
    state.record_visit(sample_step(r, state, f, rng));
    if (t % interval != 0) continue;
    auto current = occupation();
    if (!previous.empty()) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += (current[i] - previous[i]) * (current[i] - previous[i]);
      trace.push_back({t, std::sqrt(s)});
    }
    previous = std::move(current);
  }
  return trace;
}

}  // namespace imverde
