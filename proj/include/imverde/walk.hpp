#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "imverde/graph.hpp"
#include "imverde/rng.hpp"

namespace imverde {

/// Reweighting rule f applied to a node's visit count.
///
///   Constant        f(s) = 1          plain random walk
///   Linear          f(s) = s + 1      vertex-reinforced walk (VRRW)
///   Exponential(a)  f(s) = a^s        vertex-diminished walk (VDRW), 0 < a < 1
class VisitingFunction {
 public:
  enum class Kind { kConstant, kLinear, kExponential };

  static VisitingFunction constant() { return VisitingFunction(Kind::kConstant, 1.0); }
  static VisitingFunction linear() { return VisitingFunction(Kind::kLinear, 1.0); }
  /// Throws ValidationError unless 0 < alpha < 1.
  static VisitingFunction exponential(double alpha);
  /// "rw", "vrrw" or "vdrw".
  static VisitingFunction from_name(const std::string& name, double alpha);

  Kind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  std::string name() const;

  double operator()(std::uint64_t count) const;
  /// log f(count), finite for every count.
  double log_value(std::uint64_t count) const;

 private:
  VisitingFunction(Kind kind, double alpha) : kind_(kind), alpha_(alpha) {}

  Kind kind_;
  double alpha_;
};

double evaluate_visiting(const VisitingFunction& f, std::uint64_t count);

/// Visit counts S, step counter t and current position of one walker.
///
/// Counting convention: the start node is recorded as visited when the walk
/// begins, so after begin_at() and k record_visit() calls sum(S) = k + 1 and t = k.
class VisitState {
 public:
  explicit VisitState(std::size_t n) : counts_(n, 0) {}

  /// Places the walker at `start` and counts that visit; t is unchanged.
  void begin_at(NodeId start);
  /// S[node] += 1, t += 1, current = node.
  void record_visit(NodeId node);
  void reset();

  std::size_t num_nodes() const { return counts_.size(); }
  std::span<const std::uint64_t> counts() const { return counts_; }
  std::uint64_t count(NodeId v) const { return counts_[v]; }
  std::uint64_t step() const { return step_; }
  std::uint64_t total_visits() const { return total_; }
  std::optional<NodeId> current() const { return current_; }

  /// Overwrites the counts (tests and diagnostics); t is set to sum - 1 when positive.
  void set_counts(std::vector<std::uint64_t> counts, std::optional<NodeId> current);

 private:
  std::vector<std::uint64_t> counts_;
  std::uint64_t step_ = 0;
  std::uint64_t total_ = 0;
  std::optional<NodeId> current_;
};

/// Start node followed by every step.
using WalkPath = std::vector<NodeId>;

/// P(next = j) ∝ R[current, j] * f(S_j), in the order of R.targets(current).
/// With a constant f the R row is returned unchanged.
std::vector<double> step_distribution(const TransitionMatrix& r, const VisitState& state,
                                      const VisitingFunction& f);

/// Draws the next node from step_distribution using one uniform draw.
/// Identical R rows and identical f values give identical draws.
NodeId sample_step(const TransitionMatrix& r, const VisitState& state, const VisitingFunction& f,
                   Rng& rng);

/// Fresh-state walk of `length` steps from `start`.
WalkPath walk(const TransitionMatrix& r, const VisitingFunction& f, NodeId start,
              std::size_t length, Rng& rng);

/// Walk that keeps reweighting from the counts already stored in `state`.
WalkPath walk(const TransitionMatrix& r, const VisitingFunction& f, VisitState& state,
              NodeId start, std::size_t length, Rng& rng);

/// Fraction of path nodes whose label equals the start node's label.
/// Throws ValidationError if the start node is unlabeled.
double path_class_purity(std::span<const NodeId> path, std::span<const ClassId> labels);

}  // namespace imverde
