#pragma once

// Numerical diagnostics for the long-run behaviour of reweighted walks:
// occupancy vector V(t), energy H(v), induced chain M(v), fixed-point map pi(v).

#include <cstdint>
#include <span>
#include <vector>

#include "imverde/graph.hpp"
#include "imverde/walk.hpp"

namespace imverde {

/// V_i = f(S_i) / sum_k f(S_k), evaluated in log space.
std::vector<double> occupancy_vector(const VisitState& state, const VisitingFunction& f);

/// H(v) = sum_ij R_ij v_i v_j.
double h_energy(const TransitionMatrix& r, std::span<const double> v);

/// M_ij(v) = R_ij v_j / sum_k R_ik v_k on the sparsity pattern of R.
/// Rows whose denominator is zero are flagged undefined and left at zero.
struct InducedChain {
  std::vector<std::size_t> offsets;
  std::vector<NodeId> targets;
  std::vector<double> probs;
  std::vector<char> row_defined;

  std::size_t num_nodes() const { return row_defined.size(); }
  bool all_rows_defined() const;
  std::span<const NodeId> row_targets(NodeId i) const {
    return {targets.data() + offsets[i], offsets[i + 1] - offsets[i]};
  }
  std::span<const double> row_probs(NodeId i) const {
    return {probs.data() + offsets[i], offsets[i + 1] - offsets[i]};
  }
};

InducedChain markov_matrix(const TransitionMatrix& r, std::span<const double> v);

inline constexpr double kDegenerateEnergy = 1e-300;

/// pi_i(v) = v_i sum_j R_ij v_j / H(v). Throws DegenerateError when H(v) <= tolerance.
std::vector<double> pi_map(const TransitionMatrix& r, std::span<const double> v,
                           double tolerance = kDegenerateEnergy);

/// ||pi(v) - v||_2; zero exactly on the fixed-point set.
double fixed_point_residual(const TransitionMatrix& r, std::span<const double> v,
                            double tolerance = kDegenerateEnergy);

struct TracePoint {
  std::uint64_t step;
  double value;
};

/// One continuous walk of `length` steps. At every t = 2*interval, 3*interval, ...
/// emits ||P(t) - P(t - interval)||_2 where P(t) = S(t) / sum S(t) is the
/// empirical occupation. Requires length >= 2 * interval >= 2.
std::vector<TracePoint> convergence_trace(const TransitionMatrix& r, const VisitingFunction& f,
                                          NodeId start, std::uint64_t length,
                                          std::uint64_t interval, Rng& rng);

}  // namespace imverde
