#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tplmask/graph.hpp"

namespace tplmask {

/// A_ij = 1 on conflict edges, -alpha on stitch edges, 0 elsewhere.
struct CostMatrix {
  Eigen::MatrixXd A;
};

CostMatrix build_cost_matrix(const DecompositionGraph& dg, Rational alpha);

struct RelaxationSolution {
  Eigen::MatrixXd X;  // V * V^T
  Eigen::MatrixXd V;  // unit rows
  double obj_simplified = 0.0;  // sum_CE X_ij - alpha * sum_SE X_ij
  double obj_relaxation = 0.0;  // 2/3 sum_CE (X_ij + 1/2) + 2 alpha/3 sum_SE (1 - X_ij)
  double gradient_norm = 0.0;
  double max_violation = 0.0;  // worst max(0, -1/2 - X_ij) over conflict edges
  int iterations = 0;
  bool converged = false;
};

struct RelaxationOptions {
  int max_rank = 8;
  int restarts = 5;
  std::uint64_t seed = 42;
  double gradient_tolerance = 1e-5;
  double feasibility_tolerance = 1e-6;
  double initial_penalty = 1.0;
  double penalty_growth = 10.0;
  double max_penalty = 1e4;
  int max_outer_rounds = 40;
  int max_inner_iterations = 2000;
};

/// Solver for  min A.X  s.t. X_ii = 1, X_ij >= -1/2 on conflict edges, X PSD.
class RelaxationEngine {
 public:
  virtual ~RelaxationEngine() = default;
  virtual RelaxationSolution solve(const CostMatrix& cost, const DecompositionGraph& dg) const = 0;
};

/// X = V V^T with unit rows of V in R^r, r = min(n, max_rank). Each restart
/// runs an augmented-Lagrangian loop on the conflict-edge inequalities whose
/// inner problem is solved by Riemannian gradient descent on the product of
/// spheres (row renormalization as retraction, Barzilai-Borwein steps with a
/// nonmonotone Armijo test). While the violation is above tolerance and
/// stalls, the penalty grows by penalty_growth up to max_penalty. The best
/// restart is kept.
class LowRankRelaxation final : public RelaxationEngine {
 public:
  explicit LowRankRelaxation(RelaxationOptions options = {}) : options_(options) {}
  RelaxationSolution solve(const CostMatrix& cost, const DecompositionGraph& dg) const override;
  const RelaxationOptions& options() const { return options_; }

 private:
  RelaxationOptions options_;
};

RelaxationSolution solve_relaxation(const CostMatrix& cost, const DecompositionGraph& dg,
                                    const RelaxationOptions& options = {});

/// Vector-program objective of a discrete coloring, colors mapped to the unit
/// vectors (1,0), (-1/2, sqrt3/2), (-1/2, -sqrt3/2). Computed exactly.
Rational discrete_vector_objective(std::span<const Color> colors, const DecompositionGraph& dg,
                                   Rational alpha);

struct MappingParams {
  std::vector<double> union_levels{0.9};
  std::vector<double> sepa_levels{-0.4};

  /// Same length; each union level in (-1/2, 1]; each separation level in
  /// [-1, union level).
  void validate() const;
};

struct MappingResult {
  MaskAssignment assignment;
  bool degraded = false;  // a union had to ignore recorded separations
  std::size_t ignored_separations = 0;
};

/// Sorted-triplet grouping of X into at most three masks.
MappingResult map_to_masks(const Eigen::MatrixXd& X, const DecompositionGraph& dg, Rational alpha,
                           const MappingParams& params = {});

inline MappingResult map_to_masks(const RelaxationSolution& sol, const DecompositionGraph& dg,
                                  Rational alpha, const MappingParams& params = {}) {
  return map_to_masks(sol.X, dg, alpha, params);
}

/// Alternative rounding: project the rows of V on a random direction, then in
/// descending order fill mask 0 and then mask 1 greedily with nodes that have
/// no conflict neighbor already in that mask; the rest go to mask 2.
MaskAssignment round_hyperplane(const Eigen::MatrixXd& V, const DecompositionGraph& dg,
                                Rational alpha, std::uint64_t seed);

}  // namespace tplmask
