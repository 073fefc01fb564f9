#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tplmask/detect.hpp"
#include "tplmask/exact_solver.hpp"
#include "tplmask/geometry.hpp"
#include "tplmask/sdp.hpp"

namespace tplmask {

enum class SolverChoice : std::uint8_t { kExact, kSdp, kAuto };

std::string to_string(SolverChoice s);
/// Accepts "exact", "sdp" and "auto"; throws std::invalid_argument otherwise.
SolverChoice parse_solver(const std::string& name);

enum class Rounding : std::uint8_t { kTriplets, kHyperplane };

struct DecomposeConfig {
  SolverChoice solver = SolverChoice::kAuto;
  std::size_t auto_threshold = 25;  // auto uses exact up to this many nodes
  ProcessParams params;
  MappingParams mapping;
  Rounding rounding = Rounding::kTriplets;
  ExactOptions exact;
  RelaxationOptions relaxation;
  std::uint64_t seed = 42;  // overrides relaxation.seed
  unsigned threads = 1;
};

/// One independently solved piece: a two-edge-connected block of the
/// residual graph after peeling.
struct PieceReport {
  std::vector<NodeId> nodes;  // ids in the decomposition graph
  std::string solver;         // "trivial", "exact" or "sdp"
  Cost cost;
  std::uint64_t nodes_explored = 0;
  bool proven_optimal = true;
  bool relaxation_converged = false;
  double relaxation_objective = 0.0;
  bool mapping_degraded = false;
  Eigen::MatrixXd X;  // relaxation matrix for sdp pieces
  double wall_time = 0.0;
};

struct Diagnostics {
  std::size_t layout_peeled = 0;  // shapes kept whole by layout-graph peeling
  std::size_t peeled = 0;         // decomposition-graph nodes peeled
  std::size_t bridges = 0;
  std::size_t components = 0;  // of the full decomposition graph
  std::vector<ConstraintWitness> witnesses;
};

struct DecomposeResult {
  Decomposition decomposition;
  MaskAssignment assignment;
  std::vector<PieceReport> pieces;
  Diagnostics diagnostics;
  std::int64_t st = 0;
  std::int64_t cn = 0;
  bool proven_optimal = true;
  double wall_time = 0.0;
  double cpu_time = 0.0;
};

/// Layout graph -> peel -> split the residual shapes -> decomposition-graph
/// peel -> components -> bridges -> solve each block -> rotate-merge ->
/// reinsert peeled nodes.
DecomposeResult decompose(const Layout& layout, const DecomposeConfig& cfg);

/// Same flow starting from a ready decomposition graph. Segments are left
/// empty; node k is reported as segment id k.
DecomposeResult decompose_graph(const DecompositionGraph& dg, const DecomposeConfig& cfg);

struct ComparisonRow {
  std::string solver;
  std::size_t se = 0;
  std::size_t ce = 0;
  std::int64_t st = 0;
  std::int64_t cn = 0;
  double objective = 0.0;
  double cpu_s = 0.0;
  double wall_s = 0.0;
};

/// Runs the exact and the sdp pipelines on the same layout.
std::vector<ComparisonRow> compare_solvers(const Layout& layout, const DecomposeConfig& cfg);

}  // namespace tplmask
