#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tplmask/graph.hpp"

namespace tplmask {

// Two bits encode a color: (high, low) = (0,0) -> 0, (0,1) -> 1, (1,0) -> 2.
// (1,1) is forbidden by the color-range constraint.

enum class VarKind : std::uint8_t {
  kColorHigh,
  kColorLow,
  kConflictHighEqual,  // high bits of a CE pair are equal
  kConflictLowEqual,
  kConflict,
  kStitchHighDiffer,  // high bits of an SE pair differ
  kStitchLowDiffer,
  kStitch,
};

struct IlpVariable {
  std::string name;
  VarKind kind;
  Edge owner;  // for node variables owner.u == owner.v == node
};

enum class ConstraintRole : std::uint8_t {
  kColorRange,        // high + low <= 1
  kHighBothOne,       // conflict: high_i + high_j <= 1 + c_high
  kHighBothZero,      // conflict: (1-high_i) + (1-high_j) <= 1 + c_high
  kLowBothOne,
  kLowBothZero,
  kConflictBothBits,  // c_high + c_low <= 1 + c
  kStitchHighForward,  // high_i - high_j <= s_high
  kStitchHighBackward,
  kStitchLowForward,
  kStitchLowBackward,
  kStitchAnyHigh,  // s >= s_high
  kStitchAnyLow,   // s >= s_low
};

struct LinearTerm {
  std::size_t var;
  int coef;
};

/// sum(coef * var) <= rhs
struct LinearConstraint {
  ConstraintRole role;
  std::vector<LinearTerm> terms;
  int rhs;
};

/// 0-1 linearization of the mask assignment problem. Variables are laid out
/// as: two color bits per node, then three per conflict edge, then three per
/// stitch edge, each block in edge order.
struct IlpModel {
  std::size_t num_nodes = 0;
  std::vector<Edge> conflict_edges;
  std::vector<Edge> stitch_edges;
  Rational alpha{1, 10};
  std::vector<IlpVariable> vars;
  std::vector<LinearConstraint> constraints;

  std::size_t color_high(NodeId v) const { return 2 * v; }
  std::size_t color_low(NodeId v) const { return 2 * v + 1; }
  std::size_t conflict_base(std::size_t k) const { return 2 * num_nodes + 3 * k; }
  std::size_t stitch_base(std::size_t k) const {
    return 2 * num_nodes + 3 * conflict_edges.size() + 3 * k;
  }
};

IlpModel build_ilp(const DecompositionGraph& dg, Rational alpha);

struct EncodingCheck {
  std::vector<std::size_t> violated;  // constraint indices
  Cost cost;                          // counted from c and s variables
  Rational objective;
  bool feasible() const { return violated.empty(); }
};

/// Evaluates every constraint and the objective on a 0-1 vector. Throws
/// std::invalid_argument naming the first variable not set to 0 or 1.
EncodingCheck check_encoding(const IlpModel& model, std::span<const int> bits);

/// Color bits plus the smallest feasible auxiliary values.
std::vector<int> encode_coloring(const IlpModel& model, std::span<const Color> colors);

/// Colors from the node bits; throws on the forbidden (1,1) pair.
std::vector<Color> decode_coloring(const IlpModel& model, std::span<const int> bits);

/// CPLEX LP text: objective, constraints, binary section.
void write_lp(const IlpModel& model, std::ostream& out);

struct ExactOptions {
  std::uint64_t node_budget = 5'000'000;
};

struct SolveReport {
  MaskAssignment assignment;
  std::uint64_t nodes_explored = 0;
  bool proven_optimal = false;
  double wall_time = 0.0;  // seconds
};

/// Branch-and-bound over node colors. Nodes are branched in descending
/// degree order (ties by id); the first branched node takes color 0 and a
/// node may open at most one new color. Bound: cost of edges inside the
/// colored set plus, for every uncolored node, its cheapest color against
/// the colored set. Returns the best incumbent if the budget runs out.
SolveReport solve_exact(const DecompositionGraph& dg, Rational alpha, const ExactOptions& options = {});

}  // namespace tplmask
