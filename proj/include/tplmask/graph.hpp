#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <boost/rational.hpp>

namespace tplmask {

using NodeId = std::uint32_t;
using Color = std::uint8_t;
using Rational = boost::rational<std::int64_t>;

inline constexpr Color kUncolored = 0xFF;
inline constexpr int kNumMasks = 3;

/// Unordered node pair, stored with u < v.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  auto operator<=>(const Edge&) const = default;
};

/// Orders the endpoints; throws std::invalid_argument on a self-loop.
Edge make_edge(NodeId a, NodeId b);

enum class EdgeKind : std::uint8_t { kConflict, kStitch };

/// Nodes with conflict edges (CE) and stitch edges (SE). Immutable once
/// built; the constructor sorts and deduplicates both edge lists and rejects
/// pairs present in both.
class DecompositionGraph {
 public:
  struct Incidence {
    NodeId node;
    EdgeKind kind;
  };

  DecompositionGraph() = default;
  DecompositionGraph(std::size_t num_nodes, std::vector<Edge> conflict_edges,
                     std::vector<Edge> stitch_edges);

  std::size_t size() const { return num_nodes_; }
  bool empty() const { return num_nodes_ == 0; }
  const std::vector<Edge>& conflict_edges() const { return conflict_edges_; }
  const std::vector<Edge>& stitch_edges() const { return stitch_edges_; }
  std::size_t edge_count() const { return conflict_edges_.size() + stitch_edges_.size(); }

  std::span<const Incidence> neighbors(NodeId v) const {
    return {incidences_.data() + offsets_[v], incidences_.data() + offsets_[v + 1]};
  }
  std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }

  /// Subgraph induced by `nodes`; node k of the result is nodes[k].
  DecompositionGraph induced(std::span<const NodeId> nodes) const;

 private:
  std::size_t num_nodes_ = 0;
  std::vector<Edge> conflict_edges_;
  std::vector<Edge> stitch_edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Incidence> incidences_;
};

/// Conflict and stitch counts. Objective comparisons go through
/// weighted_key() so that alpha enters as an exact rational.
struct Cost {
  std::int64_t conflicts = 0;
  std::int64_t stitches = 0;

  Rational value(Rational alpha) const { return Rational(conflicts) + alpha * stitches; }
  bool operator==(const Cost&) const = default;
};

/// conflicts * den(alpha) + stitches * num(alpha); orders costs exactly.
inline std::int64_t weighted_key(Cost c, Rational alpha) {
  return c.conflicts * alpha.denominator() + c.stitches * alpha.numerator();
}

/// Closest rational with denominator <= max_den (continued fractions).
Rational rational_from_double(double x, std::int64_t max_den = 1'000'000);

struct MaskAssignment {
  std::vector<Color> colors;
  std::vector<Edge> conflicts;
  std::vector<Edge> stitches;
  Rational alpha{1, 10};
  double objective = 0.0;

  Cost cost() const {
    return {static_cast<std::int64_t>(conflicts.size()),
            static_cast<std::int64_t>(stitches.size())};
  }
  Rational exact_objective() const { return cost().value(alpha); }
};

/// Derives conflicts, stitches and the objective of a complete coloring.
/// Throws std::invalid_argument naming the first uncolored or out-of-range node.
MaskAssignment evaluate(const DecompositionGraph& dg, std::span<const Color> colors,
                        Rational alpha);

inline constexpr std::size_t kBruteForceMaxNodes = 16;

/// Exhaustive 3^n search; returns the lexicographically smallest optimal
/// color vector. Throws std::invalid_argument above kBruteForceMaxNodes.
MaskAssignment brute_force_optimum(const DecompositionGraph& dg, Rational alpha);

struct Component {
  DecompositionGraph graph;
  std::vector<NodeId> nodes;  // local id -> id in the parent graph
};

/// Connected components over CE and SE, ordered by smallest member id.
std::vector<Component> connected_components(const DecompositionGraph& dg);

/// Applies perm[c] to every color.
std::vector<Color> permute_colors(std::span<const Color> colors, const std::array<Color, 3>& perm);

}  // namespace tplmask
