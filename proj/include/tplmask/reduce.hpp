#pragma once

#include <span>
#include <vector>

#include "tplmask/geometry.hpp"
#include "tplmask/graph.hpp"

namespace tplmask {

/// Removal order of low-degree nodes. Entry k holds the node and its
/// neighbors that were still present when it was removed (at most two).
struct PeelRecord {
  struct Entry {
    NodeId node;
    std::vector<NodeId> neighbors;
  };
  std::vector<Entry> stack;
};

struct PeelResult {
  std::vector<NodeId> residual;  // ascending; every node has residual degree >= 3
  PeelRecord record;
};

/// Repeatedly removes a node of current degree <= 2 until none remains.
/// Candidates are processed smallest id first.
PeelResult peel_low_degree(const LayoutGraph& lg);

/// Pops the record in reverse and gives each node the smallest color not used
/// by its recorded neighbors. `partial` must color every node outside the
/// record; the returned vector has the same size.
std::vector<Color> reinsert_and_color(const PeelRecord& record, std::span<const Color> partial);

/// An edge whose removal splits its component into side_a (containing
/// edge.u) and side_b (containing edge.v).
struct BridgeCut {
  Edge edge;
  EdgeKind kind = EdgeKind::kConflict;
  std::vector<NodeId> side_a;
  std::vector<NodeId> side_b;
};

/// All bridges over CE and SE (DFS low-link, linear time), ordered by edge.
std::vector<BridgeCut> find_bridges(const DecompositionGraph& dg);

/// Only the bridge edges, without computing sides.
std::vector<Edge> bridge_edges(const DecompositionGraph& dg);

struct RotationResult {
  std::vector<Color> colors;
  int shift = 0;  // applied c -> (c + shift) mod 3 on side_b
};

/// Merges two side colorings (full-size vectors, each valid on its side) so
/// the bridge costs nothing: the smallest cyclic shift of side_b that puts
/// different colors across a conflict bridge or equal colors across a
/// stitch bridge.
RotationResult stitch_and_rotate(const BridgeCut& cut, std::span<const Color> color_a,
                                 std::span<const Color> color_b);

}  // namespace tplmask
