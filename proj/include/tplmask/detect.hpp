#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tplmask/graph.hpp"

namespace tplmask {

/// Two triangles sharing `shared`; the apexes must take one color in any
/// conflict-free 3-coloring.
struct AdjacentTriangles {
  Edge shared;
  NodeId apex_a = 0;
  NodeId apex_b = 0;
};

/// Every pair of triangles that share an edge, over the given conflict edges.
std::vector<AdjacentTriangles> find_adjacent_triangles(std::size_t num_nodes,
                                                       std::span<const Edge> conflict_edges);

/// Union-find over nodes with union by rank and path compression.
class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n = 0);
  NodeId find(NodeId v);
  /// Returns false if already joined.
  bool unite(NodeId a, NodeId b);
  std::size_t size() const { return parent_.size(); }

 private:
  std::vector<NodeId> parent_;
  std::vector<std::uint8_t> rank_;
};

/// A conflict edge whose endpoints are forced into one color, with the chain
/// of forced-equal nodes joining them (path.front() == edge.u,
/// path.back() == edge.v).
struct ConstraintWitness {
  Edge edge;
  std::vector<NodeId> path;
};

struct ConstraintClasses {
  std::vector<NodeId> class_of;  // representative = smallest member id
  std::vector<AdjacentTriangles> links;
};

struct DetectionResult {
  ConstraintClasses classes;
  std::vector<ConstraintWitness> witnesses;  // empty means no certificate found
  bool infeasible() const { return !witnesses.empty(); }
};

/// Merges the apexes of adjacent triangles into same-color classes and
/// reports every conflict edge inside one class. Triangles are taken from the
/// original edges only. Sound but incomplete: an empty witness list does not
/// imply 3-colorability.
DetectionResult propagate_and_check(std::size_t num_nodes, std::span<const Edge> conflict_edges);

}  // namespace tplmask
