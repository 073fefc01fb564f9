#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tplmask/graph.hpp"

namespace tplmask {

/// Axis-aligned rectangle in integer nm, x_lo < x_hi and y_lo < y_hi.
struct Rect {
  std::int64_t x_lo = 0;
  std::int64_t y_lo = 0;
  std::int64_t x_hi = 0;
  std::int64_t y_hi = 0;

  std::int64_t width() const { return x_hi - x_lo; }
  std::int64_t height() const { return y_hi - y_lo; }
  /// Long axis is horizontal unless the rectangle is strictly taller than wide.
  bool horizontal() const { return width() >= height(); }
  bool operator==(const Rect&) const = default;
};

struct Shape {
  std::int64_t id = 0;
  Rect rect;
  bool operator==(const Shape&) const = default;
};

struct ProcessParams {
  double min_s = 85.0;           // minimum colorable distance
  double overlap_margin = 10.0;  // minimum overlap at a stitch
  double alpha = 0.1;            // stitch weight relative to a conflict
  double min_width = 25.0;
  double min_spacing = 30.0;

  /// Throws std::invalid_argument unless min_s > min_spacing > 0,
  /// overlap_margin > 0 and alpha > 0.
  void validate() const;
  bool operator==(const ProcessParams&) const = default;
};

struct Layout {
  std::string units = "nm";
  std::vector<Shape> shapes;
  ProcessParams params;

  bool operator==(const Layout&) const = default;
};

class LayoutError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rejects duplicate ids, degenerate rectangles and overlapping shapes.
void validate_layout(const Layout& layout);

Layout parse_layout(std::string_view json_text);
Layout load_layout(const std::filesystem::path& path);
std::string layout_to_json(const Layout& layout);
void save_layout(const Layout& layout, const std::filesystem::path& path);

/// Minimum euclidean distance between two closed rectangles; 0 when they touch.
double euclidean_gap(const Rect& a, const Rect& b);

/// Conflict-only graph over shapes; node k is layout.shapes[k].
class LayoutGraph {
 public:
  LayoutGraph() = default;
  LayoutGraph(std::size_t num_nodes, std::vector<Edge> edges);

  std::size_t size() const { return adjacency_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  std::span<const NodeId> neighbors(NodeId v) const { return adjacency_[v]; }
  std::size_t degree(NodeId v) const { return adjacency_[v].size(); }
  bool has_edge(NodeId a, NodeId b) const;

 private:
  std::vector<Edge> edges_;
  std::vector<std::vector<NodeId>> adjacency_;
};

/// Edge between two shapes iff their gap is strictly below min_s.
LayoutGraph build_layout_graph(const Layout& layout);

struct Segment {
  NodeId id = 0;
  std::size_t shape_index = 0;  // index into Layout::shapes
  std::int64_t shape_id = 0;
  Rect rect;
};

/// Segments of every shape plus the decomposition graph over them. Segment
/// k is node k; segments of one shape are consecutive and ordered along the
/// shape's long axis.
struct Decomposition {
  std::vector<Segment> segments;
  DecompositionGraph graph;
  std::vector<std::vector<NodeId>> segments_of_shape;
};

/// Half-open interval of the long axis that lies within min_s of `neighbor`,
/// clipped to the shape. Empty (lo >= hi) if none.
struct Cover {
  double lo = 0.0;
  double hi = 0.0;
};

Cover project_neighbor(const Rect& shape, const Rect& neighbor, double min_s);

/// Stitch positions along the long axis of layout.shapes[index]: the midpoint
/// of every uncovered gap lying between two covered intervals, kept only if
/// it is at least overlap_margin from the shape ends and from both covers.
std::vector<std::int64_t> stitch_candidates(const Layout& layout, const LayoutGraph& lg,
                                            std::size_t index);

/// Splits every shape with splittable[k] set (all shapes when the span is
/// empty) at its stitch candidates and builds CE/SE between the segments.
Decomposition project_and_split(const Layout& layout, const LayoutGraph& lg,
                                std::span<const bool> splittable = {});

}  // namespace tplmask
