#include "tplmask/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace tplmask {

using json = nlohmann::json;

void ProcessParams::validate() const {
  if (!(min_spacing > 0)) throw std::invalid_argument("min_spacing must be positive");
  if (!(min_s > min_spacing)) throw std::invalid_argument("min_s must exceed min_spacing");
  if (!(overlap_margin > 0)) throw std::invalid_argument("overlap_margin must be positive");
  if (!(alpha > 0)) throw std::invalid_argument("alpha must be positive");
}

namespace {

bool interiors_overlap(const Rect& a, const Rect& b) {
  return a.x_lo < b.x_hi && b.x_lo < a.x_hi && a.y_lo < b.y_hi && b.y_lo < a.y_hi;
}

json number(double v) {
  if (std::trunc(v) == v && std::fabs(v) < 9e15) return static_cast<std::int64_t>(v);
  return v;
}

}  // namespace

void validate_layout(const Layout& layout) {
  if (layout.units != "nm") throw LayoutError("unsupported units \"" + layout.units + "\"");
  try {
    layout.params.validate();
  } catch (const std::invalid_argument& e) {
    throw LayoutError(std::string("invalid params: ") + e.what());
  }
  std::set<std::int64_t> ids;
  for (const auto& s : layout.shapes) {
    if (!ids.insert(s.id).second) throw LayoutError("duplicate shape id " + std::to_string(s.id));
    if (s.rect.x_lo >= s.rect.x_hi || s.rect.y_lo >= s.rect.y_hi) {
      throw LayoutError("degenerate rectangle in shape " + std::to_string(s.id));
    }
  }
  std::vector<std::size_t> order(layout.shapes.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return layout.shapes[a].rect.x_lo < layout.shapes[b].rect.x_lo;
  });
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& a = layout.shapes[order[i]];
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      const auto& b = layout.shapes[order[j]];
      if (b.rect.x_lo >= a.rect.x_hi) break;
      if (interiors_overlap(a.rect, b.rect)) {
        throw LayoutError("overlapping shapes " + std::to_string(a.id) + " and " +
                          std::to_string(b.id));
      }
    }
  }
}

Layout parse_layout(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw LayoutError(std::string("layout parse error: ") + e.what());
  }
  Layout layout;
  try {
    layout.units = doc.value("units", std::string("nm"));
    if (doc.contains("params")) {
      const auto& p = doc.at("params");
      auto& out = layout.params;
      out.min_s = p.value("min_s", out.min_s);
      out.overlap_margin = p.value("overlap_margin", out.overlap_margin);
      out.alpha = p.value("alpha", out.alpha);
      out.min_width = p.value("min_width", out.min_width);
      out.min_spacing = p.value("min_spacing", out.min_spacing);
    }
    for (const auto& js : doc.at("shapes")) {
      Shape s;
      s.id = js.at("id").get<std::int64_t>();
      const auto& r = js.at("rect");
      if (!r.is_array() || r.size() != 4) {
        throw LayoutError("shape " + std::to_string(s.id) + ": rect must have 4 coordinates");
      }
      s.rect = {r[0].get<std::int64_t>(), r[1].get<std::int64_t>(), r[2].get<std::int64_t>(),
                r[3].get<std::int64_t>()};
      layout.shapes.push_back(s);
    }
  } catch (const json::exception& e) {
    throw LayoutError(std::string("layout schema error: ") + e.what());
  }
  validate_layout(layout);
  return layout;
}

Layout load_layout(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LayoutError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_layout(buf.str());
}

std::string layout_to_json(const Layout& layout) {
  json doc;
  doc["units"] = layout.units;
  const auto& p = layout.params;
  doc["params"] = {{"min_s", number(p.min_s)},
                   {"overlap_margin", number(p.overlap_margin)},
                   {"alpha", number(p.alpha)},
                   {"min_width", number(p.min_width)},
                   {"min_spacing", number(p.min_spacing)}};
  json shapes = json::array();
  for (const auto& s : layout.shapes) {
    shapes.push_back({{"id", s.id}, {"rect", {s.rect.x_lo, s.rect.y_lo, s.rect.x_hi, s.rect.y_hi}}});
  }
  doc["shapes"] = std::move(shapes);
  return doc.dump(1) + "\n";
}

void save_layout(const Layout& layout, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw LayoutError("cannot write " + path.string());
  out << layout_to_json(layout);
}

double euclidean_gap(const Rect& a, const Rect& b) {
  const std::int64_t dx = std::max<std::int64_t>({0, a.x_lo - b.x_hi, b.x_lo - a.x_hi});
  const std::int64_t dy = std::max<std::int64_t>({0, a.y_lo - b.y_hi, b.y_lo - a.y_hi});
  return std::hypot(static_cast<double>(dx), static_cast<double>(dy));
}

LayoutGraph::LayoutGraph(std::size_t num_nodes, std::vector<Edge> edges)
    : edges_(std::move(edges)), adjacency_(num_nodes) {
  for (auto& e : edges_) e = make_edge(e.u, e.v);
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  for (const auto& e : edges_) {
    if (e.v >= num_nodes) throw std::invalid_argument("layout graph edge out of range");
    adjacency_[e.u].push_back(e.v);
    adjacency_[e.v].push_back(e.u);
  }
  for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
}

bool LayoutGraph::has_edge(NodeId a, NodeId b) const {
  const auto& adj = adjacency_[a];
  return std::binary_search(adj.begin(), adj.end(), b);
}

LayoutGraph build_layout_graph(const Layout& layout) {
  const auto& shapes = layout.shapes;
  const double min_s = layout.params.min_s;
  std::vector<std::size_t> order(shapes.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return shapes[a].rect.x_lo < shapes[b].rect.x_lo;
  });
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Rect& a = shapes[order[i]].rect;
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      const Rect& b = shapes[order[j]].rect;
      if (static_cast<double>(b.x_lo - a.x_hi) >= min_s) break;
      if (euclidean_gap(a, b) < min_s) {
        edges.push_back(make_edge(static_cast<NodeId>(order[i]), static_cast<NodeId>(order[j])));
      }
    }
  }
  return LayoutGraph(shapes.size(), std::move(edges));
}

Cover project_neighbor(const Rect& shape, const Rect& neighbor, double min_s) {
  const bool horiz = shape.horizontal();
  const std::int64_t s_lo = horiz ? shape.x_lo : shape.y_lo;
  const std::int64_t s_hi = horiz ? shape.x_hi : shape.y_hi;
  const std::int64_t t_lo = horiz ? neighbor.x_lo : neighbor.y_lo;
  const std::int64_t t_hi = horiz ? neighbor.x_hi : neighbor.y_hi;
  const std::int64_t perp = horiz ? std::max<std::int64_t>({0, neighbor.y_lo - shape.y_hi,
                                                            shape.y_lo - neighbor.y_hi})
                                  : std::max<std::int64_t>({0, neighbor.x_lo - shape.x_hi,
                                                            shape.x_lo - neighbor.x_hi});
  const double p = static_cast<double>(perp);
  if (p >= min_s) return {};
  const double reach = std::sqrt(min_s * min_s - p * p);
  Cover c{std::max<double>(static_cast<double>(t_lo) - reach, static_cast<double>(s_lo)),
          std::min<double>(static_cast<double>(t_hi) + reach, static_cast<double>(s_hi))};
  if (c.lo >= c.hi) return {};
  return c;
}

std::vector<std::int64_t> stitch_candidates(const Layout& layout, const LayoutGraph& lg,
                                            std::size_t index) {
  const Rect& shape = layout.shapes[index].rect;
  const double margin = layout.params.overlap_margin;
  const bool horiz = shape.horizontal();
  const double s_lo = static_cast<double>(horiz ? shape.x_lo : shape.y_lo);
  const double s_hi = static_cast<double>(horiz ? shape.x_hi : shape.y_hi);

  std::vector<Cover> covers;
  for (NodeId t : lg.neighbors(static_cast<NodeId>(index))) {
    const Cover c = project_neighbor(shape, layout.shapes[t].rect, layout.params.min_s);
    if (c.lo < c.hi) covers.push_back(c);
  }
  std::sort(covers.begin(), covers.end(), [](const Cover& a, const Cover& b) {
    return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
  });
  std::vector<Cover> merged;
  for (const auto& c : covers) {
    if (!merged.empty() && c.lo <= merged.back().hi) {
      merged.back().hi = std::max(merged.back().hi, c.hi);
    } else {
      merged.push_back(c);
    }
  }

  std::vector<std::int64_t> cuts;
  for (std::size_t k = 0; k + 1 < merged.size(); ++k) {
    const double gap_lo = merged[k].hi;
    const double gap_hi = merged[k + 1].lo;
    const auto cut = static_cast<std::int64_t>(std::floor((gap_lo + gap_hi) / 2.0));
    const double c = static_cast<double>(cut);
    if (c - s_lo >= margin && s_hi - c >= margin && c - gap_lo >= margin && gap_hi - c >= margin) {
      cuts.push_back(cut);
    }
  }
  return cuts;
}

Decomposition project_and_split(const Layout& layout, const LayoutGraph& lg,
                                std::span<const bool> splittable) {
  Decomposition out;
  out.segments_of_shape.resize(layout.shapes.size());
  std::vector<Edge> stitches;
  for (std::size_t k = 0; k < layout.shapes.size(); ++k) {
    const Shape& shape = layout.shapes[k];
    std::vector<std::int64_t> cuts;
    if (splittable.empty() || splittable[k]) cuts = stitch_candidates(layout, lg, k);
    const bool horiz = shape.rect.horizontal();
    std::int64_t lo = horiz ? shape.rect.x_lo : shape.rect.y_lo;
    cuts.push_back(horiz ? shape.rect.x_hi : shape.rect.y_hi);
    for (std::int64_t hi : cuts) {
      Rect r = shape.rect;
      if (horiz) {
        r.x_lo = lo;
        r.x_hi = hi;
      } else {
        r.y_lo = lo;
        r.y_hi = hi;
      }
      const auto id = static_cast<NodeId>(out.segments.size());
      if (!out.segments_of_shape[k].empty()) stitches.push_back({out.segments_of_shape[k].back(), id});
      out.segments.push_back({id, k, shape.id, r});
      out.segments_of_shape[k].push_back(id);
      lo = hi;
    }
  }

  const double min_s = layout.params.min_s;
  std::vector<Edge> conflicts;
  for (const auto& e : lg.edges()) {
    for (NodeId a : out.segments_of_shape[e.u]) {
      for (NodeId b : out.segments_of_shape[e.v]) {
        if (euclidean_gap(out.segments[a].rect, out.segments[b].rect) < min_s) {
          conflicts.push_back(make_edge(a, b));
        }
      }
    }
  }
  // Non-adjacent segments of one shape that are still within min_s.
  for (const auto& segs : out.segments_of_shape) {
    for (std::size_t i = 0; i + 2 < segs.size(); ++i) {
      for (std::size_t j = i + 2; j < segs.size(); ++j) {
        if (euclidean_gap(out.segments[segs[i]].rect, out.segments[segs[j]].rect) < min_s) {
          conflicts.push_back({segs[i], segs[j]});
        }
      }
    }
  }
  out.graph = DecompositionGraph(out.segments.size(), std::move(conflicts), std::move(stitches));
  return out;
}

}  // namespace tplmask
