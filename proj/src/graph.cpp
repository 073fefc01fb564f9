#include "tplmask/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace tplmask {

Edge make_edge(NodeId a, NodeId b) {
  if (a == b) throw std::invalid_argument("self-loop on node " + std::to_string(a));
  return a < b ? Edge{a, b} : Edge{b, a};
}

namespace {

void normalize(std::vector<Edge>& edges, std::size_t n) {
  for (auto& e : edges) {
    e = make_edge(e.u, e.v);
    if (e.v >= n) {
      throw std::invalid_argument("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                                  ") references a node outside 0.." + std::to_string(n) + ")");
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

}  // namespace

DecompositionGraph::DecompositionGraph(std::size_t num_nodes, std::vector<Edge> conflict_edges,
                                       std::vector<Edge> stitch_edges)
    : num_nodes_(num_nodes),
      conflict_edges_(std::move(conflict_edges)),
      stitch_edges_(std::move(stitch_edges)) {
  normalize(conflict_edges_, num_nodes_);
  normalize(stitch_edges_, num_nodes_);

  std::vector<Edge> both;
  std::set_intersection(conflict_edges_.begin(), conflict_edges_.end(), stitch_edges_.begin(),
                        stitch_edges_.end(), std::back_inserter(both));
  if (!both.empty()) {
    throw std::invalid_argument("pair (" + std::to_string(both.front().u) + "," +
                                std::to_string(both.front().v) +
                                ") is both a conflict and a stitch edge");
  }

  std::vector<std::size_t> deg(num_nodes_, 0);
  for (const auto* list : {&conflict_edges_, &stitch_edges_}) {
    for (const auto& e : *list) {
      ++deg[e.u];
      ++deg[e.v];
    }
  }
  offsets_.assign(num_nodes_ + 1, 0);
  for (std::size_t v = 0; v < num_nodes_; ++v) offsets_[v + 1] = offsets_[v] + deg[v];
  incidences_.resize(offsets_.back());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  auto add = [&](const std::vector<Edge>& list, EdgeKind kind) {
    for (const auto& e : list) {
      incidences_[cursor[e.u]++] = {e.v, kind};
      incidences_[cursor[e.v]++] = {e.u, kind};
    }
  };
  add(conflict_edges_, EdgeKind::kConflict);
  add(stitch_edges_, EdgeKind::kStitch);
  for (std::size_t v = 0; v < num_nodes_; ++v) {
    std::sort(incidences_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]),
              incidences_.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]),
              [](const Incidence& a, const Incidence& b) { return a.node < b.node; });
  }
}

DecompositionGraph DecompositionGraph::induced(std::span<const NodeId> nodes) const {
  constexpr NodeId kAbsent = std::numeric_limits<NodeId>::max();
  std::vector<NodeId> local(num_nodes_, kAbsent);
  for (std::size_t k = 0; k < nodes.size(); ++k) local[nodes[k]] = static_cast<NodeId>(k);

  auto restrict = [&](const std::vector<Edge>& list) {
    std::vector<Edge> out;
    for (const auto& e : list) {
      if (local[e.u] != kAbsent && local[e.v] != kAbsent) out.push_back({local[e.u], local[e.v]});
    }
    return out;
  };
  return DecompositionGraph(nodes.size(), restrict(conflict_edges_), restrict(stitch_edges_));
}

Rational rational_from_double(double x, std::int64_t max_den) {
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite weight");
  const bool negative = x < 0;
  double rest = std::fabs(x);
  // Convergents h/k of the continued fraction of x.
  std::int64_t h_prev = 1, h = static_cast<std::int64_t>(std::floor(rest));
  std::int64_t k_prev = 0, k = 1;
  double frac = rest - std::floor(rest);
  while (frac > 1e-12) {
    rest = 1.0 / frac;
    const auto a = static_cast<std::int64_t>(std::floor(rest));
    frac = rest - std::floor(rest);
    const std::int64_t k_next = a * k + k_prev;
    if (k_next > max_den) break;
    const std::int64_t h_next = a * h + h_prev;
    h_prev = h;
    h = h_next;
    k_prev = k;
    k = k_next;
  }
  return Rational(negative ? -h : h, k);
}

MaskAssignment evaluate(const DecompositionGraph& dg, std::span<const Color> colors,
                        Rational alpha) {
  if (colors.size() != dg.size()) {
    throw std::invalid_argument("coloring covers " + std::to_string(colors.size()) +
                                " nodes, graph has " + std::to_string(dg.size()));
  }
  for (std::size_t v = 0; v < colors.size(); ++v) {
    if (colors[v] == kUncolored) throw std::invalid_argument("node " + std::to_string(v) + " is uncolored");
    if (colors[v] >= kNumMasks) {
      throw std::invalid_argument("node " + std::to_string(v) + " has invalid color " +
                                  std::to_string(colors[v]));
    }
  }
  MaskAssignment out;
  out.colors.assign(colors.begin(), colors.end());
  out.alpha = alpha;
  for (const auto& e : dg.conflict_edges()) {
    if (colors[e.u] == colors[e.v]) out.conflicts.push_back(e);
  }
  for (const auto& e : dg.stitch_edges()) {
    if (colors[e.u] != colors[e.v]) out.stitches.push_back(e);
  }
  out.objective = boost::rational_cast<double>(out.exact_objective());
  return out;
}

MaskAssignment brute_force_optimum(const DecompositionGraph& dg, Rational alpha) {
  const std::size_t n = dg.size();
  if (n > kBruteForceMaxNodes) {
    throw std::invalid_argument("brute force limited to " + std::to_string(kBruteForceMaxNodes) +
                                " nodes, got " + std::to_string(n));
  }
  if (n == 0) return evaluate(dg, {}, alpha);

  const std::int64_t conflict_w = alpha.denominator();
  const std::int64_t stitch_w = alpha.numerator();
  // Cost of coloring v given colors of all lower-numbered nodes.
  auto incremental = [&](const std::vector<Color>& colors, NodeId v) {
    std::int64_t add = 0;
    for (const auto& inc : dg.neighbors(v)) {
      if (inc.node >= v) continue;
      const bool same = colors[inc.node] == colors[v];
      if (inc.kind == EdgeKind::kConflict && same) add += conflict_w;
      if (inc.kind == EdgeKind::kStitch && !same) add += stitch_w;
    }
    return add;
  };

  std::vector<Color> colors(n, 0);
  std::vector<std::int64_t> prefix(n + 1, 0);
  std::vector<Color> best;
  std::int64_t best_key = std::numeric_limits<std::int64_t>::max();

  // Odometer over colors with node 0 most significant, so enumeration is
  // lexicographic and the first optimum seen is the smallest one.
  std::size_t depth = 0;
  colors[0] = 0;
  while (true) {
    prefix[depth + 1] = prefix[depth] + incremental(colors, static_cast<NodeId>(depth));
    if (depth + 1 == n) {
      if (prefix[n] < best_key) {
        best_key = prefix[n];
        best = colors;
      }
      while (depth != static_cast<std::size_t>(-1) && colors[depth] == kNumMasks - 1) --depth;
      if (depth == static_cast<std::size_t>(-1)) break;
      ++colors[depth];
    } else {
      ++depth;
      colors[depth] = 0;
    }
  }
  return evaluate(dg, best, alpha);
}

std::vector<Component> connected_components(const DecompositionGraph& dg) {
  const std::size_t n = dg.size();
  std::vector<int> comp(n, -1);
  std::vector<std::vector<NodeId>> groups;
  std::vector<NodeId> stack;
  for (NodeId s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    const int id = static_cast<int>(groups.size());
    groups.emplace_back();
    comp[s] = id;
    stack.push_back(s);
    while (!stack.empty()) {
      const NodeId v = stack.back();
      stack.pop_back();
      groups[id].push_back(v);
      for (const auto& inc : dg.neighbors(v)) {
        if (comp[inc.node] < 0) {
          comp[inc.node] = id;
          stack.push_back(inc.node);
        }
      }
    }
  }
  std::vector<Component> out;
  out.reserve(groups.size());
  for (auto& nodes : groups) {
    std::sort(nodes.begin(), nodes.end());
    Component c;
    c.graph = dg.induced(nodes);
    c.nodes = std::move(nodes);
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<Color> permute_colors(std::span<const Color> colors, const std::array<Color, 3>& perm) {
  std::vector<Color> out(colors.size());
  std::transform(colors.begin(), colors.end(), out.begin(),
                 [&](Color c) { return c < kNumMasks ? perm[c] : c; });
  return out;
}

}  // namespace tplmask
