#include "tplmask/reduce.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>

namespace tplmask {

PeelResult peel_low_degree(const LayoutGraph& lg) {
  const std::size_t n = lg.size();
  std::vector<std::size_t> degree(n);
  std::vector<bool> removed(n, false);
  std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
  std::vector<bool> queued(n, false);
  for (NodeId v = 0; v < n; ++v) {
    degree[v] = lg.degree(v);
    if (degree[v] <= 2) {
      ready.push(v);
      queued[v] = true;
    }
  }

  PeelResult out;
  while (!ready.empty()) {
    const NodeId v = ready.top();
    ready.pop();
    PeelRecord::Entry entry{v, {}};
    for (NodeId w : lg.neighbors(v)) {
      if (removed[w]) continue;
      entry.neighbors.push_back(w);
      if (--degree[w] <= 2 && !queued[w]) {
        ready.push(w);
        queued[w] = true;
      }
    }
    removed[v] = true;
    out.record.stack.push_back(std::move(entry));
  }
  for (NodeId v = 0; v < n; ++v) {
    if (!removed[v]) out.residual.push_back(v);
  }
  return out;
}

std::vector<Color> reinsert_and_color(const PeelRecord& record, std::span<const Color> partial) {
  std::vector<Color> colors(partial.begin(), partial.end());
  for (auto it = record.stack.rbegin(); it != record.stack.rend(); ++it) {
    std::array<bool, kNumMasks> used{};
    for (NodeId w : it->neighbors) {
      if (w >= colors.size() || colors[w] == kUncolored) {
        throw std::invalid_argument("neighbor " + std::to_string(w) + " of node " +
                                    std::to_string(it->node) + " is uncolored at reinsertion");
      }
      used[colors[w]] = true;
    }
    Color c = 0;
    while (c < kNumMasks && used[c]) ++c;
    if (c == kNumMasks) {
      throw std::invalid_argument("node " + std::to_string(it->node) +
                                  " has more than two recorded neighbors");
    }
    colors[it->node] = c;
  }
  return colors;
}

namespace {

struct DfsState {
  std::vector<int> tin;
  std::vector<int> tout;
  std::vector<int> low;
  std::vector<NodeId> root_of;
  std::vector<std::pair<NodeId, NodeId>> tree_bridges;  // (parent, child)
};

DfsState low_link(const DecompositionGraph& dg) {
  const std::size_t n = dg.size();
  DfsState st;
  st.tin.assign(n, -1);
  st.tout.assign(n, -1);
  st.low.assign(n, 0);
  st.root_of.assign(n, 0);
  constexpr NodeId kNone = std::numeric_limits<NodeId>::max();
  struct Frame {
    NodeId v;
    NodeId parent;
    std::size_t next;
  };
  std::vector<Frame> stack;
  int timer = 0;
  for (NodeId root = 0; root < n; ++root) {
    if (st.tin[root] >= 0) continue;
    stack.push_back({root, kNone, 0});
    st.tin[root] = st.low[root] = timer++;
    st.root_of[root] = root;
    while (!stack.empty()) {
      Frame& f = stack.back();
      const auto nbrs = dg.neighbors(f.v);
      if (f.next < nbrs.size()) {
        const NodeId w = nbrs[f.next++].node;
        if (w == f.parent) continue;  // graph has no parallel edges
        if (st.tin[w] >= 0) {
          st.low[f.v] = std::min(st.low[f.v], st.tin[w]);
        } else {
          st.tin[w] = st.low[w] = timer++;
          st.root_of[w] = root;
          stack.push_back({w, f.v, 0});
        }
        continue;
      }
      const NodeId v = f.v;
      const NodeId parent = f.parent;
      st.tout[v] = timer - 1;
      stack.pop_back();
      if (parent != kNone) {
        st.low[parent] = std::min(st.low[parent], st.low[v]);
        if (st.low[v] > st.tin[parent]) st.tree_bridges.emplace_back(parent, v);
      }
    }
  }
  return st;
}

EdgeKind kind_of(const DecompositionGraph& dg, Edge e) {
  const auto& se = dg.stitch_edges();
  return std::binary_search(se.begin(), se.end(), e) ? EdgeKind::kStitch : EdgeKind::kConflict;
}

}  // namespace

std::vector<Edge> bridge_edges(const DecompositionGraph& dg) {
  const DfsState st = low_link(dg);
  std::vector<Edge> out;
  for (const auto& [p, c] : st.tree_bridges) out.push_back(make_edge(p, c));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<BridgeCut> find_bridges(const DecompositionGraph& dg) {
  const DfsState st = low_link(dg);
  std::vector<BridgeCut> out;
  for (const auto& [parent, child] : st.tree_bridges) {
    BridgeCut cut;
    cut.edge = make_edge(parent, child);
    cut.kind = kind_of(dg, cut.edge);
    std::vector<NodeId> inside, outside;
    const NodeId root = st.root_of[child];
    for (NodeId v = 0; v < dg.size(); ++v) {
      if (st.root_of[v] != root) continue;
      if (st.tin[v] >= st.tin[child] && st.tin[v] <= st.tout[child]) {
        inside.push_back(v);
      } else {
        outside.push_back(v);
      }
    }
    if (cut.edge.u == child) {
      cut.side_a = std::move(inside);
      cut.side_b = std::move(outside);
    } else {
      cut.side_a = std::move(outside);
      cut.side_b = std::move(inside);
    }
    out.push_back(std::move(cut));
  }
  std::sort(out.begin(), out.end(),
            [](const BridgeCut& a, const BridgeCut& b) { return a.edge < b.edge; });
  return out;
}

RotationResult stitch_and_rotate(const BridgeCut& cut, std::span<const Color> color_a,
                                 std::span<const Color> color_b) {
  const Color ca = color_a[cut.edge.u];
  const Color cb = color_b[cut.edge.v];
  RotationResult out;
  for (int k = 0; k < kNumMasks; ++k) {
    const Color rotated = static_cast<Color>((cb + k) % kNumMasks);
    const bool ok = cut.kind == EdgeKind::kConflict ? rotated != ca : rotated == ca;
    if (ok) {
      out.shift = k;
      break;
    }
  }
  out.colors.assign(std::max(color_a.size(), color_b.size()), kUncolored);
  for (NodeId v : cut.side_a) out.colors[v] = color_a[v];
  for (NodeId v : cut.side_b) {
    out.colors[v] = static_cast<Color>((color_b[v] + out.shift) % kNumMasks);
  }
  return out;
}

}  // namespace tplmask
