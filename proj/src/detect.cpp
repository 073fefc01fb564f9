#include "tplmask/detect.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace tplmask {

std::vector<AdjacentTriangles> find_adjacent_triangles(std::size_t num_nodes,
                                                       std::span<const Edge> conflict_edges) {
  std::vector<std::vector<NodeId>> adj(num_nodes);
  for (const auto& e : conflict_edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  for (auto& a : adj) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  std::vector<Edge> edges(conflict_edges.begin(), conflict_edges.end());
  for (auto& e : edges) e = make_edge(e.u, e.v);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::vector<AdjacentTriangles> out;
  std::vector<NodeId> common;
  for (const auto& e : edges) {
    common.clear();
    std::set_intersection(adj[e.u].begin(), adj[e.u].end(), adj[e.v].begin(), adj[e.v].end(),
                          std::back_inserter(common));
    for (std::size_t i = 0; i < common.size(); ++i) {
      for (std::size_t j = i + 1; j < common.size(); ++j) out.push_back({e, common[i], common[j]});
    }
  }
  return out;
}

DisjointSet::DisjointSet(std::size_t n) : parent_(n), rank_(n, 0) {
  for (std::size_t v = 0; v < n; ++v) parent_[v] = static_cast<NodeId>(v);
}

NodeId DisjointSet::find(NodeId v) {
  NodeId root = v;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[v] != root) {
    const NodeId next = parent_[v];
    parent_[v] = root;
    v = next;
  }
  return root;
}

bool DisjointSet::unite(NodeId a, NodeId b) {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  if (rank_[a] < rank_[b]) std::swap(a, b);
  parent_[b] = a;
  if (rank_[a] == rank_[b]) ++rank_[a];
  return true;
}

namespace {

std::vector<NodeId> link_path(const std::vector<std::vector<NodeId>>& links, NodeId from, NodeId to) {
  constexpr NodeId kNone = std::numeric_limits<NodeId>::max();
  std::vector<NodeId> prev(links.size(), kNone);
  std::queue<NodeId> q;
  q.push(from);
  prev[from] = from;
  while (!q.empty()) {
    const NodeId v = q.front();
    q.pop();
    if (v == to) break;
    for (NodeId w : links[v]) {
      if (prev[w] == kNone) {
        prev[w] = v;
        q.push(w);
      }
    }
  }
  std::vector<NodeId> path;
  if (prev[to] == kNone) return path;
  for (NodeId v = to; v != from; v = prev[v]) path.push_back(v);
  path.push_back(from);
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

DetectionResult propagate_and_check(std::size_t num_nodes, std::span<const Edge> conflict_edges) {
  DetectionResult out;
  out.classes.links = find_adjacent_triangles(num_nodes, conflict_edges);

  DisjointSet dsu(num_nodes);
  std::vector<std::vector<NodeId>> links(num_nodes);
  // Triangles come from the fixed edge set, so one pass reaches the fixpoint.
  for (const auto& t : out.classes.links) {
    dsu.unite(t.apex_a, t.apex_b);
    links[t.apex_a].push_back(t.apex_b);
    links[t.apex_b].push_back(t.apex_a);
  }
  for (auto& l : links) std::sort(l.begin(), l.end());

  constexpr NodeId kNone = std::numeric_limits<NodeId>::max();
  std::vector<NodeId> smallest(num_nodes, kNone);
  for (NodeId v = 0; v < num_nodes; ++v) {
    const NodeId r = dsu.find(v);
    if (smallest[r] == kNone) smallest[r] = v;
  }
  out.classes.class_of.resize(num_nodes);
  for (NodeId v = 0; v < num_nodes; ++v) out.classes.class_of[v] = smallest[dsu.find(v)];

  std::vector<Edge> edges(conflict_edges.begin(), conflict_edges.end());
  for (auto& e : edges) e = make_edge(e.u, e.v);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  for (const auto& e : edges) {
    if (dsu.find(e.u) == dsu.find(e.v)) out.witnesses.push_back({e, link_path(links, e.u, e.v)});
  }
  return out;
}

}  // namespace tplmask
