#include <algorithm>
#include <random>

#include "doctest.h"
#include "instances.hpp"
#include "tplmask/reduce.hpp"

using namespace tplmask;

namespace {

LayoutGraph lg_from(std::size_t n, std::vector<Edge> edges) { return LayoutGraph(n, std::move(edges)); }

bool conflict_free(const LayoutGraph& lg, const std::vector<Color>& colors) {
  return std::all_of(lg.edges().begin(), lg.edges().end(),
                     [&](const Edge& e) { return colors[e.u] != colors[e.v]; });
}

}  // namespace

TEST_CASE("peeling removes a sparse graph completely") {
  // Path 0-1-2-3 plus a pendant triangle 3-4-5.
  const LayoutGraph lg = lg_from(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {3, 5}});
  const PeelResult p = peel_low_degree(lg);
  CHECK(p.residual.empty());
  CHECK(p.record.stack.size() == 6);
  CHECK(p.record.stack.front().node == 0);
  const std::vector<Color> none(6, kUncolored);
  CHECK(conflict_free(lg, reinsert_and_color(p.record, none)));
}

TEST_CASE("peeling keeps a K4 and colors what hangs off it") {
  const LayoutGraph lg = lg_from(6, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}, {3, 4}, {4, 5}});
  const PeelResult p = peel_low_degree(lg);
  CHECK(p.residual == std::vector<NodeId>{0, 1, 2, 3});
  for (const auto& entry : p.record.stack) CHECK(entry.neighbors.size() <= 2);
  std::vector<Color> partial(6, kUncolored);
  partial[0] = 0;
  partial[1] = 1;
  partial[2] = 2;
  partial[3] = 0;
  const auto colors = reinsert_and_color(p.record, partial);
  CHECK(colors[4] != colors[3]);
  CHECK(colors[5] != colors[4]);
}

TEST_CASE("residual of random graphs has minimum degree three") {
  std::mt19937_64 rng(9);
  for (int round = 0; round < 40; ++round) {
    const DecompositionGraph g = testing_support::random_graph(rng, 14, 0.25, 0.0);
    const LayoutGraph lg = lg_from(g.size(), g.conflict_edges());
    const PeelResult p = peel_low_degree(lg);
    for (NodeId v : p.residual) {
      std::size_t inside = 0;
      for (NodeId w : lg.neighbors(v)) inside += std::binary_search(p.residual.begin(), p.residual.end(), w);
      CHECK(inside >= 3);
    }
    CHECK(p.residual.size() + p.record.stack.size() == g.size());
  }
}

TEST_CASE("reinsertion rejects an uncolored neighbor") {
  PeelRecord r;
  r.stack.push_back({0, {1}});
  const std::vector<Color> partial{kUncolored, kUncolored};
  CHECK_THROWS_AS(reinsert_and_color(r, partial), std::invalid_argument);
}

TEST_CASE("bridges of two triangles joined by an edge") {
  const DecompositionGraph g(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}}, {{2, 3}});
  const auto cuts = find_bridges(g);
  REQUIRE(cuts.size() == 1);
  CHECK(cuts[0].edge == Edge{2, 3});
  CHECK(cuts[0].kind == EdgeKind::kStitch);
  CHECK(cuts[0].side_a == std::vector<NodeId>{0, 1, 2});
  CHECK(cuts[0].side_b == std::vector<NodeId>{3, 4, 5});
  CHECK(bridge_edges(g) == std::vector<Edge>{{2, 3}});
}

TEST_CASE("a cycle has no bridges, a path is all bridges") {
  CHECK(bridge_edges(DecompositionGraph(4, {{0, 1}, {1, 2}, {2, 3}}, {{0, 3}})).empty());
  CHECK(bridge_edges(DecompositionGraph(4, {{0, 1}, {1, 2}}, {{2, 3}})).size() == 3);
}

TEST_CASE("bridges match the removal definition") {
  std::mt19937_64 rng(21);
  for (int round = 0; round < 40; ++round) {
    const DecompositionGraph g = testing_support::random_graph(rng, 10, 0.2, 0.08);
    const std::size_t base = connected_components(g).size();
    const auto found = bridge_edges(g);
    for (const auto* list : {&g.conflict_edges(), &g.stitch_edges()}) {
      for (const auto& e : *list) {
        std::vector<Edge> ce = g.conflict_edges(), se = g.stitch_edges();
        std::erase(ce, e);
        std::erase(se, e);
        const bool is_bridge = connected_components(DecompositionGraph(10, ce, se)).size() > base;
        CHECK(std::binary_search(found.begin(), found.end(), e) == is_bridge);
      }
    }
  }
}

TEST_CASE("rotation satisfies the bridge with the smallest shift") {
  BridgeCut cut;
  cut.edge = {0, 1};
  cut.kind = EdgeKind::kConflict;
  cut.side_a = {0};
  cut.side_b = {1, 2};
  const std::vector<Color> a{1, kUncolored, kUncolored};
  const std::vector<Color> b{kUncolored, 1, 2};
  const RotationResult r = stitch_and_rotate(cut, a, b);
  CHECK(r.shift == 1);
  CHECK(r.colors == std::vector<Color>{1, 2, 0});

  cut.kind = EdgeKind::kStitch;
  const RotationResult s = stitch_and_rotate(cut, a, b);
  CHECK(s.shift == 0);
  const std::vector<Color> b2{kUncolored, 0, 2};
  CHECK(stitch_and_rotate(cut, a, b2).shift == 1);
}

TEST_CASE("bridge merge objective equals the sum of the sides") {
  std::mt19937_64 rng(33);
  int checked = 0;
  for (int round = 0; round < 200 && checked < 40; ++round) {
    const DecompositionGraph g = testing_support::random_graph(rng, 9, 0.25, 0.1);
    if (connected_components(g).size() != 1) continue;
    for (const auto& cut : find_bridges(g)) {
      const DecompositionGraph ga = g.induced(cut.side_a), gb = g.induced(cut.side_b);
      const MaskAssignment oa = brute_force_optimum(ga, Rational(1, 10));
      const MaskAssignment ob = brute_force_optimum(gb, Rational(1, 10));
      std::vector<Color> ca(g.size(), kUncolored), cb(g.size(), kUncolored);
      for (std::size_t k = 0; k < cut.side_a.size(); ++k) ca[cut.side_a[k]] = oa.colors[k];
      for (std::size_t k = 0; k < cut.side_b.size(); ++k) cb[cut.side_b[k]] = ob.colors[k];
      const RotationResult merged = stitch_and_rotate(cut, ca, cb);
      const Rational total = evaluate(g, merged.colors, Rational(1, 10)).exact_objective();
      CHECK(total == oa.exact_objective() + ob.exact_objective());
      CHECK(total == brute_force_optimum(g, Rational(1, 10)).exact_objective());
      ++checked;
    }
  }
  CHECK(checked > 10);
}
