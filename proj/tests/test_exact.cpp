#include <random>
#include <sstream>

#include "doctest.h"
#include "instances.hpp"
#include "tplmask/exact_solver.hpp"

using namespace tplmask;

namespace {

const Rational kAlpha(1, 10);

std::size_t count_role(const IlpModel& m, ConstraintRole role) {
  std::size_t n = 0;
  for (const auto& c : m.constraints) n += c.role == role;
  return n;
}

}  // namespace

TEST_CASE("model sizes follow the encoding") {
  const IlpModel single = build_ilp(DecompositionGraph(1, {}, {}), kAlpha);
  CHECK(single.vars.size() == 2);
  CHECK(single.constraints.size() == 1);
  CHECK(single.constraints[0].role == ConstraintRole::kColorRange);

  const IlpModel ce = build_ilp(DecompositionGraph(2, {{0, 1}}, {}), kAlpha);
  CHECK(ce.vars.size() == 4 + 3);
  CHECK(ce.constraints.size() == 2 + 5);
  for (auto role : {ConstraintRole::kHighBothOne, ConstraintRole::kHighBothZero, ConstraintRole::kLowBothOne,
                    ConstraintRole::kLowBothZero, ConstraintRole::kConflictBothBits}) {
    CHECK(count_role(ce, role) == 1);
  }
  CHECK(ce.vars[ce.conflict_base(0) + 2].name == "c_0_1");

  const IlpModel se = build_ilp(DecompositionGraph(2, {}, {{0, 1}}), kAlpha);
  CHECK(se.vars.size() == 4 + 3);
  CHECK(se.constraints.size() == 2 + 6);
  CHECK(se.vars[se.stitch_base(0) + 2].name == "s_0_1");

  std::mt19937_64 rng(1);
  const DecompositionGraph g = testing_support::random_graph(rng, 9, 0.3, 0.1);
  const IlpModel m = build_ilp(g, kAlpha);
  CHECK(m.constraints.size() == g.size() + 5 * g.conflict_edges().size() + 6 * g.stitch_edges().size());
}

TEST_CASE("hand substitution into one conflict edge") {
  const IlpModel m = build_ilp(DecompositionGraph(2, {{0, 1}}, {}), kAlpha);
  // Both nodes color 0, every conflict variable set.
  const std::vector<int> clash{0, 0, 0, 0, 1, 1, 1};
  const EncodingCheck a = check_encoding(m, clash);
  CHECK(a.feasible());
  CHECK(a.objective == Rational(1));
  // Colors 0 and 1: high bits equal, low bits differ, c = 0.
  const std::vector<int> apart{0, 0, 0, 1, 1, 0, 0};
  const EncodingCheck b = check_encoding(m, apart);
  CHECK(b.feasible());
  CHECK(b.objective == Rational(0));
  // Same colors but c = 0 breaks the both-bits constraint.
  const std::vector<int> cheat{0, 0, 0, 0, 1, 1, 0};
  CHECK_FALSE(check_encoding(m, cheat).feasible());
}

TEST_CASE("forbidden bit pair and unassigned variables") {
  const IlpModel m = build_ilp(DecompositionGraph(1, {}, {}), kAlpha);
  const std::vector<int> both{1, 1};
  const EncodingCheck c = check_encoding(m, both);
  REQUIRE(c.violated.size() == 1);
  CHECK(m.constraints[c.violated[0]].role == ConstraintRole::kColorRange);
  const std::vector<int> unset{0, -1};
  CHECK_THROWS_WITH_AS(check_encoding(m, unset), "variable x_0_2 is unassigned", std::invalid_argument);
  CHECK_THROWS_AS(decode_coloring(m, both), std::invalid_argument);
}

TEST_CASE("minimal completion reproduces the graph objective") {
  std::mt19937_64 rng(2);
  for (int round = 0; round < 300; ++round) {
    const std::size_t n = 1 + round % 10;
    const DecompositionGraph g = testing_support::random_graph(rng, n, 0.35, 0.15);
    const IlpModel m = build_ilp(g, kAlpha);
    const auto colors = testing_support::random_coloring(rng, n);
    const auto bits = encode_coloring(m, colors);
    const EncodingCheck check = check_encoding(m, bits);
    const MaskAssignment direct = evaluate(g, colors, kAlpha);
    CHECK(check.feasible());
    CHECK(check.cost == direct.cost());
    CHECK(check.objective == direct.exact_objective());
    CHECK(decode_coloring(m, bits) == colors);
  }
}

TEST_CASE("no feasible bit vector undercuts its decoded coloring") {
  // Exhaustive over all 2^(2*3 + 3*3) vectors of a triangle with one stitch.
  const DecompositionGraph g(3, {{0, 1}, {1, 2}}, {{0, 2}});
  const IlpModel m = build_ilp(g, kAlpha);
  const std::size_t nv = m.vars.size();
  std::size_t feasible = 0;
  for (std::uint32_t mask = 0; mask < (1u << nv); ++mask) {
    std::vector<int> bits(nv);
    for (std::size_t i = 0; i < nv; ++i) bits[i] = (mask >> i) & 1;
    const EncodingCheck c = check_encoding(m, bits);
    if (!c.feasible()) continue;
    ++feasible;
    const auto colors = decode_coloring(m, bits);
    CHECK(c.objective >= evaluate(g, colors, kAlpha).exact_objective());
  }
  CHECK(feasible > 0);
}

TEST_CASE("LP export") {
  const IlpModel m = build_ilp(DecompositionGraph(3, {{0, 1}}, {{1, 2}}), kAlpha);
  std::ostringstream out;
  write_lp(m, out);
  const std::string lp = out.str();
  CHECK(lp.find("Minimize\n obj: c_0_1 + 0.1 s_1_2\n") != std::string::npos);
  CHECK(lp.find("Subject To\n") != std::string::npos);
  CHECK(lp.find("Binary\n") != std::string::npos);
  CHECK(lp.rfind("End\n") == lp.size() - 4);
  std::size_t rows = 0;
  for (std::size_t p = lp.find("\n r"); p != std::string::npos; p = lp.find("\n r", p + 1)) ++rows;
  CHECK(rows == m.constraints.size());
}

TEST_CASE("exact solver anchors") {
  const SolveReport tri = solve_exact(DecompositionGraph(3, {{0, 1}, {1, 2}, {0, 2}}, {}), kAlpha);
  CHECK(tri.proven_optimal);
  CHECK(tri.assignment.exact_objective() == Rational(0));

  const DecompositionGraph k4(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}, {});
  CHECK(solve_exact(k4, kAlpha).assignment.exact_objective() == Rational(1));

  const DecompositionGraph ivd(5, {{0, 1}, {0, 2}, {0, 4}, {1, 2}, {1, 4}, {2, 3}, {3, 4}}, {{0, 3}});
  const SolveReport r = solve_exact(ivd, kAlpha);
  CHECK(r.assignment.exact_objective() == Rational(0));
  const auto& c = r.assignment.colors;
  CHECK(c[0] == c[3]);
  CHECK(c[2] == c[4]);
  CHECK(c[0] != c[1]);
  CHECK(c[1] != c[2]);
  CHECK(c[0] != c[2]);
}

TEST_CASE("exact solver matches the oracle") {
  std::mt19937_64 rng(4);
  for (int round = 0; round < 80; ++round) {
    const std::size_t n = 2 + round % 10;
    const DecompositionGraph g = testing_support::random_graph(rng, n, 0.35, 0.12);
    const SolveReport r = solve_exact(g, kAlpha);
    CHECK(r.proven_optimal);
    CHECK(weighted_key(r.assignment.cost(), kAlpha) ==
          weighted_key(testing_support::oracle_optimum(g, 1, 10), kAlpha));
    const IlpModel m = build_ilp(g, kAlpha);
    const EncodingCheck check = check_encoding(m, encode_coloring(m, r.assignment.colors));
    CHECK(check.feasible());
    CHECK(check.objective == r.assignment.exact_objective());
  }
}

TEST_CASE("adding a conflict edge never lowers the optimum") {
  std::mt19937_64 rng(6);
  for (int round = 0; round < 40; ++round) {
    const DecompositionGraph g = testing_support::random_graph(rng, 9, 0.3, 0.1);
    std::vector<Edge> ce = g.conflict_edges();
    for (NodeId i = 0; i < 9; ++i) {
      for (NodeId j = i + 1; j < 9; ++j) {
        const Edge e{i, j};
        if (std::find(ce.begin(), ce.end(), e) != ce.end()) continue;
        if (std::find(g.stitch_edges().begin(), g.stitch_edges().end(), e) != g.stitch_edges().end()) continue;
        ce.push_back(e);
        i = j = 9;
      }
    }
    const DecompositionGraph more(9, ce, g.stitch_edges());
    CHECK(solve_exact(more, kAlpha).assignment.exact_objective() >=
          solve_exact(g, kAlpha).assignment.exact_objective());
  }
}

TEST_CASE("budget exhaustion keeps the incumbent") {
  std::mt19937_64 rng(8);
  const DecompositionGraph g = testing_support::random_graph(rng, 22, 0.5, 0.0);
  ExactOptions tiny;
  tiny.node_budget = 10;
  const SolveReport r = solve_exact(g, kAlpha, tiny);
  CHECK_FALSE(r.proven_optimal);
  CHECK(r.assignment.colors.size() == 22);
  CHECK(evaluate(g, r.assignment.colors, kAlpha).cost() == r.assignment.cost());
}
