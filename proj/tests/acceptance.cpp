// Prints one PASS/FAIL line per acceptance criterion; exit status is the
// number of failures.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "instances.hpp"
#include "tplmask/cli.hpp"
#include "tplmask/detect.hpp"
#include "tplmask/exact_solver.hpp"
#include "tplmask/pipeline.hpp"
#include "tplmask/sdp.hpp"

using namespace tplmask;

namespace {

const Rational kAlpha(1, 10);
int failures = 0;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(int id, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": " << detail << std::endl;
  failures += !ok;
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(4);
  s << x;
  return s.str();
}

Layout make_layout(std::vector<Rect> rects) {
  Layout l;
  for (std::size_t k = 0; k < rects.size(); ++k) l.shapes.push_back({static_cast<std::int64_t>(k), rects[k]});
  return l;
}

DecomposeConfig with_solver(SolverChoice s) {
  DecomposeConfig c;
  c.solver = s;
  return c;
}

void oracle_exactness() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1001);
  int bad = 0;
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 2 + k % 11;
    const DecompositionGraph g = testing_support::random_graph(rng, n, 0.3, 0.1);
    const SolveReport ex = solve_exact(g, kAlpha);
    const MaskAssignment bf = brute_force_optimum(g, kAlpha);
    const Cost oracle = testing_support::oracle_optimum(g, 1, 10);
    const bool same = ex.proven_optimal && ex.assignment.exact_objective() == bf.exact_objective() &&
                      weighted_key(ex.assignment.cost(), kAlpha) == weighted_key(oracle, kAlpha) &&
                      ex.assignment.cost().conflicts == bf.cost().conflicts &&
                      ex.assignment.cost().stitches == bf.cost().stitches;
    bad += !same;
  }
  const double t = seconds_since(t0);
  report(1, bad == 0 && t < 30, "200 graphs, " + std::to_string(bad) + " mismatches, " + fmt(t) + " s");
}

void worked_example() {
  const auto t0 = std::chrono::steady_clock::now();
  const DecompositionGraph g(5, {{0, 1}, {0, 2}, {0, 4}, {1, 2}, {1, 4}, {2, 3}, {3, 4}}, {{0, 3}});
  const DecomposeResult r = decompose_graph(g, with_solver(SolverChoice::kSdp));
  const double t = seconds_since(t0);
  bool ok = r.pieces.size() == 1 && r.pieces[0].solver == "sdp" && r.pieces[0].nodes.size() == 5;
  std::string detail;
  if (ok) {
    const Eigen::MatrixXd& X = r.pieces[0].X;
    auto near = [](double a, double b) { return std::abs(a - b) <= 0.05; };
    ok = near(X(0, 3), 1.0) && near(X(2, 4), 1.0) && near(X(0, 1), -0.5) && near(X(0, 2), -0.5) &&
         near(X(0, 4), -0.5);
    detail = "X14=" + fmt(X(0, 3)) + " X35=" + fmt(X(2, 4)) + " X12=" + fmt(X(0, 1)) + " X13=" + fmt(X(0, 2)) +
             " X15=" + fmt(X(0, 4));
  }
  const auto& c = r.assignment.colors;
  const bool grouping = c[0] == c[3] && c[2] == c[4] && c[0] != c[1] && c[0] != c[2] && c[1] != c[2];
  ok = ok && grouping && r.assignment.exact_objective() == Rational(0) && t < 1.0;
  report(2, ok, detail + ", grouping {1,4},{2},{3,5} " + (grouping ? "yes" : "no") + ", objective " +
                    fmt(r.assignment.objective) + ", " + fmt(t) + " s");
}

void relaxation_bound() {
  std::mt19937_64 rng(1003);
  int converged = 0, bad = 0;
  double worst = -1e9;
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 2 + k % 9;
    const DecompositionGraph g = testing_support::random_graph(rng, n, 0.4, 0.15);
    const RelaxationSolution s = solve_relaxation(build_cost_matrix(g, kAlpha), g);
    if (!s.converged) continue;
    ++converged;
    const double opt = boost::rational_cast<double>(brute_force_optimum(g, kAlpha).exact_objective());
    worst = std::max(worst, s.obj_relaxation - opt);
    bad += s.obj_relaxation > opt + 1e-4;
  }
  report(3, bad == 0 && converged > 0,
         std::to_string(converged) + "/100 converged, " + std::to_string(bad) +
             " above the optimum, max(Z_R - OPT) = " + fmt(worst));
}

void reduction_optimality() {
  std::mt19937_64 rng(1004);
  int checked = 0, bad = 0;
  for (int round = 0; round < 5000 && checked < 100; ++round) {
    const Layout l = testing_support::random_small_layout(rng, 9);
    const DecomposeResult r = decompose(l, with_solver(SolverChoice::kExact));
    const auto& g = r.decomposition.graph;
    if (g.size() > 14 || g.edge_count() == 0) continue;
    ++checked;
    const Cost oracle = testing_support::oracle_optimum(g, 1, 10);
    bad += weighted_key(r.assignment.cost(), kAlpha) != weighted_key(oracle, kAlpha);
  }
  report(4, checked == 100 && bad == 0,
         std::to_string(checked) + " layouts, " + std::to_string(bad) + " differ from brute force");
}

void vector_identity() {
  std::mt19937_64 rng(1005);
  int bad = 0;
  for (int k = 0; k < 1000; ++k) {
    const std::size_t n = 1 + k % 15;
    const DecompositionGraph g = testing_support::random_graph(rng, n, 0.35, 0.15);
    const auto colors = testing_support::random_coloring(rng, n);
    bad += discrete_vector_objective(colors, g, kAlpha) != evaluate(g, colors, kAlpha).exact_objective();
  }
  report(5, bad == 0, "1000 pairs, " + std::to_string(bad) + " mismatches");
}

void detection_soundness() {
  std::mt19937_64 rng(1006);
  int flagged = 0, unsound = 0;
  for (int k = 0; k < 500; ++k) {
    const std::size_t n = 4 + k % 9;
    const DecompositionGraph g = testing_support::random_graph(rng, n, 0.5, 0.0);
    if (!propagate_and_check(n, g.conflict_edges()).infeasible()) continue;
    ++flagged;
    unsound += testing_support::oracle_optimum(g, 1, 10).conflicts < 1;
  }
  const auto bowtie = find_adjacent_triangles(4, std::vector<Edge>{{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 3}});
  const bool bowtie_ok = bowtie.size() == 1 && bowtie[0].apex_a == 0 && bowtie[0].apex_b == 3;
  const std::vector<Edge> k4{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  const bool k4_ok = propagate_and_check(4, k4).infeasible();
  std::vector<Edge> gr;
  for (NodeId i = 0; i < 5; ++i) {
    gr.push_back(make_edge(i, (i + 1) % 5));
    gr.push_back(make_edge(5 + i, (i + 4) % 5));
    gr.push_back(make_edge(5 + i, (i + 1) % 5));
    gr.push_back(make_edge(10, 5 + i));
  }
  const bool pinned_ok = !propagate_and_check(11, gr).infeasible() &&
                         testing_support::oracle_optimum(DecompositionGraph(11, gr, {}), 1, 10).conflicts >= 1;
  report(6, flagged > 0 && unsound == 0 && bowtie_ok && k4_ok && pinned_ok,
         std::to_string(flagged) + " infeasible verdicts, " + std::to_string(unsound) + " unsound; bowtie " +
             (bowtie_ok ? "ok" : "missed") + ", K4 " + (k4_ok ? "ok" : "missed") + ", Groetzsch " +
             (pinned_ok ? "not detected" : "unexpected"));
}

void dense_benchmarks() {
  bool ok = true;
  int ran = 0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    GenOptions gen;
    gen.shapes = 40;
    gen.density = 5;
    gen.seed = seed;
    Layout l;
    try {
      l = generate_layout(gen);
    } catch (const GenerationError&) {
      continue;
    }
    ++ran;
    const DecomposeResult ex = decompose(l, with_solver(SolverChoice::kExact));
    const DecomposeResult sd = decompose(l, with_solver(SolverChoice::kSdp));
    const double oe = ex.assignment.objective, os = sd.assignment.objective;
    ok = ok && sd.wall_time < ex.wall_time && os >= oe;
    detail += " [seed " + std::to_string(seed) + ": exact " + fmt(ex.wall_time) + " s obj " + fmt(oe) + ", sdp " +
              fmt(sd.wall_time) + " s obj " + fmt(os) + ", ratio " + (oe > 0 ? fmt(os / oe) : "n/a") + "]";
  }
  report(7, ok && ran > 0, "N=40 density 5, " + std::to_string(ran) + " layouts" + detail);
}

void anchors() {
  const Layout tri = make_layout({{0, 0, 100, 25}, {0, 60, 100, 85}, {130, 0, 155, 85}});
  const Layout k4 = make_layout({{0, 0, 40, 40}, {80, 0, 120, 40}, {0, 80, 40, 120}, {80, 80, 120, 120}});
  const std::size_t tri_exact = decompose(tri, with_solver(SolverChoice::kExact)).cn;
  const std::size_t tri_sdp = decompose(tri, with_solver(SolverChoice::kSdp)).cn;
  const std::size_t k4_exact = decompose(k4, with_solver(SolverChoice::kExact)).cn;
  const std::size_t k4_sdp = decompose(k4, with_solver(SolverChoice::kSdp)).cn;
  report(8, tri_exact == 0 && tri_sdp == 0 && k4_exact == 1 && k4_sdp >= 1,
         "triangle cn " + std::to_string(tri_exact) + "/" + std::to_string(tri_sdp) + ", K4 cn exact " +
             std::to_string(k4_exact) + " sdp " + std::to_string(k4_sdp));
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "tplmask_acceptance";
  fs::create_directories(dir);
  std::ostringstream out, err;
  const std::string layout = (dir / "layout.json").string();
  bool ok = run_cli({"gen", "--shapes", "60", "--density", "3", "--seed", "9", "--out", layout}, out, err) == 0;
  std::string files[2][2];
  for (int run = 0; run < 2 && ok; ++run) {
    const std::string a = (dir / ("assign" + std::to_string(run) + ".json")).string();
    const std::string s = (dir / ("stats" + std::to_string(run) + ".json")).string();
    ok = run_cli({"decompose", "--input", layout, "--solver", "sdp", "--seed", "17", "--reproducible", "--out", a,
                  "--stats", s},
                 out, err) == 0;
    files[run][0] = slurp(a);
    files[run][1] = slurp(s);
  }
  const bool same = ok && !files[0][0].empty() && files[0][0] == files[1][0] && files[0][1] == files[1][1];
  fs::remove_all(dir);
  report(9, same, std::string("assignment and stats files ") + (same ? "byte-identical" : "differ"));
}

}  // namespace

int main() {
  oracle_exactness();
  worked_example();
  relaxation_bound();
  reduction_optimality();
  vector_identity();
  detection_soundness();
  dense_benchmarks();
  anchors();
  determinism();
  return failures;
}
