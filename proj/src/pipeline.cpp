#include "tplmask/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <memory>
#include <queue>
#include <stdexcept>
#include <thread>

#include "tplmask/reduce.hpp"

namespace tplmask {

std::string to_string(SolverChoice s) {
  switch (s) {
    case SolverChoice::kExact: return "exact";
    case SolverChoice::kSdp: return "sdp";
    case SolverChoice::kAuto: return "auto";
  }
  return "auto";
}

SolverChoice parse_solver(const std::string& name) {
  if (name == "exact") return SolverChoice::kExact;
  if (name == "sdp") return SolverChoice::kSdp;
  if (name == "auto") return SolverChoice::kAuto;
  throw std::invalid_argument("unknown solver '" + name + "'");
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Removes nodes without stitch edges that have at most two conflict
// neighbors left. Such a node always finds a free mask on reinsertion, so
// the optimum of the remaining graph is the optimum of the whole.
PeelResult peel_conflict_only(const DecompositionGraph& dg) {
  const std::size_t n = dg.size();
  std::vector<bool> removed(n, false);
  std::vector<bool> has_stitch(n, false);
  std::vector<std::size_t> degree(n, 0);
  for (NodeId v = 0; v < n; ++v) {
    for (const auto& inc : dg.neighbors(v)) {
      if (inc.kind == EdgeKind::kStitch) has_stitch[v] = true;
      else ++degree[v];
    }
  }
  std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
  for (NodeId v = 0; v < n; ++v) {
    if (!has_stitch[v] && degree[v] <= 2) ready.push(v);
  }
  PeelResult out;
  while (!ready.empty()) {
    const NodeId v = ready.top();
    ready.pop();
    if (removed[v]) continue;
    removed[v] = true;
    PeelRecord::Entry entry{v, {}};
    for (const auto& inc : dg.neighbors(v)) {
      if (removed[inc.node]) continue;
      entry.neighbors.push_back(inc.node);
      if (--degree[inc.node] <= 2 && !has_stitch[inc.node]) ready.push(inc.node);
    }
    out.record.stack.push_back(std::move(entry));
  }
  for (NodeId v = 0; v < n; ++v) {
    if (!removed[v]) out.residual.push_back(v);
  }
  return out;
}

PieceReport solve_block(const Component& block, const DecomposeConfig& cfg, Rational alpha,
                        std::vector<Color>& colors) {
  const auto start = Clock::now();
  PieceReport report;
  report.nodes = block.nodes;
  const DecompositionGraph& g = block.graph;
  MaskAssignment local;
  if (g.size() == 1) {
    report.solver = "trivial";
    local = evaluate(g, std::vector<Color>{0}, alpha);
  } else {
    const bool exact = cfg.solver == SolverChoice::kExact ||
                       (cfg.solver == SolverChoice::kAuto && g.size() <= cfg.auto_threshold);
    if (exact) {
      report.solver = "exact";
      SolveReport r = solve_exact(g, alpha, cfg.exact);
      report.nodes_explored = r.nodes_explored;
      report.proven_optimal = r.proven_optimal;
      local = std::move(r.assignment);
    } else {
      report.solver = "sdp";
      report.proven_optimal = false;
      RelaxationOptions opts = cfg.relaxation;
      opts.seed = cfg.seed;
      const RelaxationSolution sol = solve_relaxation(build_cost_matrix(g, alpha), g, opts);
      report.relaxation_converged = sol.converged;
      report.relaxation_objective = sol.obj_relaxation;
      report.X = sol.X;
      if (cfg.rounding == Rounding::kHyperplane) {
        local = round_hyperplane(sol.V, g, alpha, cfg.seed);
      } else {
        MappingResult m = map_to_masks(sol, g, alpha, cfg.mapping);
        report.mapping_degraded = m.degraded;
        local = std::move(m.assignment);
      }
    }
  }
  report.cost = local.cost();
  for (std::size_t k = 0; k < block.nodes.size(); ++k) colors[block.nodes[k]] = local.colors[k];
  report.wall_time = seconds_since(start);
  return report;
}

// Colors a connected graph by solving its two-edge-connected blocks
// separately and rotating blocks across the bridges that join them.
void solve_connected(const DecompositionGraph& dg, const DecomposeConfig& cfg, Rational alpha,
                     std::vector<Color>& colors, std::vector<PieceReport>& reports,
                     std::size_t& bridge_count) {
  const std::vector<Edge> bridges = bridge_edges(dg);
  bridge_count += bridges.size();
  auto without = [&](const std::vector<Edge>& list) {
    std::vector<Edge> out;
    std::set_difference(list.begin(), list.end(), bridges.begin(), bridges.end(),
                        std::back_inserter(out));
    return out;
  };
  const DecompositionGraph cut(dg.size(), without(dg.conflict_edges()), without(dg.stitch_edges()));
  const std::vector<Component> blocks = connected_components(cut);

  std::vector<std::size_t> block_of(dg.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (NodeId v : blocks[b].nodes) block_of[v] = b;
  }

  const std::size_t first = reports.size();
  reports.resize(first + blocks.size());
  const unsigned threads = std::max(1u, std::min<unsigned>(cfg.threads, blocks.size()));
  if (threads == 1) {
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      reports[first + b] = solve_block(blocks[b], cfg, alpha, colors);
    }
  } else {
    // Blocks write disjoint entries of colors and their own report slot.
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t b = next++; b < blocks.size(); b = next++) {
          reports[first + b] = solve_block(blocks[b], cfg, alpha, colors);
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  if (blocks.size() == 1) return;

  // Walk the bridge tree from block 0; each child block is rotated so that
  // the bridge to its already fixed parent costs nothing.
  std::vector<std::vector<std::pair<Edge, EdgeKind>>> tree(blocks.size());
  for (const auto& e : bridges) {
    const bool conflict = std::binary_search(dg.conflict_edges().begin(), dg.conflict_edges().end(), e);
    const EdgeKind kind = conflict ? EdgeKind::kConflict : EdgeKind::kStitch;
    tree[block_of[e.u]].push_back({e, kind});
    tree[block_of[e.v]].push_back({{e.v, e.u}, kind});
  }
  std::vector<bool> fixed(blocks.size(), false);
  std::queue<std::size_t> q;
  q.push(0);
  fixed[0] = true;
  while (!q.empty()) {
    const std::size_t b = q.front();
    q.pop();
    for (const auto& [edge, kind] : tree[b]) {
      const std::size_t child = block_of[edge.v];
      if (fixed[child]) continue;
      BridgeCut bc;
      bc.edge = edge;
      bc.kind = kind;
      const int shift = stitch_and_rotate(bc, colors, colors).shift;
      for (NodeId v : blocks[child].nodes) colors[v] = static_cast<Color>((colors[v] + shift) % kNumMasks);
      fixed[child] = true;
      q.push(child);
    }
  }
}

DecomposeResult run(Decomposition dec, const DecomposeConfig& cfg, std::size_t layout_peeled) {
  const auto start = Clock::now();
  const std::clock_t cpu_start = std::clock();
  cfg.mapping.validate();
  const Rational alpha = rational_from_double(cfg.params.alpha);
  const DecompositionGraph& dg = dec.graph;

  DecomposeResult out;
  out.diagnostics.layout_peeled = layout_peeled;
  out.diagnostics.components = connected_components(dg).size();
  out.diagnostics.witnesses = propagate_and_check(dg.size(), dg.conflict_edges()).witnesses;

  const PeelResult peel = peel_conflict_only(dg);
  out.diagnostics.peeled = peel.record.stack.size();

  std::vector<Color> partial(dg.size(), kUncolored);
  const DecompositionGraph residual = dg.induced(peel.residual);
  for (const auto& comp : connected_components(residual)) {
    std::vector<Color> local(comp.graph.size(), kUncolored);
    const std::size_t first = out.pieces.size();
    solve_connected(comp.graph, cfg, alpha, local, out.pieces, out.diagnostics.bridges);
    for (std::size_t p = first; p < out.pieces.size(); ++p) {
      for (auto& v : out.pieces[p].nodes) v = peel.residual[comp.nodes[v]];
    }
    for (std::size_t k = 0; k < comp.nodes.size(); ++k) partial[peel.residual[comp.nodes[k]]] = local[k];
  }

  const std::vector<Color> colors = reinsert_and_color(peel.record, partial);
  out.assignment = evaluate(dg, colors, alpha);
  out.st = static_cast<std::int64_t>(out.assignment.stitches.size());
  out.cn = static_cast<std::int64_t>(out.assignment.conflicts.size());
  for (const auto& p : out.pieces) out.proven_optimal = out.proven_optimal && p.proven_optimal;
  out.decomposition = std::move(dec);
  out.wall_time = seconds_since(start);
  out.cpu_time = static_cast<double>(std::clock() - cpu_start) / CLOCKS_PER_SEC;
  return out;
}

}  // namespace

DecomposeResult decompose(const Layout& layout, const DecomposeConfig& cfg) {
  validate_layout(layout);
  cfg.params.validate();
  const LayoutGraph lg = build_layout_graph(layout);
  const PeelResult peel = peel_low_degree(lg);
  // Shapes peeled from the layout graph are never split.
  const auto splittable = std::make_unique<bool[]>(layout.shapes.size());
  for (NodeId v : peel.residual) splittable[v] = true;
  Decomposition dec =
      project_and_split(layout, lg, std::span<const bool>(splittable.get(), layout.shapes.size()));
  return run(std::move(dec), cfg, peel.record.stack.size());
}

DecomposeResult decompose_graph(const DecompositionGraph& dg, const DecomposeConfig& cfg) {
  Decomposition dec;
  dec.graph = dg;
  return run(std::move(dec), cfg, 0);
}

std::vector<ComparisonRow> compare_solvers(const Layout& layout, const DecomposeConfig& cfg) {
  std::vector<ComparisonRow> rows;
  for (SolverChoice s : {SolverChoice::kExact, SolverChoice::kSdp}) {
    DecomposeConfig c = cfg;
    c.solver = s;
    const DecomposeResult r = decompose(layout, c);
    ComparisonRow row;
    row.solver = to_string(s);
    row.se = r.decomposition.graph.stitch_edges().size();
    row.ce = r.decomposition.graph.conflict_edges().size();
    row.st = r.st;
    row.cn = r.cn;
    row.objective = r.assignment.objective;
    row.cpu_s = r.cpu_time;
    row.wall_s = r.wall_time;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace tplmask
