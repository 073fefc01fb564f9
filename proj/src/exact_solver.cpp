#include "tplmask/exact_solver.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace tplmask {

namespace {

std::string edge_name(char prefix, Edge e) {
  return std::string(1, prefix) + "_" + std::to_string(e.u) + "_" + std::to_string(e.v);
}

}  // namespace

IlpModel build_ilp(const DecompositionGraph& dg, Rational alpha) {
  IlpModel m;
  m.num_nodes = dg.size();
  m.conflict_edges = dg.conflict_edges();
  m.stitch_edges = dg.stitch_edges();
  m.alpha = alpha;

  for (NodeId v = 0; v < dg.size(); ++v) {
    const std::string id = std::to_string(v);
    m.vars.push_back({"x_" + id + "_1", VarKind::kColorHigh, {v, v}});
    m.vars.push_back({"x_" + id + "_2", VarKind::kColorLow, {v, v}});
  }
  for (const auto& e : m.conflict_edges) {
    m.vars.push_back({edge_name('c', e) + "_1", VarKind::kConflictHighEqual, e});
    m.vars.push_back({edge_name('c', e) + "_2", VarKind::kConflictLowEqual, e});
    m.vars.push_back({edge_name('c', e), VarKind::kConflict, e});
  }
  for (const auto& e : m.stitch_edges) {
    m.vars.push_back({edge_name('s', e) + "_1", VarKind::kStitchHighDiffer, e});
    m.vars.push_back({edge_name('s', e) + "_2", VarKind::kStitchLowDiffer, e});
    m.vars.push_back({edge_name('s', e), VarKind::kStitch, e});
  }

  using R = ConstraintRole;
  for (NodeId v = 0; v < dg.size(); ++v) {
    m.constraints.push_back({R::kColorRange, {{m.color_high(v), 1}, {m.color_low(v), 1}}, 1});
  }
  for (std::size_t k = 0; k < m.conflict_edges.size(); ++k) {
    const Edge e = m.conflict_edges[k];
    const std::size_t c_hi = m.conflict_base(k), c_lo = c_hi + 1, c = c_hi + 2;
    const std::size_t hi_i = m.color_high(e.u), hi_j = m.color_high(e.v);
    const std::size_t lo_i = m.color_low(e.u), lo_j = m.color_low(e.v);
    m.constraints.push_back({R::kHighBothOne, {{hi_i, 1}, {hi_j, 1}, {c_hi, -1}}, 1});
    m.constraints.push_back({R::kHighBothZero, {{hi_i, -1}, {hi_j, -1}, {c_hi, -1}}, -1});
    m.constraints.push_back({R::kLowBothOne, {{lo_i, 1}, {lo_j, 1}, {c_lo, -1}}, 1});
    m.constraints.push_back({R::kLowBothZero, {{lo_i, -1}, {lo_j, -1}, {c_lo, -1}}, -1});
    m.constraints.push_back({R::kConflictBothBits, {{c_hi, 1}, {c_lo, 1}, {c, -1}}, 1});
  }
  for (std::size_t k = 0; k < m.stitch_edges.size(); ++k) {
    const Edge e = m.stitch_edges[k];
    const std::size_t s_hi = m.stitch_base(k), s_lo = s_hi + 1, s = s_hi + 2;
    const std::size_t hi_i = m.color_high(e.u), hi_j = m.color_high(e.v);
    const std::size_t lo_i = m.color_low(e.u), lo_j = m.color_low(e.v);
    m.constraints.push_back({R::kStitchHighForward, {{hi_i, 1}, {hi_j, -1}, {s_hi, -1}}, 0});
    m.constraints.push_back({R::kStitchHighBackward, {{hi_j, 1}, {hi_i, -1}, {s_hi, -1}}, 0});
    m.constraints.push_back({R::kStitchLowForward, {{lo_i, 1}, {lo_j, -1}, {s_lo, -1}}, 0});
    m.constraints.push_back({R::kStitchLowBackward, {{lo_j, 1}, {lo_i, -1}, {s_lo, -1}}, 0});
    m.constraints.push_back({R::kStitchAnyHigh, {{s_hi, 1}, {s, -1}}, 0});
    m.constraints.push_back({R::kStitchAnyLow, {{s_lo, 1}, {s, -1}}, 0});
  }
  return m;
}

EncodingCheck check_encoding(const IlpModel& model, std::span<const int> bits) {
  if (bits.size() != model.vars.size()) {
    throw std::invalid_argument("expected " + std::to_string(model.vars.size()) +
                                " variable values, got " + std::to_string(bits.size()));
  }
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != 0 && bits[i] != 1) {
      throw std::invalid_argument("variable " + model.vars[i].name + " is unassigned");
    }
  }
  EncodingCheck out;
  for (std::size_t k = 0; k < model.constraints.size(); ++k) {
    const auto& con = model.constraints[k];
    int lhs = 0;
    for (const auto& t : con.terms) lhs += t.coef * bits[t.var];
    if (lhs > con.rhs) out.violated.push_back(k);
  }
  for (std::size_t k = 0; k < model.conflict_edges.size(); ++k) {
    out.cost.conflicts += bits[model.conflict_base(k) + 2];
  }
  for (std::size_t k = 0; k < model.stitch_edges.size(); ++k) {
    out.cost.stitches += bits[model.stitch_base(k) + 2];
  }
  out.objective = out.cost.value(model.alpha);
  return out;
}

std::vector<int> encode_coloring(const IlpModel& model, std::span<const Color> colors) {
  if (colors.size() != model.num_nodes) throw std::invalid_argument("coloring size mismatch");
  std::vector<int> bits(model.vars.size(), 0);
  for (NodeId v = 0; v < model.num_nodes; ++v) {
    if (colors[v] >= kNumMasks) throw std::invalid_argument("node " + std::to_string(v) + " is uncolored");
    bits[model.color_high(v)] = colors[v] == 2 ? 1 : 0;
    bits[model.color_low(v)] = colors[v] == 1 ? 1 : 0;
  }
  for (std::size_t k = 0; k < model.conflict_edges.size(); ++k) {
    const Edge e = model.conflict_edges[k];
    const std::size_t base = model.conflict_base(k);
    bits[base] = bits[model.color_high(e.u)] == bits[model.color_high(e.v)];
    bits[base + 1] = bits[model.color_low(e.u)] == bits[model.color_low(e.v)];
    bits[base + 2] = bits[base] && bits[base + 1];
  }
  for (std::size_t k = 0; k < model.stitch_edges.size(); ++k) {
    const Edge e = model.stitch_edges[k];
    const std::size_t base = model.stitch_base(k);
    bits[base] = bits[model.color_high(e.u)] != bits[model.color_high(e.v)];
    bits[base + 1] = bits[model.color_low(e.u)] != bits[model.color_low(e.v)];
    bits[base + 2] = bits[base] || bits[base + 1];
  }
  return bits;
}

std::vector<Color> decode_coloring(const IlpModel& model, std::span<const int> bits) {
  std::vector<Color> colors(model.num_nodes);
  for (NodeId v = 0; v < model.num_nodes; ++v) {
    const int hi = bits[model.color_high(v)];
    const int lo = bits[model.color_low(v)];
    if (hi && lo) throw std::invalid_argument("node " + std::to_string(v) + " has both color bits set");
    colors[v] = hi ? 2 : (lo ? 1 : 0);
  }
  return colors;
}

void write_lp(const IlpModel& model, std::ostream& out) {
  out << "\\ mask assignment: " << model.num_nodes << " nodes, " << model.conflict_edges.size()
      << " conflict edges, " << model.stitch_edges.size() << " stitch edges\n";
  out << "Minimize\n obj:";
  bool first = true;
  auto term = [&](const std::string& coef, const std::string& name) {
    out << (first ? " " : " + ") << coef << name;
    first = false;
  };
  for (std::size_t k = 0; k < model.conflict_edges.size(); ++k) {
    term("", model.vars[model.conflict_base(k) + 2].name);
  }
  const double alpha = boost::rational_cast<double>(model.alpha);
  for (std::size_t k = 0; k < model.stitch_edges.size(); ++k) {
    std::ostringstream coef;
    coef.precision(15);
    coef << alpha << " ";
    term(coef.str(), model.vars[model.stitch_base(k) + 2].name);
  }
  if (first) out << " 0";
  out << "\nSubject To\n";
  for (std::size_t k = 0; k < model.constraints.size(); ++k) {
    const auto& con = model.constraints[k];
    out << " r" << k << ":";
    for (std::size_t t = 0; t < con.terms.size(); ++t) {
      const auto& term_ = con.terms[t];
      const int c = term_.coef;
      if (t == 0) {
        out << (c < 0 ? " -" : " ");
      } else {
        out << (c < 0 ? " - " : " + ");
      }
      if (std::abs(c) != 1) out << std::abs(c) << " ";
      out << model.vars[term_.var].name;
    }
    out << " <= " << con.rhs << "\n";
  }
  out << "Binary\n";
  for (const auto& v : model.vars) out << " " << v.name << "\n";
  out << "End\n";
}

namespace {

class BranchAndBound {
 public:
  BranchAndBound(const DecompositionGraph& dg, Rational alpha, std::uint64_t budget)
      : dg_(dg),
        conflict_w_(alpha.denominator()),
        stitch_w_(alpha.numerator()),
        budget_(budget),
        colors_(dg.size(), kUncolored),
        penalty_(dg.size(), {0, 0, 0}) {
    order_.resize(dg.size());
    std::iota(order_.begin(), order_.end(), NodeId{0});
    std::stable_sort(order_.begin(), order_.end(),
                     [&](NodeId a, NodeId b) { return dg.degree(a) > dg.degree(b); });
  }

  void run() {
    greedy_incumbent();
    if (best_key_ == 0) {
      complete_ = true;
      return;
    }
    complete_ = search(0, 0, -1);
  }

  const std::vector<Color>& best() const { return best_; }
  bool complete() const { return complete_; }
  std::uint64_t explored() const { return explored_; }

 private:
  std::int64_t min_penalty(NodeId v) const {
    const auto& p = penalty_[v];
    return std::min({p[0], p[1], p[2]});
  }

  // Adds (sign=+1) or removes (sign=-1) v's influence on uncolored neighbors.
  void propagate(NodeId v, int sign) {
    const Color c = colors_[v];
    for (const auto& inc : dg_.neighbors(v)) {
      if (colors_[inc.node] != kUncolored) continue;
      auto& p = penalty_[inc.node];
      bound_sum_ -= std::min({p[0], p[1], p[2]});
      if (inc.kind == EdgeKind::kConflict) {
        p[c] += sign * conflict_w_;
      } else {
        for (int k = 0; k < kNumMasks; ++k) {
          if (k != c) p[k] += sign * stitch_w_;
        }
      }
      bound_sum_ += std::min({p[0], p[1], p[2]});
    }
  }

  void assign(NodeId v, Color c) {
    bound_sum_ -= min_penalty(v);
    colors_[v] = c;
    propagate(v, +1);
  }

  void unassign(NodeId v) {
    propagate(v, -1);
    colors_[v] = kUncolored;
    bound_sum_ += min_penalty(v);
  }

  void greedy_incumbent() {
    std::int64_t cost = 0;
    for (NodeId v : order_) {
      const auto& p = penalty_[v];
      Color c = 0;
      for (Color k = 1; k < kNumMasks; ++k) {
        if (p[k] < p[c]) c = k;
      }
      cost += p[c];
      assign(v, c);
    }
    best_ = colors_;
    best_key_ = cost;
    for (auto it = order_.rbegin(); it != order_.rend(); ++it) unassign(*it);
  }

  // Returns false if the budget ran out.
  bool search(std::size_t depth, std::int64_t cost, int max_color) {
    if (depth == order_.size()) {
      if (cost < best_key_) {
        best_key_ = cost;
        best_ = colors_;
      }
      return true;
    }
    const NodeId v = order_[depth];
    const auto pen = penalty_[v];
    const int limit = std::min(max_color + 1, kNumMasks - 1);
    std::array<Color, kNumMasks> tries{0, 1, 2};
    std::stable_sort(tries.begin(), tries.begin() + limit + 1,
                     [&](Color a, Color b) { return pen[a] < pen[b]; });
    for (int k = 0; k <= limit; ++k) {
      const Color c = tries[k];
      if (++explored_ > budget_) return false;
      const std::int64_t next_cost = cost + pen[c];
      assign(v, c);
      const bool prune = next_cost + bound_sum_ >= best_key_;
      bool ok = true;
      if (!prune) ok = search(depth + 1, next_cost, std::max<int>(max_color, c));
      unassign(v);
      if (!ok) return false;
      if (best_key_ == 0) return true;
    }
    return true;
  }

  const DecompositionGraph& dg_;
  std::int64_t conflict_w_;
  std::int64_t stitch_w_;
  std::uint64_t budget_;
  std::vector<NodeId> order_;
  std::vector<Color> colors_;
  std::vector<std::array<std::int64_t, kNumMasks>> penalty_;
  std::int64_t bound_sum_ = 0;
  std::vector<Color> best_;
  std::int64_t best_key_ = std::numeric_limits<std::int64_t>::max();
  std::uint64_t explored_ = 0;
  bool complete_ = false;
};

}  // namespace

SolveReport solve_exact(const DecompositionGraph& dg, Rational alpha, const ExactOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  SolveReport report;
  if (dg.empty()) {
    report.assignment = evaluate(dg, {}, alpha);
    report.proven_optimal = true;
    return report;
  }
  BranchAndBound bb(dg, alpha, options.node_budget);
  bb.run();
  report.assignment = evaluate(dg, bb.best(), alpha);
  report.nodes_explored = bb.explored();
  report.proven_optimal = bb.complete();
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace tplmask
