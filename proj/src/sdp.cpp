#include "tplmask/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include "tplmask/detect.hpp"

namespace tplmask {

CostMatrix build_cost_matrix(const DecompositionGraph& dg, Rational alpha) {
  const auto n = static_cast<Eigen::Index>(dg.size());
  CostMatrix c{Eigen::MatrixXd::Zero(n, n)};
  const double a = boost::rational_cast<double>(alpha);
  for (const auto& e : dg.conflict_edges()) c.A(e.u, e.v) = c.A(e.v, e.u) = 1.0;
  for (const auto& e : dg.stitch_edges()) c.A(e.u, e.v) = c.A(e.v, e.u) = -a;
  return c;
}

namespace {

struct Term {
  Eigen::Index i;
  Eigen::Index j;
  double weight;  // A_ij
  int conflict;   // index into multipliers, -1 for stitch edges
};

class AugmentedLagrangian {
 public:
  AugmentedLagrangian(const CostMatrix& cost, const DecompositionGraph& dg) {
    for (const auto& e : dg.conflict_edges()) {
      terms_.push_back({e.u, e.v, cost.A(e.u, e.v), static_cast<int>(multipliers_.size())});
      multipliers_.push_back(0.0);
    }
    for (const auto& e : dg.stitch_edges()) terms_.push_back({e.u, e.v, cost.A(e.u, e.v), -1});
  }

  double penalty = 1.0;

  double value(const Eigen::MatrixXd& V) const {
    double f = 0.0;
    for (const auto& t : terms_) {
      const double x = V.row(t.i).dot(V.row(t.j));
      f += t.weight * x;
      if (t.conflict >= 0) {
        const double s = std::max(0.0, -0.5 - x + multipliers_[t.conflict] / penalty);
        f += 0.5 * penalty * s * s;
      }
    }
    return f;
  }

  /// Riemannian gradient (tangent to each row's sphere).
  Eigen::MatrixXd gradient(const Eigen::MatrixXd& V) const {
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(V.rows(), V.cols());
    for (const auto& t : terms_) {
      const double x = V.row(t.i).dot(V.row(t.j));
      double w = t.weight;
      if (t.conflict >= 0) {
        w -= penalty * std::max(0.0, -0.5 - x + multipliers_[t.conflict] / penalty);
      }
      G.row(t.i) += w * V.row(t.j);
      G.row(t.j) += w * V.row(t.i);
    }
    for (Eigen::Index i = 0; i < V.rows(); ++i) G.row(i) -= G.row(i).dot(V.row(i)) * V.row(i);
    return G;
  }

  double max_violation(const Eigen::MatrixXd& V) const {
    double worst = 0.0;
    for (const auto& t : terms_) {
      if (t.conflict < 0) continue;
      worst = std::max(worst, -0.5 - V.row(t.i).dot(V.row(t.j)));
    }
    return worst;
  }

  void update_multipliers(const Eigen::MatrixXd& V) {
    for (const auto& t : terms_) {
      if (t.conflict < 0) continue;
      const double g = -0.5 - V.row(t.i).dot(V.row(t.j));
      multipliers_[t.conflict] = std::max(0.0, multipliers_[t.conflict] + penalty * g);
    }
  }

 private:
  std::vector<Term> terms_;
  std::vector<double> multipliers_;
};

void normalize_rows(Eigen::MatrixXd& V) {
  for (Eigen::Index i = 0; i < V.rows(); ++i) {
    const double norm = V.row(i).norm();
    if (norm > 0) {
      V.row(i) /= norm;
    } else {
      V.row(i).setZero();
      V(i, 0) = 1.0;
    }
  }
}

struct InnerResult {
  double gradient_norm;
  int iterations;
};

// Barzilai-Borwein steps with a nonmonotone Armijo test against the worst
// of the last few values.
InnerResult minimize_on_spheres(const AugmentedLagrangian& al, Eigen::MatrixXd& V, double tolerance,
                                int max_iterations) {
  constexpr std::size_t kMemory = 10;
  double f = al.value(V);
  Eigen::MatrixXd G = al.gradient(V);
  double gnorm = G.norm();
  std::vector<double> recent{f};
  double step = 1.0 / std::max(1.0, gnorm);
  int it = 0;
  for (; it < max_iterations && gnorm >= tolerance; ++it) {
    const double g2 = gnorm * gnorm;
    const double reference = *std::max_element(recent.begin(), recent.end());
    Eigen::MatrixXd trial;
    double f_trial = f;
    bool accepted = false;
    for (int backtrack = 0; backtrack < 60; ++backtrack) {
      trial = V - step * G;
      normalize_rows(trial);
      f_trial = al.value(trial);
      if (f_trial <= reference - 1e-4 * step * g2) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    Eigen::MatrixXd G_next = al.gradient(trial);
    const Eigen::MatrixXd s = trial - V;
    const Eigen::MatrixXd y = G_next - G;
    const double sy = (s.array() * y.array()).sum();
    step = sy > 0 ? std::clamp(s.squaredNorm() / sy, 1e-10, 1e10) : std::min(2.0 * step, 1e10);
    V = std::move(trial);
    G = std::move(G_next);
    f = f_trial;
    gnorm = G.norm();
    recent.push_back(f);
    if (recent.size() > kMemory) recent.erase(recent.begin());
  }
  return {gnorm, it};
}

void fill_objectives(RelaxationSolution& sol, const CostMatrix& cost, const DecompositionGraph& dg) {
  sol.obj_simplified = 0.0;
  sol.obj_relaxation = 0.0;
  for (const auto& e : dg.conflict_edges()) {
    const double x = sol.X(e.u, e.v);
    sol.obj_simplified += x;
    sol.obj_relaxation += 2.0 / 3.0 * (x + 0.5);
  }
  for (const auto& e : dg.stitch_edges()) {
    const double x = sol.X(e.u, e.v);
    const double alpha = -cost.A(e.u, e.v);
    sol.obj_simplified -= alpha * x;
    sol.obj_relaxation += 2.0 * alpha / 3.0 * (1.0 - x);
  }
}

}  // namespace

RelaxationSolution LowRankRelaxation::solve(const CostMatrix& cost, const DecompositionGraph& dg) const {
  const auto n = static_cast<Eigen::Index>(dg.size());
  if (n == 0) throw std::invalid_argument("relaxation needs at least one node");
  if (cost.A.rows() != n || cost.A.cols() != n) throw std::invalid_argument("cost matrix size mismatch");
  const Eigen::Index rank = std::min<Eigen::Index>(n, std::max(1, options_.max_rank));

  RelaxationSolution best;
  bool have_best = false;
  for (int restart = 0; restart < std::max(1, options_.restarts); ++restart) {
    std::seed_seq seq{options_.seed, static_cast<std::uint64_t>(restart)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd V(n, rank);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index k = 0; k < rank; ++k) V(i, k) = normal(rng);
    }
    normalize_rows(V);

    AugmentedLagrangian al(cost, dg);
    al.penalty = options_.initial_penalty;
    RelaxationSolution sol;
    double previous_violation = std::numeric_limits<double>::infinity();
    double inner_tolerance = 1e-2;
    for (int round = 0; round < options_.max_outer_rounds; ++round) {
      const InnerResult inner =
          minimize_on_spheres(al, V, std::max(inner_tolerance, 0.1 * options_.gradient_tolerance),
                              options_.max_inner_iterations);
      sol.iterations += inner.iterations;
      sol.gradient_norm = inner.gradient_norm;
      sol.max_violation = al.max_violation(V);
      if (sol.max_violation < options_.feasibility_tolerance &&
          sol.gradient_norm < options_.gradient_tolerance) {
        sol.converged = true;
        break;
      }
      al.update_multipliers(V);
      if (sol.max_violation > options_.feasibility_tolerance &&
          sol.max_violation > 0.25 * previous_violation) {
        al.penalty = std::min(al.penalty * options_.penalty_growth, options_.max_penalty);
      }
      previous_violation = sol.max_violation;
      inner_tolerance = std::max(inner_tolerance * 0.1, 0.1 * options_.gradient_tolerance);
    }
    sol.V = V;
    sol.X = V * V.transpose();
    fill_objectives(sol, cost, dg);

    const bool better = !have_best || (sol.converged && !best.converged) ||
                        (sol.converged == best.converged &&
                         sol.obj_simplified + sol.max_violation <
                             best.obj_simplified + best.max_violation - 1e-12);
    if (better) {
      best = std::move(sol);
      have_best = true;
    }
  }
  return best;
}

RelaxationSolution solve_relaxation(const CostMatrix& cost, const DecompositionGraph& dg,
                                    const RelaxationOptions& options) {
  return LowRankRelaxation(options).solve(cost, dg);
}

namespace {

// Point of the plane with coordinates (x, y * sqrt(3)), x and y rational.
struct SqrtThreeVector {
  Rational x;
  Rational y;
};

Rational dot(const SqrtThreeVector& a, const SqrtThreeVector& b) { return a.x * b.x + 3 * a.y * b.y; }

const std::array<SqrtThreeVector, kNumMasks> kMaskVectors = {{
    {Rational(1), Rational(0)},
    {Rational(-1, 2), Rational(1, 2)},
    {Rational(-1, 2), Rational(-1, 2)},
}};

}  // namespace

Rational discrete_vector_objective(std::span<const Color> colors, const DecompositionGraph& dg,
                                   Rational alpha) {
  if (colors.size() != dg.size()) throw std::invalid_argument("coloring size mismatch");
  for (std::size_t v = 0; v < colors.size(); ++v) {
    if (colors[v] >= kNumMasks) throw std::invalid_argument("node " + std::to_string(v) + " is uncolored");
  }
  Rational total(0);
  for (const auto& e : dg.conflict_edges()) {
    total += Rational(2, 3) * (dot(kMaskVectors[colors[e.u]], kMaskVectors[colors[e.v]]) + Rational(1, 2));
  }
  for (const auto& e : dg.stitch_edges()) {
    total += Rational(2, 3) * alpha * (Rational(1) - dot(kMaskVectors[colors[e.u]], kMaskVectors[colors[e.v]]));
  }
  return total;
}

void MappingParams::validate() const {
  if (union_levels.size() != sepa_levels.size()) {
    throw std::invalid_argument("union and separation level lists differ in length");
  }
  for (std::size_t k = 0; k < union_levels.size(); ++k) {
    if (!(union_levels[k] > -0.5 && union_levels[k] <= 1.0)) {
      throw std::invalid_argument("union level must lie in (-1/2, 1]");
    }
    if (!(sepa_levels[k] >= -1.0 && sepa_levels[k] < union_levels[k])) {
      throw std::invalid_argument("separation level must lie in [-1, union level)");
    }
  }
}

namespace {

struct Triplet {
  double x;
  NodeId i;
  NodeId j;
};

// Descending X, ties by (i, j) ascending.
bool triplet_order(const Triplet& a, const Triplet& b) {
  if (a.x != b.x) return a.x > b.x;
  return a.i != b.i ? a.i < b.i : a.j < b.j;
}

class SeparatedGroups {
 public:
  explicit SeparatedGroups(std::size_t n) : dsu_(n), separated_(n), groups_(n) {}

  NodeId find(NodeId v) { return dsu_.find(v); }
  std::size_t groups() const { return groups_; }

  bool compatible(NodeId i, NodeId j) {
    const NodeId a = find(i), b = find(j);
    return a != b && !separated_[a].contains(b);
  }

  void unite(NodeId i, NodeId j) {
    const NodeId a = find(i), b = find(j);
    if (!dsu_.unite(a, b)) return;
    --groups_;
    const NodeId root = find(a);
    const NodeId other = root == a ? b : a;
    for (NodeId s : separated_[other]) {
      separated_[s].erase(other);
      separated_[s].insert(root);
      separated_[root].insert(s);
    }
    separated_[other].clear();
  }

  /// Returns false when both nodes already share a group.
  bool separate(NodeId i, NodeId j) {
    const NodeId a = find(i), b = find(j);
    if (a == b) return false;
    separated_[a].insert(b);
    separated_[b].insert(a);
    return true;
  }

 private:
  DisjointSet dsu_;
  std::vector<std::set<NodeId>> separated_;
  std::size_t groups_;
};

}  // namespace

MappingResult map_to_masks(const Eigen::MatrixXd& X, const DecompositionGraph& dg, Rational alpha,
                           const MappingParams& params) {
  params.validate();
  const std::size_t n = dg.size();
  if (static_cast<std::size_t>(X.rows()) != n || static_cast<std::size_t>(X.cols()) != n) {
    throw std::invalid_argument("X size does not match the graph");
  }
  std::vector<Triplet> triplets;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      if (X(i, j) != 0.0) triplets.push_back({X(i, j), i, j});
    }
  }
  std::sort(triplets.begin(), triplets.end(), triplet_order);

  MappingResult out;
  SeparatedGroups groups(n);
  for (std::size_t round = 0; round < params.union_levels.size(); ++round) {
    for (const auto& t : triplets) {
      if (t.x <= params.union_levels[round]) break;
      if (groups.compatible(t.i, t.j)) groups.unite(t.i, t.j);
    }
    for (auto it = triplets.rbegin(); it != triplets.rend(); ++it) {
      if (it->x >= params.sepa_levels[round]) break;
      if (!groups.separate(it->i, it->j)) ++out.ignored_separations;
    }
  }
  // Incompatibility and shared membership never revert, so one pass suffices.
  for (const auto& t : triplets) {
    if (groups.groups() <= kNumMasks) break;
    if (groups.compatible(t.i, t.j)) groups.unite(t.i, t.j);
  }
  if (groups.groups() > kNumMasks) {
    // Forced unions take the highest remaining cross-group pair. Zero
    // entries count here, and groups only merge, so one sorted pass works.
    out.degraded = true;
    std::vector<Triplet> all;
    all.reserve(n * (n - 1) / 2);
    for (NodeId i = 0; i < n; ++i) {
      for (NodeId j = i + 1; j < n; ++j) all.push_back({X(i, j), i, j});
    }
    std::sort(all.begin(), all.end(), triplet_order);
    for (const auto& t : all) {
      if (groups.groups() <= kNumMasks) break;
      if (groups.find(t.i) != groups.find(t.j)) groups.unite(t.i, t.j);
    }
  }

  constexpr Color kNone = kUncolored;
  std::vector<Color> mask_of_root(n, kNone);
  std::vector<Color> colors(n);
  Color next = 0;
  for (NodeId v = 0; v < n; ++v) {
    const NodeId r = groups.find(v);
    if (mask_of_root[r] == kNone) mask_of_root[r] = next++;
    colors[v] = mask_of_root[r];
  }
  out.assignment = evaluate(dg, colors, alpha);
  return out;
}

MaskAssignment round_hyperplane(const Eigen::MatrixXd& V, const DecompositionGraph& dg,
                                Rational alpha, std::uint64_t seed) {
  const std::size_t n = dg.size();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd r(V.cols());
  for (Eigen::Index k = 0; k < r.size(); ++k) r(k) = normal(rng);
  const Eigen::VectorXd proj = V * r;

  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return proj(a) > proj(b); });

  std::vector<Color> colors(n, kUncolored);
  for (Color mask = 0; mask + 1 < kNumMasks; ++mask) {
    for (NodeId v : order) {
      if (colors[v] != kUncolored) continue;
      bool blocked = false;
      for (const auto& inc : dg.neighbors(v)) {
        if (inc.kind == EdgeKind::kConflict && colors[inc.node] == mask) {
          blocked = true;
          break;
        }
      }
      if (!blocked) colors[v] = mask;
    }
  }
  for (auto& c : colors) {
    if (c == kUncolored) c = kNumMasks - 1;
  }
  return evaluate(dg, colors, alpha);
}

}  // namespace tplmask
