#include "tplmask/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

namespace tplmask {

using nlohmann::json;

AssignmentFile assignment_file(const DecomposeResult& result) {
  AssignmentFile f;
  const auto& segs = result.decomposition.segments;
  for (NodeId v = 0; v < result.assignment.colors.size(); ++v) {
    const std::int64_t id = segs.empty() ? v : segs[v].id;
    f.masks[id] = result.assignment.colors[v];
  }
  for (const auto& e : result.assignment.stitches) f.stitches.push_back({e.u, e.v});
  for (const auto& e : result.assignment.conflicts) f.conflicts.push_back({e.u, e.v});
  return f;
}

std::string assignment_to_json(const AssignmentFile& file) {
  json masks = json::object();
  for (const auto& [id, mask] : file.masks) masks[std::to_string(id)] = mask;
  json doc;
  doc["masks"] = masks;
  doc["stitches"] = file.stitches;
  doc["conflicts"] = file.conflicts;
  return doc.dump(1) + "\n";
}

AssignmentFile parse_assignment(std::string_view json_text) {
  const json doc = json::parse(json_text);
  AssignmentFile f;
  for (const auto& [key, value] : doc.at("masks").items()) {
    const int mask = value.get<int>();
    if (mask < 0 || mask >= kNumMasks) throw std::invalid_argument("mask out of range for " + key);
    f.masks[std::stoll(key)] = mask;
  }
  f.stitches = doc.at("stitches").get<std::vector<std::array<NodeId, 2>>>();
  f.conflicts = doc.at("conflicts").get<std::vector<std::array<NodeId, 2>>>();
  return f;
}

std::string stats_to_json(const DecomposeResult& result, SolverChoice solver, bool reproducible) {
  const auto& dg = result.decomposition.graph;
  json witnesses = json::array();
  for (const auto& w : result.diagnostics.witnesses) {
    witnesses.push_back({{"edge", {w.edge.u, w.edge.v}}, {"path", w.path}});
  }
  json doc;
  doc["components"] = result.diagnostics.components;
  doc["SE"] = dg.stitch_edges().size();
  doc["CE"] = dg.conflict_edges().size();
  doc["st"] = result.st;
  doc["cn"] = result.cn;
  doc["objective"] = result.assignment.objective;
  doc["cpu_s"] = reproducible ? 0.0 : result.cpu_time;
  doc["solver"] = to_string(solver);
  doc["un3colorable_witnesses"] = witnesses;
  return doc.dump(1) + "\n";
}

DecompositionGraph parse_edge_list(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool have_count = false;
  std::size_t n = 0;
  std::vector<Edge> ce, se;
  auto fail = [&](const std::string& what) {
    throw std::invalid_argument("edge list line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string head;
    if (!(fields >> head)) continue;
    if (!have_count) {
      std::size_t used = 0;
      try {
        n = std::stoul(head, &used);
      } catch (const std::exception&) {
        fail("expected node count");
      }
      if (used != head.size()) fail("expected node count");
      have_count = true;
      continue;
    }
    long long u = -1, v = -1;
    std::string extra;
    if ((head != "C" && head != "S") || !(fields >> u >> v) || (fields >> extra)) {
      fail("expected 'C u v' or 'S u v'");
    }
    if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= n || static_cast<std::size_t>(v) >= n) {
      fail("node id out of range");
    }
    if (u == v) fail("self loop");
    (head == "C" ? ce : se).push_back(make_edge(static_cast<NodeId>(u), static_cast<NodeId>(v)));
  }
  if (!have_count) throw std::invalid_argument("edge list is empty");
  return DecompositionGraph(n, std::move(ce), std::move(se));
}

std::string edge_list_text(const DecompositionGraph& dg) {
  std::ostringstream out;
  out << dg.size() << "\n";
  for (const auto& e : dg.conflict_edges()) out << "C " << e.u << " " << e.v << "\n";
  for (const auto& e : dg.stitch_edges()) out << "S " << e.u << " " << e.v << "\n";
  return out.str();
}

std::string render_svg(const Decomposition& dec, const MaskAssignment& assignment) {
  static constexpr std::array<const char*, kNumMasks> kFill = {"#4e79a7", "#f28e2b", "#59a14f"};
  if (assignment.colors.size() != dec.segments.size()) {
    throw std::invalid_argument("assignment does not cover every segment");
  }
  std::int64_t x_lo = 0, y_lo = 0, x_hi = 1, y_hi = 1;
  if (!dec.segments.empty()) {
    x_lo = y_lo = std::numeric_limits<std::int64_t>::max();
    x_hi = y_hi = std::numeric_limits<std::int64_t>::min();
    for (const auto& s : dec.segments) {
      x_lo = std::min(x_lo, s.rect.x_lo);
      y_lo = std::min(y_lo, s.rect.y_lo);
      x_hi = std::max(x_hi, s.rect.x_hi);
      y_hi = std::max(y_hi, s.rect.y_hi);
    }
  }
  const std::int64_t pad = 20;
  // Layout y grows upward, SVG y grows downward.
  auto sy = [&](double y) { return static_cast<double>(y_hi) - y; };
  auto center = [&](NodeId v) {
    const Rect& r = dec.segments[v].rect;
    return std::pair<double, double>{(r.x_lo + r.x_hi) / 2.0, sy((r.y_lo + r.y_hi) / 2.0)};
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << x_lo - pad << " " << -pad << " "
      << x_hi - x_lo + 2 * pad << " " << y_hi - y_lo + 2 * pad << "\">\n";
  for (const auto& s : dec.segments) {
    const Rect& r = s.rect;
    out << "<rect x=\"" << r.x_lo << "\" y=\"" << sy(r.y_hi) << "\" width=\"" << r.width()
        << "\" height=\"" << r.height() << "\" fill=\"" << kFill[assignment.colors[s.id]]
        << "\" data-segment=\"" << s.id << "\" data-shape=\"" << s.shape_id << "\"/>\n";
  }
  auto line = [&](const Edge& e, const char* style) {
    const auto [x1, y1] = center(e.u);
    const auto [x2, y2] = center(e.v);
    out << "<line x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2 << "\" y2=\"" << y2 << "\" "
        << style << "/>\n";
  };
  for (const auto& e : assignment.conflicts) line(e, "stroke=\"red\" stroke-width=\"3\"");
  for (const auto& e : assignment.stitches) {
    line(e, "stroke=\"black\" stroke-width=\"2\" stroke-dasharray=\"6,4\"");
  }
  out << "</svg>\n";
  return out.str();
}

namespace {

constexpr std::int64_t kMinLength = 60;
constexpr std::int64_t kMaxLength = 240;
constexpr int kPlacementAttempts = 2000;
constexpr std::int64_t kScanStep = 5;

// Area of the positions of one random wire's lower-left corner at which its
// gap to another random wire is below m.
double zone_area(double m, double width) {
  const double mean_len = (kMinLength + kMaxLength) / 2.0;
  const double core = 2.0 * width * mean_len + (mean_len + width) * (mean_len + width) / 2.0;
  return core + 4.0 * m * (mean_len + width) + std::numbers::pi * m * m;
}

Rect random_wire(std::mt19937_64& rng, std::int64_t x, std::int64_t y, std::int64_t width) {
  std::uniform_int_distribution<std::int64_t> length(kMinLength, kMaxLength);
  std::bernoulli_distribution horizontal(0.5);
  const std::int64_t len = length(rng);
  return horizontal(rng) ? Rect{x, y, x + len, y + width} : Rect{x, y, x + width, y + len};
}

}  // namespace

Layout generate_layout(const GenOptions& options) {
  if (!(options.density >= 0.0) || !std::isfinite(options.density)) {
    throw GenerationError("density must be a finite non-negative number");
  }
  options.params.validate();
  Layout layout;
  layout.params = options.params;
  const auto width = static_cast<std::int64_t>(std::ceil(options.params.min_width));
  std::mt19937_64 rng(options.seed);

  if (options.density == 0.0) {
    const auto pitch = kMaxLength + static_cast<std::int64_t>(std::ceil(options.params.min_s)) + 1;
    const auto cols = static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(options.shapes))));
    for (std::size_t k = 0; k < options.shapes; ++k) {
      const auto i = static_cast<std::int64_t>(k);
      layout.shapes.push_back({i, random_wire(rng, (i % cols) * pitch, (i / cols) * pitch, width)});
    }
    return layout;
  }

  const double pairs = static_cast<double>(options.shapes > 0 ? options.shapes - 1 : 0);
  const double per_pair = zone_area(options.params.min_s, options.params.min_width) -
                          zone_area(options.params.min_spacing, options.params.min_width);
  const auto side = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::llround(std::sqrt(pairs * per_pair / options.density))));
  std::uniform_int_distribution<std::int64_t> coord(0, side);
  auto fits = [&](const Rect& r) {
    return std::all_of(layout.shapes.begin(), layout.shapes.end(), [&](const Shape& s) {
      return euclidean_gap(r, s.rect) >= options.params.min_spacing;
    });
  };
  for (std::size_t k = 0; k < options.shapes; ++k) {
    const auto id = static_cast<std::int64_t>(k);
    bool placed = false;
    for (int attempt = 0; attempt < kPlacementAttempts && !placed; ++attempt) {
      const Rect r = random_wire(rng, coord(rng), coord(rng), width);
      if ((placed = fits(r))) layout.shapes.push_back({id, r});
    }
    // Random sampling misses narrow holes; scan a lattice from a random start.
    const Rect shape = random_wire(rng, 0, 0, width);
    const std::int64_t cells = side / kScanStep + 1;
    const std::int64_t start = std::uniform_int_distribution<std::int64_t>(0, cells * cells - 1)(rng);
    for (std::int64_t c = 0; c < cells * cells && !placed; ++c) {
      const std::int64_t cell = (start + c) % (cells * cells);
      const std::int64_t x = (cell % cells) * kScanStep, y = (cell / cells) * kScanStep;
      const Rect r{x, y, x + shape.width(), y + shape.height()};
      if ((placed = fits(r))) layout.shapes.push_back({id, r});
    }
    if (!placed) {
      throw GenerationError("could not place shape " + std::to_string(k) + " at density " +
                            std::to_string(options.density));
    }
  }
  return layout;
}

namespace {

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw InputError("cannot write " + path);
}

std::string x_matrix_csv(const DecomposeResult& result) {
  const std::size_t n = result.decomposition.graph.size();
  Eigen::MatrixXd X = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const auto& p : result.pieces) {
    if (p.X.size() == 0) continue;
    for (std::size_t a = 0; a < p.nodes.size(); ++a) {
      for (std::size_t b = 0; b < p.nodes.size(); ++b) X(p.nodes[a], p.nodes[b]) = p.X(a, b);
    }
  }
  std::ostringstream out;
  out << std::setprecision(9);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) out << (j ? "," : "") << X(i, j);
    out << "\n";
  }
  return out.str();
}

struct DecomposeArgs {
  std::string input;
  std::string graph;
  std::string solver = "auto";
  double alpha = 0.1;
  double min_s = 85.0;
  std::uint64_t seed = 42;
  std::string out;
  std::string stats;
  std::string svg;
  std::string dump_lp;
  std::string dump_x;
  bool reproducible = false;
  unsigned threads = 1;
};

int cmd_decompose(const DecomposeArgs& a, CLI::App& sub, std::ostream& out, std::ostream& err) {
  DecomposeConfig cfg;
  cfg.solver = parse_solver(a.solver);
  cfg.seed = a.seed;
  cfg.threads = a.threads;

  DecomposeResult result;
  if (!a.input.empty()) {
    Layout layout;
    try {
      layout = parse_layout(read_file(a.input));
    } catch (const InputError&) {
      throw;
    } catch (const std::exception& e) {
      throw InputError(a.input + ": " + e.what());
    }
    if (sub.count("--alpha")) layout.params.alpha = a.alpha;
    if (sub.count("--min-s")) layout.params.min_s = a.min_s;
    try {
      layout.params.validate();
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
    cfg.params = layout.params;
    result = decompose(layout, cfg);
  } else {
    if (!a.svg.empty()) {
      err << "--svg needs a layout given with --input\n";
      return 1;
    }
    DecompositionGraph dg;
    try {
      dg = parse_edge_list(read_file(a.graph));
    } catch (const InputError&) {
      throw;
    } catch (const std::exception& e) {
      throw InputError(a.graph + ": " + e.what());
    }
    cfg.params.alpha = a.alpha;
    if (!(a.alpha > 0)) throw InputError("alpha must be positive");
    result = decompose_graph(dg, cfg);
  }

  const std::string stats = stats_to_json(result, cfg.solver, a.reproducible);
  if (!a.out.empty()) write_file(a.out, assignment_to_json(assignment_file(result)));
  if (!a.stats.empty()) write_file(a.stats, stats);
  if (!a.svg.empty()) write_file(a.svg, render_svg(result.decomposition, result.assignment));
  if (!a.dump_lp.empty()) {
    std::ostringstream lp;
    write_lp(build_ilp(result.decomposition.graph, result.assignment.alpha), lp);
    write_file(a.dump_lp, lp.str());
  }
  if (!a.dump_x.empty()) write_file(a.dump_x, x_matrix_csv(result));
  if (a.out.empty() && a.stats.empty()) out << stats;
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Triple patterning layout decomposition"};
  app.name("tplmask");
  app.require_subcommand(1);

  DecomposeArgs d;
  CLI::App* dec = app.add_subcommand("decompose", "Assign every segment of a layout to a mask");
  auto* input = dec->add_option("--input", d.input, "Layout JSON");
  auto* graph = dec->add_option("--graph", d.graph, "Decomposition graph edge list");
  input->excludes(graph);
  dec->add_option("--solver", d.solver, "exact, sdp or auto")
      ->check(CLI::IsMember({"exact", "sdp", "auto"}));
  dec->add_option("--alpha", d.alpha, "Stitch weight");
  dec->add_option("--min-s", d.min_s, "Minimum colorable distance in nm");
  dec->add_option("--seed", d.seed, "Random seed");
  dec->add_option("--out", d.out, "Assignment JSON");
  dec->add_option("--stats", d.stats, "Stats JSON");
  dec->add_option("--svg", d.svg, "SVG rendering");
  dec->add_option("--dump-lp", d.dump_lp, "ILP model in LP format");
  dec->add_option("--dump-x", d.dump_x, "Relaxation matrix as CSV");
  dec->add_flag("--reproducible", d.reproducible, "Write cpu_s as 0");
  dec->add_option("--threads", d.threads, "Worker threads")->check(CLI::PositiveNumber);

  GenOptions g;
  std::string gen_out;
  CLI::App* gen = app.add_subcommand("gen", "Generate a random layout");
  gen->add_option("--shapes", g.shapes, "Number of shapes")->required();
  gen->add_option("--density", g.density, "Target mean number of neighbors")->required();
  gen->add_option("--seed", g.seed, "Random seed");
  gen->add_option("--out", gen_out, "Layout JSON")->required();

  std::string cmp_input, cmp_out;
  std::uint64_t cmp_seed = 42;
  CLI::App* cmp = app.add_subcommand("compare", "Run the exact and sdp pipelines on one layout");
  cmp->add_option("--input", cmp_input, "Layout JSON")->required();
  cmp->add_option("--seed", cmp_seed, "Random seed");
  cmp->add_option("--out", cmp_out, "Comparison JSON");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    if (dec->parsed()) {
      if (d.input.empty() && d.graph.empty()) {
        err << "decompose needs --input or --graph\n" << dec->help();
        return 1;
      }
      return cmd_decompose(d, *dec, out, err);
    }
    if (gen->parsed()) {
      write_file(gen_out, layout_to_json(generate_layout(g)));
      return 0;
    }
    if (cmp->parsed()) {
      Layout layout;
      try {
        layout = parse_layout(read_file(cmp_input));
      } catch (const InputError&) {
        throw;
      } catch (const std::exception& e) {
        throw InputError(cmp_input + ": " + e.what());
      }
      DecomposeConfig cfg;
      cfg.params = layout.params;
      cfg.seed = cmp_seed;
      json rows = json::array();
      out << "solver  SE#  CE#  st#  cn#  objective  cpu_s\n";
      for (const auto& r : compare_solvers(layout, cfg)) {
        out << std::left << std::setw(8) << r.solver << r.se << "  " << r.ce << "  " << r.st << "  "
            << r.cn << "  " << r.objective << "  " << r.cpu_s << "\n";
        rows.push_back({{"solver", r.solver}, {"SE", r.se}, {"CE", r.ce}, {"st", r.st}, {"cn", r.cn},
                        {"objective", r.objective}, {"cpu_s", r.cpu_s}});
      }
      if (!cmp_out.empty()) write_file(cmp_out, rows.dump(1) + "\n");
      return 0;
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const GenerationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const LayoutError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 3;
}

}  // namespace tplmask
