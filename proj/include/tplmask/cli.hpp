#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tplmask/pipeline.hpp"

namespace tplmask {

/// Parsed form of the assignment JSON written by `decompose --out`.
struct AssignmentFile {
  std::map<std::int64_t, int> masks;  // segment id -> mask
  std::vector<std::array<NodeId, 2>> stitches;
  std::vector<std::array<NodeId, 2>> conflicts;
  bool operator==(const AssignmentFile&) const = default;
};

AssignmentFile assignment_file(const DecomposeResult& result);
std::string assignment_to_json(const AssignmentFile& file);
AssignmentFile parse_assignment(std::string_view json_text);

/// Stats document; cpu_s is written as 0 when `reproducible` is set so that
/// repeated runs compare byte for byte.
std::string stats_to_json(const DecomposeResult& result, SolverChoice solver, bool reproducible);

/// Edge list text: a line with the node count, then one "C u v" (conflict)
/// or "S u v" (stitch) line per edge, 0-based ids. '#' starts a comment.
DecompositionGraph parse_edge_list(std::string_view text);
std::string edge_list_text(const DecompositionGraph& dg);

/// One rect per segment filled by mask, red lines between the centers of
/// conflicting segments, dashed black lines across stitches.
std::string render_svg(const Decomposition& dec, const MaskAssignment& assignment);

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GenOptions {
  std::size_t shapes = 100;
  double density = 2.0;  // target mean layout-graph degree
  std::uint64_t seed = 1;
  ProcessParams params;
};

/// Random wires (width min_width, random length and orientation) placed by
/// rejection sampling with at least min_spacing between shapes, in a square
/// sized so the expected number of neighbors closer than min_s is about
/// `density`. density 0 gives a grid with no neighbors. Throws
/// GenerationError when the shapes cannot be placed.
Layout generate_layout(const GenOptions& options);

/// Entry point shared by the tool and the tests. Exit codes: 0 success,
/// 1 usage error, 2 input or generation error, 3 internal failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tplmask
