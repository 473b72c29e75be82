#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "json.hpp"
#include "uspdisc/graph.hpp"
#include "uspdisc/path_system.hpp"

namespace uspdisc {

enum class Target { vertices, edges };

// values[c] in {+1, -1}, aligned to the columns of the matching incidence matrix.
struct Coloring {
  Target target = Target::vertices;
  std::vector<std::int8_t> values;
  bool operator==(const Coloring&) const = default;
};

nlohmann::json coloring_to_json(const Coloring& x);
Coloring coloring_from_json(const nlohmann::json& j);

enum class CoverMode { vertex, edge };

struct PathCover {
  CoverMode mode = CoverMode::vertex;
  int threshold = 0;  // ceil(sqrt(n))
  std::vector<std::vector<NodeId>> paths;
  std::vector<std::size_t> source_index;
};

int cover_threshold(int n);

// Greedy: paths are scanned in order and each one yields blocks of its
// first s uncovered nodes while it still has at least s of them.
// check=true runs check_consistency first and throws InconsistentSystem.
PathCover build_path_cover(const PathSystem& ps, CoverMode mode, bool check = true);

// Cover edges of a cover path: its consecutive pairs that are adjacent in
// the source path, in order.
EdgeList cover_edges(const PathSystem& ps, const PathCover& cover, std::size_t k);

Coloring alternating_vertex_coloring(const PathSystem& ps, const PathCover& cover,
                                     std::uint64_t seed);
// Columns follow `universe` (default edge_universe(ps)).
Coloring alternating_edge_coloring(const PathSystem& ps, const PathCover& cover, std::uint64_t seed,
                                   const std::optional<EdgeList>& universe = std::nullopt);
Coloring random_coloring(std::size_t ground_size, Target target, std::uint64_t seed);

// BFS 2-coloring from the smallest id of each component, which gets +1.
Coloring bipartite_side_coloring(const WeightedGraph& g);

// k x l grid, node id x * l + y for 0 <= x < k, 0 <= y < l.
inline NodeId grid_node(int l, int x, int y) { return x * l + y; }
WeightedGraph unit_grid(int k, int l);
// Edge mode columns follow edge_universe of the full grid: sorted pairs.
EdgeList grid_edges(int k, int l);
Coloring grid_parity_coloring(int k, int l, Target target);

// max over paths of |sum of x|, without building the incidence matrix. Edge
// colorings are indexed by `universe` (default edge_universe(ps)).
int system_discrepancy(const PathSystem& ps, const Coloring& x,
                       const std::optional<EdgeList>& universe = std::nullopt);

struct CoverAudit {
  std::size_t wrong_size = 0;       // cover paths without exactly s nodes
  std::size_t overlaps = 0;         // nodes in two cover paths
  bool too_many = false;            // more than s cover paths
  std::size_t poorly_covered = 0;   // paths with more than s uncovered nodes
  std::size_t not_contiguous = 0;   // (path, cover path) pairs meeting non-contiguously
  std::size_t repeats = 0;          // No Repeats violations (edge mode)
  std::size_t e3_excess = 0;        // paths with |E3| > 4 * (#cover paths met), edge mode
  std::size_t partial_sum_bad = 0;  // per-cover-path sums outside {-1, 0, 1}
  std::size_t max_e3 = 0;
  bool ok() const {
    return wrong_size == 0 && overlaps == 0 && !too_many && poorly_covered == 0 &&
           not_contiguous == 0 && repeats == 0 && e3_excess == 0 && partial_sum_bad == 0;
  }
};

// Checks every cover invariant, and the per-cover-path partial sums of x
// when a coloring is supplied (vertex coloring for vertex covers, edge
// coloring over edge_universe(ps) for edge covers).
CoverAudit audit_path_cover(const PathSystem& ps, const PathCover& cover,
                            const Coloring* x = nullptr);

}  // namespace uspdisc
