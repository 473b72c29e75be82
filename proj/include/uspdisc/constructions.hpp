#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "json.hpp"
#include "uspdisc/graph.hpp"
#include "uspdisc/path_system.hpp"

namespace uspdisc {

struct LayeredOverrides {
  std::optional<int> layers;
  std::optional<int> q;
};

struct LayeredParams {
  int n = 0;
  int layers = 0;       // l
  int columns = 0;      // nodes per layer
  int max_shift = 0;    // largest x in the edge vector sets
  int q = 0;
  int d_max = 0;        // directions use x in [1, d_max]
  std::uint64_t seed = 0;
  std::size_t start_count = 0;
  std::size_t direction_count = 0;
  std::size_t path_count = 0;
  Rational hop_penalty;  // added to every edge weight
  int resamples = 0;     // psi redraws forced by argmin ties
  std::size_t clipped_steps = 0;  // growth steps whose best edge left the grid
  double multiplicity_ratio = 0;  // max_v (#paths through v) * n / (l * |Pi|)
};

nlohmann::json params_to_json(const LayeredParams& p);

struct LayeredInstance {
  WeightedGraph graph;  // coords present
  LayeredParams params;
  // psi[i] for layers i = 1..l, kept as psi_num[i] / 2^32. Index 0 unused.
  std::vector<std::uint64_t> psi_num;
  std::vector<Rational> psi;
  std::vector<Rational> directions;      // second coordinates of D, increasing
  std::vector<NodeId> start_set;
  PathSystem paths;
  std::vector<std::size_t> path_direction;  // index into directions
  std::vector<int> edge_shift;              // integer x of each edge's vector

  // Layers and columns are 1-based.
  NodeId node(int layer, int column) const {
    return (layer - 1) * params.columns + (column - 1);
  }
  int layer_of(NodeId v) const { return v / params.columns + 1; }
  int column_of(NodeId v) const { return v % params.columns + 1; }
  // psi_{i+1} + x for an edge leaving layer i.
  Rational edge_vector(std::size_t edge_index) const;
  std::vector<Rational> edge_vector_set(int gap) const;  // C_i, increasing
};

int default_layers(int n);
int default_q(int n, int layers);

// Throws ParamRangeEmpty when D would be empty and VerificationFailed when a
// generated path is not the unique shortest path between its endpoints.
LayeredInstance build_layered_instance(int n, std::uint64_t seed, const LayeredOverrides& overrides = {});

// Assembles the graph for explicit parameters. psi_num has l + 1 entries
// (index 0 unused), each in [1, 2^32).
LayeredInstance assemble_layered(int n, int layers, int columns, int max_shift,
                                 std::vector<std::uint64_t> psi_num);

// Bundle {graph, paths, params} plus psi, directions and the start set.
nlohmann::json layered_to_json(const LayeredInstance& inst);

// Checks every construction invariant and throws VerificationFailed.
void verify_layered_instance(const LayeredInstance& inst);

struct HopMultiplicity {
  std::size_t paths = 0;  // paths containing both u and v
  int hops = 0;           // layer difference
};
HopMultiplicity hop_path_multiplicity(const LayeredInstance& inst, NodeId u, NodeId v);

// Pairs of edges in the same layer gap whose open segments meet.
std::size_t count_crossings(const LayeredInstance& inst);

// All edge pairs, exact rational orientation tests.
std::size_t count_crossings_all_pairs(const WeightedGraph& g);

// Slab sweep for drawings whose edges all have distinct endpoint x
// coordinates: counts pairs whose open segments meet.
std::size_t count_crossings_sweep(const WeightedGraph& g);

struct PlanarizedInstance {
  WeightedGraph graph;  // original nodes keep their ids; crossings follow
  PathSystem paths;
  std::size_t original_nodes = 0;
  std::size_t crossing_nodes = 0;
  std::size_t subdivision_nodes = 0;  // nodes added in the vertical-line step
  std::size_t vertical_lines = 0;
  Rational piece_penalty;
};

// How a drawn piece between two consecutive vertical lines is weighted.
// squared_length is |p_u - p_v|^2. slab_scaled divides that by the piece's
// horizontal width, which makes straight traversal the unique optimum even
// when the slabs between lines have unequal widths. Both add the hop penalty
// to every piece.
enum class PieceWeight { squared_length, slab_scaled };

// The vertical-line construction, with each degree-2 subdivision node
// contracted in place along its edge. verify checks for zero crossings and
// unique shortest paths and throws VerificationFailed.
PlanarizedInstance planarize(const LayeredInstance& inst, bool verify = true,
                             PieceWeight weights = PieceWeight::squared_length);

// Literal version: materializes every subdivision node, then contracts
// degree-2 subdivision nodes one at a time in the given order (default
// increasing id). Only practical for small instances.
PlanarizedInstance planarize_reference(const LayeredInstance& inst,
                                       const std::vector<std::size_t>* contraction_order = nullptr,
                                       PieceWeight weights = PieceWeight::squared_length);

// Every path of inst is re-checked with the exact oracle, grouped by source.
// Returns the index of the first failing path.
std::optional<std::size_t> first_non_usp_path(const WeightedGraph& g, const PathSystem& ps);

struct LiftedSystem {
  WeightedGraph graph;  // v_L = 2v, v_R = 2v + 1
  PathSystem paths;
  std::vector<NodeId> copy_of;  // lifted copy chosen for each original vertex
  std::size_t threaded_paths = 0;  // lifted paths that are walks in the lift
};

LiftedSystem bipartite_2lift(const WeightedGraph& g, const PathSystem& ps);

struct HadamardGrid {
  WeightedGraph grid;          // tops 0..n-1, bottoms n..2n-1
  PathSystem paths;            // 2n + 2 node sequences
  std::vector<std::vector<int>> matrix;  // (H + J) / 2
};

HadamardGrid hadamard_grid_family(int n);

}  // namespace uspdisc
