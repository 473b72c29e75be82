#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "uspdisc/graph.hpp"
#include "uspdisc/path_system.hpp"

namespace uspdisc {

enum class Arithmetic { exact, floating };

struct OracleOptions {
  Arithmetic arithmetic = Arithmetic::exact;
  double tolerance = 1e-9;  // relative, floating mode only
};

struct ShortestPathResult {
  std::vector<NodeId> path;
  Rational length;
  bool unique = false;
};

// Single-source shortest path tree. A node is unique when every node on its
// tree path, itself included, has exactly one tight predecessor.
struct SourceTree {
  NodeId source = -1;
  std::vector<NodeId> parent;
  std::vector<char> reached;
  std::vector<char> unique;
  std::vector<NodeId> settle_order;

  std::vector<NodeId> path_to(NodeId t) const;
  // Node count of the tree path, 0 if unreached.
  int path_nodes(NodeId t) const;
};

class ShortestPathOracle {
 public:
  explicit ShortestPathOracle(const WeightedGraph& g, OracleOptions opts = {});
  ~ShortestPathOracle();
  ShortestPathOracle(ShortestPathOracle&&) noexcept;
  ShortestPathOracle& operator=(ShortestPathOracle&&) noexcept;

  SourceTree tree(NodeId s) const;
  ShortestPathResult query(NodeId s, NodeId t) const;

  // Which integer width the exact engine settled on: "int64", "int128",
  // "int256", "rational", or "double" in floating mode.
  std::string engine() const;
  const WeightedGraph& graph() const { return *graph_; }

 private:
  struct Impl;
  const WeightedGraph* graph_;
  std::unique_ptr<Impl> impl_;
};

ShortestPathResult shortest_path(const WeightedGraph& g, NodeId s, NodeId t,
                                 OracleOptions opts = {});

struct AllPairsResult {
  PathSystem paths;
  bool omitted_unreachable = false;
};

// Pairs are enumerated s ascending, then t ascending (t > s when undirected).
// Throws TieDetected on the first non-unique pair in that order.
AllPairsResult all_pairs_unique_shortest_paths(const WeightedGraph& g, OracleOptions opts = {});

// w * (1 + delta), delta uniform in (0, epsilon), drawn exactly as a rational.
WeightedGraph perturb_weights(const WeightedGraph& g, std::uint64_t seed, double epsilon);

struct RandomUspInstance {
  WeightedGraph graph;
  PathSystem paths;
  int attempts = 0;
};

// Unique shortest paths from each listed source to every other node. For
// undirected graphs a pair between two sources appears once, from the smaller
// source. Throws TieDetected on a non-unique pair; unreachable pairs are skipped.
PathSystem unique_paths_from_sources(const WeightedGraph& g, std::span<const NodeId> sources,
                                     OracleOptions opts = {});

// Erdos-Renyi graph with distinct integer weights in [1, 2^40], retried until
// connected and tie-free. sources = 0 keeps every pair; otherwise that many
// distinct sources are sampled and only their paths are kept.
RandomUspInstance random_usp_graph(int n, double density, std::uint64_t seed, std::size_t sources = 0);

// k x l unit grid (node x * l + y, coords (x, y)) with weights 2^30 + r for
// distinct r in [1, 2^20], so shortest paths are long staircases.
RandomUspInstance random_grid_usp(int k, int l, std::uint64_t seed, std::size_t sources = 0);

}  // namespace uspdisc
