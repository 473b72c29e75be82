#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "uspdisc/types.hpp"

namespace uspdisc {

struct Edge {
  NodeId u;
  NodeId v;
  Rational w;
};

struct Point {
  Rational x;
  Rational y;
  bool operator==(const Point& o) const { return x == o.x && y == o.y; }
};

class WeightedGraph {
 public:
  WeightedGraph() = default;
  WeightedGraph(int node_count, bool directed);

  // Throws std::invalid_argument on self-loops, duplicates or bad ids and
  // NegativeWeight on w < 0.
  std::size_t add_edge(NodeId u, NodeId v, Rational w);
  void set_weight(std::size_t edge_index, Rational w);

  int node_count() const { return node_count_; }
  bool directed() const { return directed_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(std::size_t i) const { return edges_[i]; }

  // For undirected graphs (u,v) and (v,u) name the same edge.
  std::optional<std::size_t> find_edge(NodeId u, NodeId v) const;
  bool has_edge(NodeId u, NodeId v) const { return find_edge(u, v).has_value(); }

  bool has_coords() const { return !coords_.empty(); }
  const std::vector<Point>& coords() const { return coords_; }
  void set_coords(std::vector<Point> coords);

  // Sum of edge weights along consecutive nodes; throws if an edge is missing.
  Rational path_weight(std::span<const NodeId> path) const;

 private:
  std::uint64_t key(NodeId u, NodeId v) const;

  int node_count_ = 0;
  bool directed_ = false;
  std::vector<Edge> edges_;
  std::vector<Point> coords_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
};

nlohmann::json graph_to_json(const WeightedGraph& g);
WeightedGraph graph_from_json(const nlohmann::json& j);

// Weights in JSON: integer, "num/den" or decimal string, or a JSON number.
Rational rational_from_json(const nlohmann::json& j);
nlohmann::json rational_to_json(const Rational& r);

}  // namespace uspdisc
