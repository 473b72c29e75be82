#include "uspdisc/graph.hpp"

#include <stdexcept>
#include <string>

#include "json.hpp"
#include "uspdisc/errors.hpp"

namespace uspdisc {

WeightedGraph::WeightedGraph(int node_count, bool directed)
    : node_count_(node_count), directed_(directed) {
  if (node_count < 0) throw std::invalid_argument("negative node count");
}

std::uint64_t WeightedGraph::key(NodeId u, NodeId v) const {
  if (!directed_ && u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
         static_cast<std::uint32_t>(v);
}

std::size_t WeightedGraph::add_edge(NodeId u, NodeId v, Rational w) {
  if (u < 0 || v < 0 || u >= node_count_ || v >= node_count_) {
    throw std::invalid_argument("edge endpoint out of range");
  }
  if (u == v) throw std::invalid_argument("self-loop at node " + std::to_string(u));
  if (sgn(w) < 0) throw NegativeWeight("negative weight on edge " + std::to_string(u) +
                                       "-" + std::to_string(v));
  auto [it, inserted] = index_.emplace(key(u, v), edges_.size());
  if (!inserted) {
    throw std::invalid_argument("duplicate edge " + std::to_string(u) + "-" +
                                std::to_string(v));
  }
  edges_.push_back({u, v, std::move(w)});
  return edges_.size() - 1;
}

void WeightedGraph::set_weight(std::size_t edge_index, Rational w) {
  if (sgn(w) < 0) throw NegativeWeight("negative weight");
  edges_.at(edge_index).w = std::move(w);
}

std::optional<std::size_t> WeightedGraph::find_edge(NodeId u, NodeId v) const {
  auto it = index_.find(key(u, v));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void WeightedGraph::set_coords(std::vector<Point> coords) {
  if (!coords.empty() && coords.size() != static_cast<std::size_t>(node_count_)) {
    throw std::invalid_argument("coordinate count does not match node count");
  }
  coords_ = std::move(coords);
}

Rational WeightedGraph::path_weight(std::span<const NodeId> path) const {
  Rational total = 0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    auto e = find_edge(path[i - 1], path[i]);
    if (!e) {
      throw std::invalid_argument("path uses missing edge " + std::to_string(path[i - 1]) +
                                  "-" + std::to_string(path[i]));
    }
    total += edges_[*e].w;
  }
  return total;
}

nlohmann::json rational_to_json(const Rational& r) { return to_string(r); }

Rational rational_from_json(const nlohmann::json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(mpz_class(std::to_string(j.get<long long>())));
  if (j.is_number()) return rational_from_double(j.get<double>());
  throw IoError("expected a number or numeric string");
}

nlohmann::json graph_to_json(const WeightedGraph& g) {
  nlohmann::json edges = nlohmann::json::array();
  for (const Edge& e : g.edges()) edges.push_back({e.u, e.v, rational_to_json(e.w)});
  nlohmann::json out = {{"directed", g.directed()}, {"n", g.node_count()}, {"edges", edges}};
  if (g.has_coords()) {
    nlohmann::json coords = nlohmann::json::array();
    for (const Point& p : g.coords()) coords.push_back({rational_to_json(p.x), rational_to_json(p.y)});
    out["coords"] = coords;
  }
  return out;
}

WeightedGraph graph_from_json(const nlohmann::json& j) {
  try {
    WeightedGraph g(j.at("n").get<int>(), j.value("directed", false));
    for (const auto& e : j.at("edges")) {
      g.add_edge(e.at(0).get<NodeId>(), e.at(1).get<NodeId>(), rational_from_json(e.at(2)));
    }
    if (j.contains("coords")) {
      std::vector<Point> coords;
      for (const auto& p : j.at("coords")) {
        coords.push_back({rational_from_json(p.at(0)), rational_from_json(p.at(1))});
      }
      g.set_coords(std::move(coords));
    }
    return g;
  } catch (const nlohmann::json::exception& ex) {
    throw IoError(std::string("malformed graph JSON: ") + ex.what());
  }
}

}  // namespace uspdisc
