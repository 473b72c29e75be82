#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "uspdisc/graph.hpp"
#include "uspdisc/types.hpp"

namespace uspdisc {

enum class PathMode { undirected, directed };

// Paths are stored back to back; path i is nodes[offsets[i], offsets[i+1]).
class PathSystem {
 public:
  PathSystem() = default;
  PathSystem(int ground_size, PathMode mode);

  // Validates simplicity and id range. Empty paths are rejected.
  void add_path(std::span<const NodeId> path);
  void add_path(std::initializer_list<NodeId> path) {
    add_path(std::span<const NodeId>(path.begin(), path.size()));
  }
  void reserve(std::size_t paths, std::size_t total_nodes);

  int ground_size() const { return ground_size_; }
  PathMode mode() const { return mode_; }
  bool directed() const { return mode_ == PathMode::directed; }
  std::size_t size() const { return offsets_.size() - 1; }
  bool empty() const { return size() == 0; }
  std::size_t total_length() const { return nodes_.size(); }
  std::span<const NodeId> operator[](std::size_t i) const {
    return {nodes_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }

 private:
  int ground_size_ = 0;
  PathMode mode_ = PathMode::undirected;
  std::vector<NodeId> nodes_;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::uint32_t> stamp_;  // scratch for the simplicity check
  std::uint32_t epoch_ = 0;
};

nlohmann::json paths_to_json(const PathSystem& ps);
PathSystem paths_from_json(const nlohmann::json& j);

struct ConsistencyWitness {
  NodeId u;
  NodeId v;
  std::size_t i;
  std::size_t j;
  std::vector<NodeId> subpath_i;  // pi_i[u, v]
  std::vector<NodeId> subpath_j;  // pi_j[u, v]
};

// Empty result means the system is consistent. Otherwise the witness is the
// first in (i, j, u, v) order: i < j, and u, v ordered along pi_i.
std::optional<ConsistencyWitness> check_consistency(const PathSystem& ps);

// Quadratic reference checker, used to cross-check the sorted one.
std::optional<ConsistencyWitness> check_consistency_naive(const PathSystem& ps);

// Columns are vertices (v == -1 in the label) or edges.
struct ColumnLabel {
  NodeId u;
  NodeId v;
  bool operator==(const ColumnLabel&) const = default;
};

class IncidenceMatrix {
 public:
  IncidenceMatrix() = default;
  IncidenceMatrix(std::size_t rows, std::size_t cols);
  static IncidenceMatrix from_dense(const std::vector<std::vector<int>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool get(std::size_t r, std::size_t c) const {
    return (bits_[r * words_ + c / 64] >> (c % 64)) & 1u;
  }
  void set(std::size_t r, std::size_t c) { bits_[r * words_ + c / 64] |= std::uint64_t{1} << (c % 64); }
  std::span<const std::uint64_t> row_words(std::size_t r) const {
    return {bits_.data() + r * words_, words_};
  }
  std::size_t words_per_row() const { return words_; }
  std::vector<std::size_t> row_support(std::size_t r) const;
  std::size_t row_count(std::size_t r) const;

  const std::vector<ColumnLabel>& labels() const { return labels_; }
  void set_labels(std::vector<ColumnLabel> labels);

  IncidenceMatrix select_columns(std::span<const std::size_t> cols) const;
  IncidenceMatrix permute(std::span<const std::size_t> row_order,
                          std::span<const std::size_t> col_order) const;
  std::string to_csv() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> bits_;
  std::vector<ColumnLabel> labels_;
};

// Key of the edge between consecutive path nodes a, b under the given mode.
inline NodePair edge_key(NodeId a, NodeId b, PathMode mode) {
  if (mode == PathMode::undirected && a > b) return {b, a};
  return {a, b};
}

// Sorted union of consecutive pairs over all paths.
EdgeList edge_universe(const PathSystem& ps);

IncidenceMatrix vertex_incidence_matrix(const PathSystem& ps);
// Pairs missing from a supplied universe are skipped.
IncidenceMatrix edge_incidence_matrix(const PathSystem& ps,
                                      const std::optional<EdgeList>& universe = std::nullopt);

struct InducedSystem {
  WeightedGraph graph;
  PathSystem paths;
  std::vector<NodeId> original_id;  // new id -> old id
};

// keep may be in any order; node ids are renumbered by increasing old id.
InducedSystem induce_on_subset(const WeightedGraph& g, const PathSystem& ps,
                               std::span<const NodeId> keep);

struct SplitSystem {
  WeightedGraph graph;  // directed; v_in = 2v, v_out = 2v + 1
  PathSystem paths;     // directed, over 2n nodes
};

inline NodeId split_in(NodeId v) { return 2 * v; }
inline NodeId split_out(NodeId v) { return 2 * v + 1; }

// With endpoint_edges the lifted path is v1_in, v1_out, ..., vk_in, vk_out,
// so every original vertex maps to one edge column. Without it the first
// vertex keeps only v1_out and the last only vk_in.
SplitSystem vertex_split_transform(const WeightedGraph& g, const PathSystem& ps,
                                   bool endpoint_edges = true);

std::size_t primal_shatter_count(const PathSystem& ps, std::span<const NodeId> subset);

}  // namespace uspdisc
