#include "uspdisc/path_system.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "uspdisc/errors.hpp"

namespace uspdisc {

PathSystem::PathSystem(int ground_size, PathMode mode)
    : ground_size_(ground_size), mode_(mode) {
  if (ground_size < 0) throw std::invalid_argument("negative ground size");
}

void PathSystem::reserve(std::size_t paths, std::size_t total_nodes) {
  offsets_.reserve(paths + 1);
  nodes_.reserve(total_nodes);
}

void PathSystem::add_path(std::span<const NodeId> path) {
  if (path.empty()) throw std::invalid_argument("empty path");
  if (stamp_.size() != static_cast<std::size_t>(ground_size_)) stamp_.assign(ground_size_, 0);
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 1;
  }
  for (NodeId v : path) {
    if (v < 0 || v >= ground_size_) {
      throw std::invalid_argument("path node " + std::to_string(v) + " out of range");
    }
    if (stamp_[v] == epoch_) {
      throw std::invalid_argument("path repeats node " + std::to_string(v));
    }
    stamp_[v] = epoch_;
  }
  nodes_.insert(nodes_.end(), path.begin(), path.end());
  offsets_.push_back(nodes_.size());
}

nlohmann::json paths_to_json(const PathSystem& ps) {
  nlohmann::json paths = nlohmann::json::array();
  for (std::size_t i = 0; i < ps.size(); ++i) {
    auto p = ps[i];
    paths.push_back(std::vector<NodeId>(p.begin(), p.end()));
  }
  return {{"mode", ps.directed() ? "directed" : "undirected"},
          {"n", ps.ground_size()},
          {"paths", paths}};
}

PathSystem paths_from_json(const nlohmann::json& j) {
  try {
    std::string mode = j.value("mode", std::string("undirected"));
    if (mode != "undirected" && mode != "directed") throw IoError("unknown path mode " + mode);
    PathSystem ps(j.at("n").get<int>(), mode == "directed" ? PathMode::directed : PathMode::undirected);
    for (const auto& p : j.at("paths")) {
      auto nodes = p.get<std::vector<NodeId>>();
      ps.add_path(nodes);
    }
    return ps;
  } catch (const nlohmann::json::exception& ex) {
    throw IoError(std::string("malformed path system JSON: ") + ex.what());
  }
}

namespace {

// Subpath of p between nodes u and v, read from u to v.
std::vector<NodeId> subpath(std::span<const NodeId> p, NodeId u, NodeId v) {
  auto a = std::find(p.begin(), p.end(), u) - p.begin();
  auto b = std::find(p.begin(), p.end(), v) - p.begin();
  std::vector<NodeId> out;
  if (a <= b) {
    out.assign(p.begin() + a, p.begin() + b + 1);
  } else {
    for (auto k = a; k >= b; --k) out.push_back(p[k]);
  }
  return out;
}

std::vector<int> positions(std::span<const NodeId> p, int ground) {
  std::vector<int> pos(ground, -1);
  for (std::size_t k = 0; k < p.size(); ++k) pos[p[k]] = static_cast<int>(k);
  return pos;
}

// First (u, v) for the pair (i, j), or nothing if they agree everywhere.
std::optional<ConsistencyWitness> pair_witness(const PathSystem& ps, std::size_t i, std::size_t j) {
  auto pi = ps[i];
  auto pj = ps[j];
  auto pos_i = positions(pi, ps.ground_size());
  auto pos_j = positions(pj, ps.ground_size());
  std::vector<NodeId> common;
  for (NodeId x : pi) {
    if (pos_j[x] >= 0) common.push_back(x);
  }
  std::sort(common.begin(), common.end());
  for (NodeId u : common) {
    for (NodeId v : common) {
      if (u == v) continue;
      if (ps.directed()) {
        if (!(pos_i[u] < pos_i[v] && pos_j[u] < pos_j[v])) continue;
      } else if (u > v) {
        continue;
      }
      auto a = subpath(pi, u, v);
      auto b = subpath(pj, u, v);
      if (a != b) return ConsistencyWitness{u, v, i, j, std::move(a), std::move(b)};
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<ConsistencyWitness> check_consistency(const PathSystem& ps) {
  // Two paths agree on all shared subpaths iff for every shared pair (x, y)
  // they take the same first step from x toward y. Keys are grouped by x so
  // the scratch state is O(n).
  const int n = ps.ground_size();
  std::vector<std::size_t> start(n + 1, 0);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (NodeId x : ps[i]) ++start[x + 1];
  }
  std::partial_sum(start.begin(), start.end(), start.begin());
  std::vector<std::pair<std::uint32_t, std::uint32_t>> occ(start[n]);  // (path, pos)
  {
    std::vector<std::size_t> fill(start.begin(), start.end() - 1);
    for (std::size_t i = 0; i < ps.size(); ++i) {
      auto p = ps[i];
      for (std::size_t k = 0; k < p.size(); ++k) {
        occ[fill[p[k]]++] = {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(k)};
      }
    }
  }
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::uint32_t> stamp(n, 0);
  std::vector<NodeId> succ(n);
  std::vector<std::size_t> owner(n);
  std::vector<char> reported(n);
  std::pair<std::size_t, std::size_t> best{kNone, kNone};
  for (NodeId x = 0; x < n; ++x) {
    const std::uint32_t tag = static_cast<std::uint32_t>(x) + 1;
    for (std::size_t o = start[x]; o < start[x + 1]; ++o) {
      auto [i, a] = occ[o];
      auto p = ps[i];
      for (std::size_t b = 0; b < p.size(); ++b) {
        if (b == a) continue;
        NodeId y = p[b];
        NodeId step;
        if (ps.directed()) {
          if (b < a) continue;
          step = p[a + 1];
        } else {
          if (y < x) continue;
          step = b > a ? p[a + 1] : p[a - 1];
        }
        if (stamp[y] != tag) {
          stamp[y] = tag;
          succ[y] = step;
          owner[y] = i;
          reported[y] = 0;
        } else if (!reported[y] && succ[y] != step) {
          reported[y] = 1;
          best = std::min(best, std::pair<std::size_t, std::size_t>{owner[y], i});
        }
      }
    }
  }
  if (best.first == kNone) return std::nullopt;
  return pair_witness(ps, best.first, best.second);
}

std::optional<ConsistencyWitness> check_consistency_naive(const PathSystem& ps) {
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (std::size_t j = i + 1; j < ps.size(); ++j) {
      if (auto w = pair_witness(ps, i, j)) return w;
    }
  }
  return std::nullopt;
}

IncidenceMatrix::IncidenceMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), words_((cols + 63) / 64), bits_(rows * words_, 0) {}

IncidenceMatrix IncidenceMatrix::from_dense(const std::vector<std::vector<int>>& rows) {
  std::size_t cols = rows.empty() ? 0 : rows[0].size();
  IncidenceMatrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw DimensionMismatch("ragged dense matrix");
    for (std::size_t c = 0; c < cols; ++c) {
      if (rows[r][c]) m.set(r, c);
    }
  }
  return m;
}

std::vector<std::size_t> IncidenceMatrix::row_support(std::size_t r) const {
  std::vector<std::size_t> out;
  auto w = row_words(r);
  for (std::size_t k = 0; k < w.size(); ++k) {
    for (std::uint64_t bits = w[k]; bits; bits &= bits - 1) {
      out.push_back(k * 64 + static_cast<std::size_t>(__builtin_ctzll(bits)));
    }
  }
  return out;
}

std::size_t IncidenceMatrix::row_count(std::size_t r) const {
  std::size_t total = 0;
  for (std::uint64_t w : row_words(r)) total += static_cast<std::size_t>(__builtin_popcountll(w));
  return total;
}

void IncidenceMatrix::set_labels(std::vector<ColumnLabel> labels) {
  if (labels.size() != cols_) throw DimensionMismatch("label count differs from column count");
  labels_ = std::move(labels);
}

IncidenceMatrix IncidenceMatrix::select_columns(std::span<const std::size_t> cols) const {
  IncidenceMatrix out(rows_, cols.size());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (get(r, cols[k])) out.set(r, k);
    }
  }
  if (!labels_.empty()) {
    std::vector<ColumnLabel> labels;
    for (std::size_t c : cols) labels.push_back(labels_[c]);
    out.labels_ = std::move(labels);
  }
  return out;
}

IncidenceMatrix IncidenceMatrix::permute(std::span<const std::size_t> row_order,
                                         std::span<const std::size_t> col_order) const {
  if (row_order.size() != rows_ || col_order.size() != cols_) {
    throw DimensionMismatch("permutation size mismatch");
  }
  IncidenceMatrix out(rows_, cols_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) {
      if (get(row_order[r], col_order[c])) out.set(r, c);
    }
  }
  return out;
}

std::string IncidenceMatrix::to_csv() const {
  std::ostringstream os;
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) {
      if (c) os << ',';
      os << (get(r, c) ? '1' : '0');
    }
    os << '\n';
  }
  return os.str();
}

EdgeList edge_universe(const PathSystem& ps) {
  EdgeList out;
  out.reserve(ps.total_length());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    auto p = ps[i];
    for (std::size_t k = 1; k < p.size(); ++k) out.push_back(edge_key(p[k - 1], p[k], ps.mode()));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

IncidenceMatrix vertex_incidence_matrix(const PathSystem& ps) {
  IncidenceMatrix m(ps.size(), ps.ground_size());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (NodeId v : ps[i]) m.set(i, v);
  }
  std::vector<ColumnLabel> labels(ps.ground_size());
  for (int v = 0; v < ps.ground_size(); ++v) labels[v] = {v, -1};
  m.set_labels(std::move(labels));
  return m;
}

IncidenceMatrix edge_incidence_matrix(const PathSystem& ps, const std::optional<EdgeList>& universe) {
  EdgeList cols = universe ? *universe : edge_universe(ps);
  std::unordered_map<std::uint64_t, std::size_t> index;
  auto pack = [](NodePair e) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(e.first)) << 32) |
           static_cast<std::uint32_t>(e.second);
  };
  for (std::size_t c = 0; c < cols.size(); ++c) {
    index.emplace(pack(edge_key(cols[c].first, cols[c].second, ps.mode())), c);
  }
  IncidenceMatrix m(ps.size(), cols.size());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    auto p = ps[i];
    for (std::size_t k = 1; k < p.size(); ++k) {
      auto it = index.find(pack(edge_key(p[k - 1], p[k], ps.mode())));
      if (it != index.end()) m.set(i, it->second);
    }
  }
  std::vector<ColumnLabel> labels;
  labels.reserve(cols.size());
  for (auto [u, v] : cols) labels.push_back({u, v});
  m.set_labels(std::move(labels));
  return m;
}

InducedSystem induce_on_subset(const WeightedGraph& g, const PathSystem& ps,
                               std::span<const NodeId> keep) {
  const int n = g.node_count();
  std::vector<NodeId> renumber(n, -1);
  for (NodeId v : keep) {
    if (v < 0 || v >= n) throw std::invalid_argument("keep node out of range");
    renumber[v] = 0;
  }
  InducedSystem out;
  for (NodeId v = 0; v < n; ++v) {
    if (renumber[v] == 0) {
      renumber[v] = static_cast<NodeId>(out.original_id.size());
      out.original_id.push_back(v);
    }
  }
  const int m = static_cast<int>(out.original_id.size());
  out.graph = WeightedGraph(m, g.directed());
  for (const Edge& e : g.edges()) {
    if (renumber[e.u] >= 0 && renumber[e.v] >= 0) out.graph.add_edge(renumber[e.u], renumber[e.v], e.w);
  }
  if (g.has_coords()) {
    std::vector<Point> coords;
    for (NodeId v : out.original_id) coords.push_back(g.coords()[v]);
    out.graph.set_coords(std::move(coords));
  }
  out.paths = PathSystem(m, ps.mode());
  std::vector<NodeId> reduced;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    auto p = ps[i];
    reduced.clear();
    Rational run = 0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (k > 0) {
        auto e = g.find_edge(p[k - 1], p[k]);
        if (!e) throw std::invalid_argument("path " + std::to_string(i) + " leaves the graph");
        run += g.edge(*e).w;
      }
      NodeId r = renumber[p[k]];
      if (r < 0) continue;
      if (!reduced.empty()) {
        NodeId a = reduced.back();
        if (auto e = out.graph.find_edge(a, r)) {
          if (run < out.graph.edge(*e).w) out.graph.set_weight(*e, run);
        } else {
          out.graph.add_edge(a, r, run);
        }
      }
      reduced.push_back(r);
      run = 0;
    }
    if (reduced.size() >= 2) out.paths.add_path(reduced);
  }
  return out;
}

SplitSystem vertex_split_transform(const WeightedGraph& g, const PathSystem& ps,
                                   bool endpoint_edges) {
  if (ps.directed()) throw std::invalid_argument("vertex split expects an undirected system");
  const int n = g.node_count();
  SplitSystem out;
  out.graph = WeightedGraph(2 * n, true);
  for (NodeId v = 0; v < n; ++v) out.graph.add_edge(split_in(v), split_out(v), Rational(0));
  for (const Edge& e : g.edges()) {
    out.graph.add_edge(split_out(e.u), split_in(e.v), e.w);
    if (!g.directed()) out.graph.add_edge(split_out(e.v), split_in(e.u), e.w);
  }
  out.paths = PathSystem(2 * n, PathMode::directed);
  std::vector<NodeId> lifted;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    auto p = ps[i];
    lifted.clear();
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (endpoint_edges || k > 0) lifted.push_back(split_in(p[k]));
      if (endpoint_edges || k + 1 < p.size()) lifted.push_back(split_out(p[k]));
    }
    out.paths.add_path(lifted);
  }
  return out;
}

std::size_t primal_shatter_count(const PathSystem& ps, std::span<const NodeId> subset) {
  std::vector<int> index(ps.ground_size(), -1);
  int k = 0;
  for (NodeId v : subset) {
    if (v < 0 || v >= ps.ground_size()) throw std::invalid_argument("subset node out of range");
    if (index[v] < 0) index[v] = k++;
  }
  std::set<std::vector<int>> traces;
  std::vector<int> trace;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    trace.clear();
    for (NodeId v : ps[i]) {
      if (index[v] >= 0) trace.push_back(index[v]);
    }
    std::sort(trace.begin(), trace.end());
    traces.insert(trace);
  }
  return traces.size();
}

}  // namespace uspdisc
