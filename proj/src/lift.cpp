#include <algorithm>

#include "uspdisc/constructions.hpp"
#include "uspdisc/errors.hpp"

namespace uspdisc {

LiftedSystem bipartite_2lift(const WeightedGraph& g, const PathSystem& ps) {
  if (g.directed() || ps.directed()) throw std::invalid_argument("2-lift needs an undirected system");
  if (ps.ground_size() != g.node_count()) throw DimensionMismatch("path system and graph sizes differ");
  if (check_consistency(ps)) throw InconsistentSystem("2-lift input is not consistent");
  const int n = g.node_count();

  std::vector<std::vector<std::pair<NodeId, std::size_t>>> nbr(n);
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    nbr[g.edge(e).u].emplace_back(g.edge(e).v, e);
    nbr[g.edge(e).v].emplace_back(g.edge(e).u, e);
  }
  LiftedSystem out;
  out.graph = WeightedGraph(2 * n, false);
  std::vector<int> degree(2 * n, 0);
  std::vector<int> side(n, 0);  // 0 = L, 1 = R
  int s = 0;
  for (NodeId v = 0; v < n; ++v) {
    side[v] = s;
    for (auto [u, e] : nbr[v]) {
      NodeId a = 2 * v + s, b = 2 * u + (1 - s);
      out.graph.add_edge(a, b, g.edge(e).w);
      ++degree[a];
      ++degree[b];
    }
    for (auto [u, e] : nbr[v]) {
      auto& list = nbr[u];
      list.erase(std::remove_if(list.begin(), list.end(), [&](const auto& p) { return p.first == v; }),
                 list.end());
    }
    s = 1 - s;
  }

  out.copy_of.resize(n);
  for (NodeId v = 0; v < n; ++v) {
    NodeId own = 2 * v + side[v];
    out.copy_of[v] = degree[own] > 0 ? own : 2 * v + (1 - side[v]);
  }
  out.paths = PathSystem(2 * n, PathMode::undirected);
  std::vector<NodeId> buf;
  for (std::size_t p = 0; p < ps.size(); ++p) {
    buf.clear();
    for (NodeId v : ps[p]) buf.push_back(out.copy_of[v]);
    bool walk = true;
    for (std::size_t k = 1; k < buf.size() && walk; ++k) walk = out.graph.has_edge(buf[k - 1], buf[k]);
    if (walk) ++out.threaded_paths;
    out.paths.add_path(buf);
  }
  return out;
}

HadamardGrid hadamard_grid_family(int n) {
  if (n != 2 && n != 4 && n != 8 && n != 16) throw NotPowerOfTwo("grid size must be 2, 4, 8 or 16");
  std::vector<std::vector<int>> h{{1}};
  while (static_cast<int>(h.size()) < n) {
    std::size_t m = h.size();
    std::vector<std::vector<int>> next(2 * m, std::vector<int>(2 * m));
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t c = 0; c < m; ++c) {
        next[r][c] = next[r][c + m] = next[r + m][c] = h[r][c];
        next[r + m][c + m] = -h[r][c];
      }
    }
    h = std::move(next);
  }
  HadamardGrid out;
  out.matrix.assign(n, std::vector<int>(n));
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) out.matrix[r][c] = (h[r][c] + 1) / 2;
  }

  auto node = [n](int row, int col) { return row * n + col; };  // row 0 top, 1 bottom
  out.grid = WeightedGraph(2 * n, false);
  std::vector<Point> coords(2 * n);
  for (int col = 0; col < n; ++col) {
    coords[node(0, col)] = {Rational(col), Rational(1)};
    coords[node(1, col)] = {Rational(col), Rational(0)};
  }
  out.grid.set_coords(std::move(coords));
  for (int row = 0; row < 2; ++row) {
    for (int col = 0; col + 1 < n; ++col) out.grid.add_edge(node(row, col), node(row, col + 1), 1);
  }
  for (int col = 0; col < n; ++col) out.grid.add_edge(node(0, col), node(1, col), 1);

  out.paths = PathSystem(2 * n, PathMode::undirected);
  std::vector<NodeId> buf;
  for (int i = 0; i < n; ++i) {
    for (int start = 0; start < 2; ++start) {
      buf.clear();
      int row = start;
      for (int col = 0; col < n; ++col) {
        buf.push_back(node(row, col));
        if (out.matrix[i][col]) {
          row = 1 - row;
          buf.push_back(node(row, col));
        }
      }
      out.paths.add_path(buf);
    }
  }
  for (int row = 0; row < 2; ++row) {
    buf.clear();
    for (int col = 0; col < n; ++col) buf.push_back(node(row, col));
    out.paths.add_path(buf);
  }
  return out;
}

}  // namespace uspdisc
