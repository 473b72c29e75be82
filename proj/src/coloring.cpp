#include "uspdisc/coloring.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>

#include "uspdisc/errors.hpp"
#include "uspdisc/random.hpp"

namespace uspdisc {

nlohmann::json coloring_to_json(const Coloring& x) {
  std::vector<int> values(x.values.begin(), x.values.end());
  return {{"target", x.target == Target::vertices ? "vertices" : "edges"}, {"values", values}};
}

Coloring coloring_from_json(const nlohmann::json& j) {
  try {
    Coloring x;
    std::string target = j.at("target").get<std::string>();
    if (target != "vertices" && target != "edges") throw IoError("unknown coloring target " + target);
    x.target = target == "vertices" ? Target::vertices : Target::edges;
    for (int v : j.at("values").get<std::vector<int>>()) {
      if (v != 1 && v != -1) throw IoError("coloring values must be +1 or -1");
      x.values.push_back(static_cast<std::int8_t>(v));
    }
    return x;
  } catch (const nlohmann::json::exception& ex) {
    throw IoError(std::string("malformed coloring JSON: ") + ex.what());
  }
}

int cover_threshold(int n) {
  int s = static_cast<int>(std::sqrt(static_cast<double>(n)));
  while (s * s < n) ++s;
  while (s > 0 && (s - 1) * (s - 1) >= n) --s;
  return s;
}

PathCover build_path_cover(const PathSystem& ps, CoverMode mode, bool check) {
  if (ps.directed()) throw std::invalid_argument("path covers are defined for undirected systems");
  if (check) {
    if (auto w = check_consistency(ps)) {
      throw InconsistentSystem("paths " + std::to_string(w->i) + " and " + std::to_string(w->j) +
                               " split between " + std::to_string(w->u) + " and " +
                               std::to_string(w->v));
    }
  }
  PathCover cover;
  cover.mode = mode;
  cover.threshold = cover_threshold(ps.ground_size());
  const std::size_t s = static_cast<std::size_t>(cover.threshold);
  if (s == 0) return cover;
  std::vector<char> covered(ps.ground_size(), 0);
  std::vector<NodeId> free_nodes;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    auto p = ps[i];
    if (p.size() < s) continue;
    for (;;) {
      free_nodes.clear();
      for (NodeId v : p) {
        if (!covered[v]) free_nodes.push_back(v);
      }
      if (free_nodes.size() < s) break;
      free_nodes.resize(s);
      for (NodeId v : free_nodes) covered[v] = 1;
      cover.paths.push_back(free_nodes);
      cover.source_index.push_back(i);
    }
  }
  return cover;
}

EdgeList cover_edges(const PathSystem& ps, const PathCover& cover, std::size_t k) {
  auto src = ps[cover.source_index[k]];
  std::map<NodeId, std::size_t> pos;
  for (std::size_t t = 0; t < src.size(); ++t) pos[src[t]] = t;
  const auto& cp = cover.paths[k];
  EdgeList out;
  for (std::size_t t = 1; t < cp.size(); ++t) {
    std::size_t a = pos.at(cp[t - 1]);
    std::size_t b = pos.at(cp[t]);
    if (b == a + 1 || a == b + 1) out.push_back(edge_key(cp[t - 1], cp[t], ps.mode()));
  }
  return out;
}

namespace {

// Position i counted from 1: odd positions get -1 in the first variant.
std::int8_t alternating_sign(std::size_t index0, bool first_variant) {
  bool odd = (index0 + 1) % 2 == 1;
  return static_cast<std::int8_t>((odd == first_variant) ? -1 : 1);
}

std::size_t column_of(const EdgeList& sorted, NodePair e) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), e);
  if (it == sorted.end() || *it != e) return static_cast<std::size_t>(-1);
  return static_cast<std::size_t>(it - sorted.begin());
}

}  // namespace

Coloring alternating_vertex_coloring(const PathSystem& ps, const PathCover& cover,
                                     std::uint64_t seed) {
  if (ps.directed()) throw std::invalid_argument("alternating colorings need an undirected system");
  if (cover.mode != CoverMode::vertex) throw std::invalid_argument("vertex coloring needs a vertex cover");
  Rng rng(seed);
  Coloring x;
  x.target = Target::vertices;
  x.values.assign(ps.ground_size(), 0);
  for (const auto& cp : cover.paths) {
    bool first = rng.coin();
    for (std::size_t t = 0; t < cp.size(); ++t) x.values[cp[t]] = alternating_sign(t, first);
  }
  for (auto& v : x.values) {
    if (v == 0) v = static_cast<std::int8_t>(rng.sign());
  }
  return x;
}

Coloring alternating_edge_coloring(const PathSystem& ps, const PathCover& cover, std::uint64_t seed,
                                   const std::optional<EdgeList>& universe) {
  if (ps.directed()) throw std::invalid_argument("alternating colorings need an undirected system");
  if (cover.mode != CoverMode::edge) throw std::invalid_argument("edge coloring needs an edge cover");
  EdgeList cols = universe ? *universe : edge_universe(ps);
  for (auto& e : cols) e = edge_key(e.first, e.second, ps.mode());
  EdgeList sorted = cols;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> sorted_to_col(cols.size());
  {
    std::vector<std::size_t> order(cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) order[c] = c;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cols[a] < cols[b]; });
    for (std::size_t k = 0; k < order.size(); ++k) sorted_to_col[k] = order[k];
  }
  Rng rng(seed);
  Coloring x;
  x.target = Target::edges;
  x.values.assign(cols.size(), 0);
  for (std::size_t k = 0; k < cover.paths.size(); ++k) {
    bool first = rng.coin();
    EdgeList edges = cover_edges(ps, cover, k);
    for (std::size_t t = 0; t < edges.size(); ++t) {
      std::size_t c = column_of(sorted, edges[t]);
      if (c != static_cast<std::size_t>(-1)) x.values[sorted_to_col[c]] = alternating_sign(t, first);
    }
  }
  for (auto& v : x.values) {
    if (v == 0) v = static_cast<std::int8_t>(rng.sign());
  }
  return x;
}

Coloring random_coloring(std::size_t ground_size, Target target, std::uint64_t seed) {
  Rng rng(seed);
  Coloring x;
  x.target = target;
  x.values.resize(ground_size);
  for (auto& v : x.values) v = static_cast<std::int8_t>(rng.sign());
  return x;
}

Coloring bipartite_side_coloring(const WeightedGraph& g) {
  const int n = g.node_count();
  std::vector<std::vector<NodeId>> adj(n);
  for (const Edge& e : g.edges()) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  Coloring x;
  x.target = Target::vertices;
  x.values.assign(n, 0);
  std::deque<NodeId> queue;
  for (NodeId r = 0; r < n; ++r) {
    if (x.values[r]) continue;
    x.values[r] = 1;
    queue.push_back(r);
    while (!queue.empty()) {
      NodeId u = queue.front();
      queue.pop_front();
      for (NodeId v : adj[u]) {
        if (!x.values[v]) {
          x.values[v] = static_cast<std::int8_t>(-x.values[u]);
          queue.push_back(v);
        } else if (x.values[v] == x.values[u]) {
          throw NotBipartite("odd cycle through edge " + std::to_string(u) + "-" + std::to_string(v));
        }
      }
    }
  }
  return x;
}

WeightedGraph unit_grid(int k, int l) {
  if (k < 1 || l < 1) throw std::invalid_argument("grid dimensions must be positive");
  WeightedGraph g(k * l, false);
  for (int x = 0; x < k; ++x) {
    for (int y = 0; y < l; ++y) {
      if (x + 1 < k) g.add_edge(grid_node(l, x, y), grid_node(l, x + 1, y), 1);
      if (y + 1 < l) g.add_edge(grid_node(l, x, y), grid_node(l, x, y + 1), 1);
    }
  }
  return g;
}

EdgeList grid_edges(int k, int l) {
  EdgeList out;
  WeightedGraph g = unit_grid(k, l);
  for (const Edge& e : g.edges()) out.emplace_back(std::min(e.u, e.v), std::max(e.u, e.v));
  std::sort(out.begin(), out.end());
  return out;
}

Coloring grid_parity_coloring(int k, int l, Target target) {
  if (k < 1 || l < 1) throw std::invalid_argument("grid dimensions must be positive");
  Coloring x;
  x.target = target;
  if (target == Target::vertices) {
    x.values.resize(static_cast<std::size_t>(k) * l);
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < l; ++b) x.values[grid_node(l, a, b)] = (a + b) % 2 == 0 ? 1 : -1;
    }
    return x;
  }
  for (auto [u, v] : grid_edges(k, l)) {
    int ux = u / l, uy = u % l, vx = v / l;
    // Horizontal edges by the x of the left end, vertical by the y of the lower end.
    int lead = ux != vx ? std::min(ux, vx) : std::min(uy, v % l);
    x.values.push_back(static_cast<std::int8_t>(lead % 2 == 0 ? 1 : -1));
  }
  return x;
}

int system_discrepancy(const PathSystem& ps, const Coloring& x, const std::optional<EdgeList>& universe) {
  int worst = 0;
  if (x.target == Target::vertices) {
    if (x.values.size() != static_cast<std::size_t>(ps.ground_size())) {
      throw DimensionMismatch("vertex coloring size differs from ground size");
    }
    for (std::size_t i = 0; i < ps.size(); ++i) {
      int s = 0;
      for (NodeId v : ps[i]) s += x.values[v];
      worst = std::max(worst, std::abs(s));
    }
    return worst;
  }
  EdgeList cols = universe ? *universe : edge_universe(ps);
  if (x.values.size() != cols.size()) throw DimensionMismatch("edge coloring size differs from universe");
  std::vector<std::pair<NodePair, std::int8_t>> table;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    table.push_back({edge_key(cols[c].first, cols[c].second, ps.mode()), x.values[c]});
  }
  std::sort(table.begin(), table.end());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    auto p = ps[i];
    int s = 0;
    for (std::size_t k = 1; k < p.size(); ++k) {
      NodePair e = edge_key(p[k - 1], p[k], ps.mode());
      auto it = std::lower_bound(table.begin(), table.end(), std::make_pair(e, std::int8_t{-128}));
      if (it != table.end() && it->first == e) s += it->second;
    }
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

CoverAudit audit_path_cover(const PathSystem& ps, const PathCover& cover, const Coloring* x) {
  CoverAudit audit;
  const int n = ps.ground_size();
  const std::size_t s = static_cast<std::size_t>(cover.threshold);
  std::vector<int> label(n, -1);
  std::vector<int> pos(n, -1);
  if (cover.paths.size() > s) audit.too_many = true;
  for (std::size_t k = 0; k < cover.paths.size(); ++k) {
    if (cover.paths[k].size() != s) ++audit.wrong_size;
    for (std::size_t t = 0; t < cover.paths[k].size(); ++t) {
      NodeId v = cover.paths[k][t];
      if (label[v] >= 0) {
        ++audit.overlaps;
        continue;
      }
      label[v] = static_cast<int>(k);
      pos[v] = static_cast<int>(t);
    }
  }

  // Cover edges with their alternation index inside the cover path.
  std::vector<std::pair<NodePair, int>> cover_edge_owner;
  for (std::size_t k = 0; k < cover.paths.size(); ++k) {
    for (NodePair e : cover_edges(ps, cover, k)) cover_edge_owner.push_back({e, static_cast<int>(k)});
  }
  std::sort(cover_edge_owner.begin(), cover_edge_owner.end());
  auto owner_of = [&](NodePair e) {
    auto it = std::lower_bound(cover_edge_owner.begin(), cover_edge_owner.end(), std::make_pair(e, -1));
    return (it != cover_edge_owner.end() && it->first == e) ? it->second : -1;
  };

  EdgeList universe;
  if (x && x->target == Target::edges) universe = edge_universe(ps);
  auto edge_value = [&](NodePair e) {
    auto it = std::lower_bound(universe.begin(), universe.end(), e);
    return static_cast<int>(x->values[static_cast<std::size_t>(it - universe.begin())]);
  };

  for (std::size_t i = 0; i < ps.size(); ++i) {
    auto p = ps[i];
    std::size_t uncovered = 0;
    // per cover path: min pos, max pos, count, vertex sum
    std::map<int, std::array<int, 4>> meet;
    std::vector<int> seq;
    for (NodeId v : p) {
      int k = label[v];
      if (k < 0) {
        ++uncovered;
        continue;
      }
      auto [it, fresh] = meet.try_emplace(k, std::array<int, 4>{pos[v], pos[v], 0, 0});
      auto& m = it->second;
      m[0] = std::min(m[0], pos[v]);
      m[1] = std::max(m[1], pos[v]);
      ++m[2];
      if (x && x->target == Target::vertices) m[3] += x->values[v];
      if (seq.empty() || seq.back() != k) seq.push_back(k);
    }
    if (uncovered > s) ++audit.poorly_covered;
    for (auto& [k, m] : meet) {
      if (m[1] - m[0] + 1 != m[2]) ++audit.not_contiguous;
      if (x && x->target == Target::vertices && std::abs(m[3]) > 1) ++audit.partial_sum_bad;
    }
    if (cover.mode == CoverMode::edge) {
      std::vector<int> keys;
      for (auto& [k, m] : meet) keys.push_back(k);
      for (std::size_t a = 0; a < keys.size(); ++a) {
        for (std::size_t b = a + 1; b < keys.size(); ++b) {
          int runs = 0, last = -1;
          for (int k : seq) {
            if ((k == keys[a] || k == keys[b]) && k != last) {
              ++runs;
              last = k;
            }
          }
          if (runs >= 4) ++audit.repeats;
        }
      }
      std::size_t e3 = 0;
      std::map<int, int> edge_sums;
      for (std::size_t t = 1; t < p.size(); ++t) {
        NodePair e = edge_key(p[t - 1], p[t], ps.mode());
        int owner = owner_of(e);
        if (owner >= 0) {
          if (x && x->target == Target::edges) edge_sums[owner] += edge_value(e);
        } else if (label[p[t - 1]] >= 0 || label[p[t]] >= 0) {
          ++e3;
        }
      }
      audit.max_e3 = std::max(audit.max_e3, e3);
      if (e3 > 4 * meet.size()) ++audit.e3_excess;
      for (auto& [k, sum] : edge_sums) {
        if (std::abs(sum) > 1) ++audit.partial_sum_bad;
      }
    }
  }
  return audit;
}

}  // namespace uspdisc
