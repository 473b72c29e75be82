#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <set>

#include "uspdisc/constructions.hpp"
#include "uspdisc/errors.hpp"

namespace uspdisc {

namespace {

// Vertical line t = a / b inside a layer gap, 0 < a < b, reduced.
struct Line {
  long long a, b;
  bool operator<(const Line& o) const { return a * o.b < o.a * b; }
  bool operator==(const Line& o) const { return a == o.a && b == o.b; }
};

// Sign of the cross product (q - p) x (r - p), templated so the layered
// instance can use scaled integers while general drawings use rationals.
template <class T>
int orientation(const T& px, const T& py, const T& qx, const T& qy, const T& rx, const T& ry) {
  T v = (qx - px) * (ry - py) - (qy - py) * (rx - px);
  return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

template <class T>
bool between(const T& a, const T& b, const T& c) {  // b within closed [a, c] in either order
  return (a <= b && b <= c) || (c <= b && b <= a);
}

template <class T>
bool open_segments_meet(const T* p, const T* q, const T* r, const T* s) {
  int o1 = orientation(p[0], p[1], q[0], q[1], r[0], r[1]);
  int o2 = orientation(p[0], p[1], q[0], q[1], s[0], s[1]);
  int o3 = orientation(r[0], r[1], s[0], s[1], p[0], p[1]);
  int o4 = orientation(r[0], r[1], s[0], s[1], q[0], q[1]);
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;
  if (o1 != 0 || o2 != 0) return false;
  // Collinear: interiors meet when the projections overlap with positive length.
  int axis = p[0] != q[0] ? 0 : 1;
  T lo1 = std::min(p[axis], q[axis]), hi1 = std::max(p[axis], q[axis]);
  T lo2 = std::min(r[axis], s[axis]), hi2 = std::max(r[axis], s[axis]);
  return std::max(lo1, lo2) < std::min(hi1, hi2);
}

struct GapEdge {
  std::size_t index;
  int j, x;
};

std::vector<std::vector<GapEdge>> edges_by_gap(const LayeredInstance& inst) {
  std::vector<std::vector<GapEdge>> gaps(inst.params.layers);
  for (std::size_t e = 0; e < inst.graph.edge_count(); ++e) {
    const Edge& ed = inst.graph.edge(e);
    gaps[inst.layer_of(ed.u)].push_back({e, inst.column_of(ed.u), inst.edge_shift[e]});
  }
  return gaps;
}

// Edges (j, x) and (j', x') of one gap meet at t = (j' - j) / (x - x'),
// a proper crossing when 0 < t < 1. A difference pair (dj, dx) with
// 0 < dj < dx is realized by (1, dx), (1 + dj, 0) whenever 1 + dx <= columns.
std::vector<Line> gap_lines(const LayeredInstance& inst) {
  const int limit = std::min(inst.params.max_shift, inst.params.columns - 1);
  std::vector<Line> lines;
  for (int dx = 2; dx <= limit; ++dx) {
    for (int dj = 1; dj < dx; ++dj) {
      if (std::gcd(dj, dx) == 1) lines.push_back({dj, dx});
    }
  }
  std::sort(lines.begin(), lines.end());
  return lines;
}

}  // namespace

std::size_t count_crossings(const LayeredInstance& inst) {
  const int columns = inst.params.columns;
  std::size_t total = 0;
  for (const auto& gap : edges_by_gap(inst)) {
    for (const GapEdge& e : gap) {
      // Partners start further right (j' = j + dj) and shift less (x' < x - dj);
      // they exist for x' <= columns - j'.
      for (int dj = 1; dj < e.x && e.j + dj <= columns; ++dj) {
        int options = std::min(e.x - dj, columns - (e.j + dj) + 1);
        if (options > 0) total += options;
      }
    }
  }
  return total;
}

std::size_t count_crossings_all_pairs(const WeightedGraph& g) {
  if (!g.has_coords()) throw std::invalid_argument("graph has no coordinates");
  const auto& c = g.coords();
  std::vector<std::array<Rational, 2>> p(c.size());
  for (std::size_t v = 0; v < c.size(); ++v) p[v] = {c[v].x, c[v].y};
  std::vector<std::array<Rational, 4>> box;
  for (const Edge& e : g.edges()) {
    box.push_back({std::min(c[e.u].x, c[e.v].x), std::max(c[e.u].x, c[e.v].x),
                   std::min(c[e.u].y, c[e.v].y), std::max(c[e.u].y, c[e.v].y)});
  }
  std::size_t total = 0;
  const auto& E = g.edges();
  for (std::size_t a = 0; a < E.size(); ++a) {
    for (std::size_t b = a + 1; b < E.size(); ++b) {
      if (box[a][1] < box[b][0] || box[b][1] < box[a][0] || box[a][3] < box[b][2] || box[b][3] < box[a][2]) {
        continue;
      }
      if (open_segments_meet(p[E[a].u].data(), p[E[a].v].data(), p[E[b].u].data(), p[E[b].v].data())) ++total;
    }
  }
  return total;
}

std::size_t count_crossings_sweep(const WeightedGraph& g) {
  if (!g.has_coords()) throw std::invalid_argument("graph has no coordinates");
  const auto& c = g.coords();
  struct Seg {
    Rational x1, y1, x2, y2;
    Rational y_at(const Rational& x) const { return y1 + (y2 - y1) * (x - x1) / (x2 - x1); }
  };
  std::vector<Seg> segs;
  std::vector<Rational> xs;
  for (const Edge& e : g.edges()) {
    Point a = c[e.u], b = c[e.v];
    if (a.x == b.x) throw std::invalid_argument("sweep needs non-vertical edges");
    if (b.x < a.x) std::swap(a, b);
    segs.push_back({a.x, a.y, b.x, b.y});
    xs.push_back(a.x);
    xs.push_back(b.x);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  if (xs.size() < 2) return 0;

  auto slab_of = [&](const Rational& x) {
    return static_cast<std::size_t>(std::lower_bound(xs.begin(), xs.end(), x) - xs.begin());
  };
  std::vector<std::vector<std::size_t>> in_slab(xs.size() - 1), through(xs.size());
  for (std::size_t s = 0; s < segs.size(); ++s) {
    std::size_t lo = slab_of(segs[s].x1), hi = slab_of(segs[s].x2);
    for (std::size_t k = lo; k < hi; ++k) in_slab[k].push_back(s);
    for (std::size_t k = lo + 1; k < hi; ++k) through[k].push_back(s);
  }

  auto collinear = [&](std::size_t a, std::size_t b) {
    const Seg& s = segs[a];
    const Seg& t = segs[b];
    return (s.y2 - s.y1) * (t.x2 - t.x1) == (t.y2 - t.y1) * (s.x2 - s.x1) && t.y_at(s.x1) == s.y1;
  };
  std::size_t total = 0;
  std::set<std::pair<std::size_t, std::size_t>> overlapping;

  // Meetings exactly on a breakpoint that is interior to both segments.
  for (std::size_t k = 1; k + 1 < xs.size(); ++k) {
    std::vector<std::pair<Rational, std::size_t>> ys;
    for (std::size_t s : through[k]) ys.emplace_back(segs[s].y_at(xs[k]), s);
    std::sort(ys.begin(), ys.end());
    for (std::size_t a = 0; a < ys.size();) {
      std::size_t b = a;
      while (b < ys.size() && ys[b].first == ys[a].first) ++b;
      for (std::size_t p = a; p < b; ++p) {
        for (std::size_t q = p + 1; q < b; ++q) {
          auto key = std::minmax(ys[p].second, ys[q].second);
          if (collinear(key.first, key.second)) {
            overlapping.insert(key);
          } else {
            ++total;
          }
        }
      }
      a = b;
    }
  }

  // Inside each open slab: pairs whose order flips between the two sides.
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    struct Item {
      Rational yl, yr;
      std::size_t seg;
    };
    std::vector<Item> items;
    for (std::size_t s : in_slab[k]) items.push_back({segs[s].y_at(xs[k]), segs[s].y_at(xs[k + 1]), s});
    if (items.size() < 2) continue;
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
      return a.yl != b.yl ? a.yl < b.yl : a.yr < b.yr;
    });
    std::vector<Rational> rights;
    for (const Item& it : items) rights.push_back(it.yr);
    std::sort(rights.begin(), rights.end());
    rights.erase(std::unique(rights.begin(), rights.end()), rights.end());
    std::vector<std::size_t> bit(rights.size() + 1, 0);
    std::size_t inserted = 0;
    auto rank = [&](const Rational& y) {
      return static_cast<std::size_t>(std::lower_bound(rights.begin(), rights.end(), y) - rights.begin()) + 1;
    };
    for (std::size_t a = 0; a < items.size();) {
      std::size_t b = a;
      while (b < items.size() && items[b].yl == items[a].yl) ++b;
      for (std::size_t p = a; p < b; ++p) {
        // Earlier groups have strictly smaller yl; count those with larger yr.
        std::size_t at_most = 0;
        for (std::size_t r = rank(items[p].yr); r > 0; r -= r & -r) at_most += bit[r];
        total += inserted - at_most;
        // Equal ends on both sides: the segments share a collinear piece.
        for (std::size_t q = p + 1; q < b && items[q].yr == items[p].yr; ++q) {
          overlapping.insert(std::minmax(items[p].seg, items[q].seg));
        }
      }
      for (std::size_t p = a; p < b; ++p) {
        for (std::size_t r = rank(items[p].yr); r < bit.size(); r += r & -r) ++bit[r];
        ++inserted;
      }
      a = b;
    }
  }
  return total + overlapping.size();
}

PlanarizedInstance planarize(const LayeredInstance& inst, bool verify, PieceWeight weights) {
  const int n0 = inst.graph.node_count();
  const int columns = inst.params.columns;
  const int X = inst.params.max_shift;
  const Rational H = inst.params.hop_penalty;
  const auto& coords = inst.graph.coords();
  const auto gaps = edges_by_gap(inst);
  const std::vector<Line> lines = gap_lines(inst);
  const std::size_t L = lines.size();

  PlanarizedInstance out;
  out.original_nodes = n0;
  out.piece_penalty = H;

  // Positions along one gap: 0 is t = 0, k is line k, L + 1 is t = 1.
  std::vector<Rational> t_at(L + 2);
  t_at[0] = 0;
  t_at[L + 1] = 1;
  for (std::size_t k = 0; k < L; ++k) t_at[k + 1] = Rational(static_cast<long>(lines[k].a), static_cast<long>(lines[k].b));
  // Prefix sums of the per-slab factor multiplying 1 + u^2.
  std::vector<Rational> squares(L + 2, Rational(0));
  for (std::size_t k = 1; k <= L + 1; ++k) {
    Rational d = t_at[k] - t_at[k - 1];
    squares[k] = squares[k - 1] + (weights == PieceWeight::squared_length ? d * d : d);
  }

  // chain[e]: (position, node) of crossing nodes met by edge e, in t order.
  std::vector<std::vector<std::pair<std::size_t, NodeId>>> chain(inst.graph.edge_count());
  std::vector<Point> new_coords;
  NodeId next = n0;
  std::vector<int> count;
  std::vector<NodeId> assigned;
  for (int i = 1; i < inst.params.layers; ++i) {
    const auto& gap = gaps[i];
    if (gap.empty()) continue;
    for (std::size_t k = 0; k < L; ++k) {
      const long long a = lines[k].a, b = lines[k].b;
      // Points on this line are y = j + S_i + x a/b, so keys j b + x a identify them.
      const std::size_t range = static_cast<std::size_t>((columns + X + 1) * b + 1);
      count.assign(range, 0);
      assigned.assign(range, -1);
      for (const GapEdge& e : gap) ++count[e.j * b + e.x * a];
      out.subdivision_nodes += std::count_if(count.begin(), count.end(), [](int c) { return c > 0; });
      for (std::size_t key = 0; key < range; ++key) {
        if (count[key] < 2) continue;
        assigned[key] = next++;
        ++out.crossing_nodes;
      }
      for (const GapEdge& e : gap) {
        NodeId v = assigned[e.j * b + e.x * a];
        if (v < 0) continue;
        chain[e.index].emplace_back(k + 1, v);
      }
    }
    out.vertical_lines += L;
  }

  // Coordinates in id order: walk the gaps again so ids line up.
  new_coords.assign(next - n0, Point{});
  for (int i = 1; i < inst.params.layers; ++i) {
    for (const GapEdge& e : gaps[i]) {
      const Edge& ed = inst.graph.edge(e.index);
      Rational u = Rational(e.x) + inst.psi[i + 1];
      for (auto [pos, v] : chain[e.index]) {
        new_coords[v - n0] = {Rational(i) + t_at[pos], coords[ed.u].y + u * t_at[pos]};
      }
    }
  }

  out.graph = WeightedGraph(next, false);
  for (std::size_t e = 0; e < inst.graph.edge_count(); ++e) {
    const Edge& ed = inst.graph.edge(e);
    Rational u = inst.edge_vector(e);
    Rational scale = 1 + u * u;
    NodeId prev = ed.u;
    std::size_t prev_pos = 0;
    auto emit = [&](NodeId v, std::size_t pos) {
      out.graph.add_edge(prev, v, scale * (squares[pos] - squares[prev_pos]) + H * static_cast<long>(pos - prev_pos));
      prev = v;
      prev_pos = pos;
    };
    for (auto [pos, v] : chain[e]) emit(v, pos);
    emit(ed.v, L + 1);
  }
  std::vector<Point> all(coords.begin(), coords.end());
  all.insert(all.end(), new_coords.begin(), new_coords.end());
  out.graph.set_coords(std::move(all));

  out.paths = PathSystem(next, PathMode::undirected);
  std::vector<NodeId> buf;
  for (std::size_t p = 0; p < inst.paths.size(); ++p) {
    auto path = inst.paths[p];
    buf.assign(1, path[0]);
    for (std::size_t k = 1; k < path.size(); ++k) {
      auto e = inst.graph.find_edge(path[k - 1], path[k]);
      if (!e) throw VerificationFailed(p, "uses a missing edge");
      bool forward = inst.graph.edge(*e).u == path[k - 1];
      const auto& ch = chain[*e];
      if (forward) {
        for (auto it = ch.begin(); it != ch.end(); ++it) buf.push_back(it->second);
      } else {
        for (auto it = ch.rbegin(); it != ch.rend(); ++it) buf.push_back(it->second);
      }
      buf.push_back(path[k]);
    }
    out.paths.add_path(buf);
  }

  if (verify) {
    if (count_crossings_sweep(out.graph) != 0) throw VerificationFailed(0, "planarized drawing still has crossings");
    if (auto bad = first_non_usp_path(out.graph, out.paths)) {
      throw VerificationFailed(*bad, "is not the unique shortest path after planarization");
    }
  }
  return out;
}

PlanarizedInstance planarize_reference(const LayeredInstance& inst,
                                       const std::vector<std::size_t>* contraction_order,
                                       PieceWeight weights) {
  const int n0 = inst.graph.node_count();
  const Rational H = inst.params.hop_penalty;
  const auto& coords = inst.graph.coords();
  const auto gaps = edges_by_gap(inst);

  // Every crossing point of a gap, from the exact all-pairs test.
  std::vector<std::set<Rational>> cuts(inst.params.layers);
  for (int i = 1; i < inst.params.layers; ++i) {
    const auto& gap = gaps[i];
    for (std::size_t a = 0; a < gap.size(); ++a) {
      for (std::size_t b = a + 1; b < gap.size(); ++b) {
        const Edge& ea = inst.graph.edge(gap[a].index);
        const Edge& eb = inst.graph.edge(gap[b].index);
        Rational p[2] = {coords[ea.u].x, coords[ea.u].y}, q[2] = {coords[ea.v].x, coords[ea.v].y};
        Rational r[2] = {coords[eb.u].x, coords[eb.u].y}, s[2] = {coords[eb.v].x, coords[eb.v].y};
        if (!open_segments_meet(p, q, r, s)) continue;
        // Intersection x from the two line equations.
        Rational ma = (q[1] - p[1]) / (q[0] - p[0]), mb = (s[1] - r[1]) / (s[0] - r[0]);
        cuts[i].insert((r[1] - p[1] + ma * p[0] - mb * r[0]) / (ma - mb));
      }
    }
  }

  // Step 2: a node wherever a vertical line meets an edge, merged by position.
  std::vector<Point> pts(coords.begin(), coords.end());
  std::vector<std::vector<NodeId>> along(inst.graph.edge_count());
  for (int i = 1; i < inst.params.layers; ++i) {
    for (const Rational& x : cuts[i]) {
      std::map<Rational, NodeId> at;
      std::vector<std::pair<std::size_t, Rational>> hits;
      for (const GapEdge& e : gaps[i]) {
        const Edge& ed = inst.graph.edge(e.index);
        const Point& a = coords[ed.u];
        const Point& b = coords[ed.v];
        Rational y = a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x);
        hits.emplace_back(e.index, y);
        at.emplace(y, -1);
      }
      for (auto& [y, id] : at) {
        id = static_cast<NodeId>(pts.size());
        pts.push_back({x, y});
      }
      for (auto& [e, y] : hits) along[e].push_back(at[y]);
    }
  }
  const std::size_t total = pts.size();

  // Step 3: pieces weighted by squared length plus the hop penalty.
  std::vector<std::map<NodeId, Rational>> adj(total);
  auto piece = [&](NodeId a, NodeId b) {
    Rational dx = pts[a].x - pts[b].x, dy = pts[a].y - pts[b].y;
    Rational w = dx * dx + dy * dy;
    if (weights == PieceWeight::slab_scaled) w /= abs(dx);
    w += H;
    adj[a][b] = w;
    adj[b][a] = w;
  };
  for (std::size_t e = 0; e < inst.graph.edge_count(); ++e) {
    NodeId prev = inst.graph.edge(e).u;
    for (NodeId v : along[e]) {
      piece(prev, v);
      prev = v;
    }
    piece(prev, inst.graph.edge(e).v);
  }

  // Step 4: contract degree-2 subdivision nodes.
  std::vector<std::size_t> order;
  if (contraction_order) {
    order = *contraction_order;
  } else {
    for (std::size_t v = n0; v < total; ++v) order.push_back(v);
  }
  std::vector<char> alive(total, 1);
  for (std::size_t v : order) {
    if (v < static_cast<std::size_t>(n0) || v >= total || !alive[v] || adj[v].size() != 2) continue;
    auto [a, wa] = *adj[v].begin();
    auto [b, wb] = *std::next(adj[v].begin());
    Rational w = wa + wb;
    adj[a].erase(static_cast<NodeId>(v));
    adj[b].erase(static_cast<NodeId>(v));
    auto it = adj[a].find(b);
    if (it == adj[a].end() || w < it->second) {
      adj[a][b] = w;
      adj[b][a] = w;
    }
    adj[v].clear();
    alive[v] = 0;
  }

  PlanarizedInstance out;
  out.original_nodes = n0;
  out.subdivision_nodes = total - n0;
  out.piece_penalty = H;
  for (int i = 1; i < inst.params.layers; ++i) out.vertical_lines += cuts[i].size();
  std::vector<NodeId> remap(total, -1);
  std::vector<Point> kept;
  for (std::size_t v = 0; v < total; ++v) {
    if (!alive[v]) continue;
    remap[v] = static_cast<NodeId>(kept.size());
    kept.push_back(pts[v]);
  }
  out.crossing_nodes = kept.size() - n0;
  out.graph = WeightedGraph(static_cast<int>(kept.size()), false);
  for (std::size_t v = 0; v < total; ++v) {
    for (const auto& [u, w] : adj[v]) {
      if (static_cast<std::size_t>(u) > v) out.graph.add_edge(remap[v], remap[u], w);
    }
  }
  out.graph.set_coords(std::move(kept));

  out.paths = PathSystem(out.graph.node_count(), PathMode::undirected);
  std::vector<NodeId> buf;
  for (std::size_t p = 0; p < inst.paths.size(); ++p) {
    auto path = inst.paths[p];
    buf.assign(1, remap[path[0]]);
    for (std::size_t k = 1; k < path.size(); ++k) {
      auto e = inst.graph.find_edge(path[k - 1], path[k]);
      std::vector<NodeId> mid = along[*e];
      if (inst.graph.edge(*e).u != path[k - 1]) std::reverse(mid.begin(), mid.end());
      for (NodeId v : mid) {
        if (alive[v]) buf.push_back(remap[v]);
      }
      buf.push_back(remap[path[k]]);
    }
    out.paths.add_path(buf);
  }
  return out;
}

}  // namespace uspdisc
