#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

#include "doctest.h"
#include "uspdisc/coloring.hpp"
#include "uspdisc/constructions.hpp"
#include "uspdisc/discrepancy.hpp"
#include "uspdisc/errors.hpp"
#include "uspdisc/random.hpp"
#include "uspdisc/shortest_paths.hpp"

using namespace uspdisc;

namespace {

using EdgeSet = std::set<std::tuple<NodeId, NodeId, Rational>>;

EdgeSet edge_set(const WeightedGraph& g) {
  EdgeSet out;
  for (const Edge& e : g.edges()) out.emplace(std::min(e.u, e.v), std::max(e.u, e.v), e.w);
  return out;
}

std::vector<std::vector<NodeId>> path_list(const PathSystem& ps) {
  std::vector<std::vector<NodeId>> out;
  for (std::size_t p = 0; p < ps.size(); ++p) out.emplace_back(ps[p].begin(), ps[p].end());
  return out;
}

// Small hand-sized instance with a few monotone paths, one per start column.
LayeredInstance small_instance(int layers, int columns, int shift, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::uint64_t> psi(layers + 1, 0);
  for (int i = 1; i <= layers; ++i) psi[i] = rng.below((std::uint64_t{1} << 32) - 1) + 1;
  LayeredInstance inst = assemble_layered(layers * columns, layers, columns, shift, psi);
  for (int j = 1; j <= columns; ++j) {
    std::vector<NodeId> path{inst.node(1, j)};
    int col = j;
    for (int i = 2; i <= layers; ++i) {
      col = std::min(columns, col + static_cast<int>(rng.below(shift + 1)));
      path.push_back(inst.node(i, col));
    }
    inst.paths.add_path(path);
  }
  return inst;
}

}  // namespace

TEST_CASE("layered instance at n = 64") {
  LayeredInstance inst = build_layered_instance(64, 0);
  const auto& p = inst.params;
  CHECK(p.layers == 2);
  CHECK(p.columns == 32);
  CHECK(p.max_shift == 16);
  CHECK(p.q == 1);
  CHECK(inst.directions.size() == 4);
  CHECK(inst.start_set.size() == 16);
  CHECK(inst.paths.size() == p.path_count);
  CHECK(inst.paths.size() <= 16 * 4);
  CHECK(inst.graph.node_count() == 64);

  // Independent re-check with a fresh oracle per path.
  ShortestPathOracle oracle(inst.graph);
  for (std::size_t k = 0; k < inst.paths.size(); ++k) {
    auto path = inst.paths[k];
    REQUIRE(path.size() == 2);
    auto r = oracle.query(path.front(), path.back());
    CHECK(r.unique);
    CHECK(std::equal(r.path.begin(), r.path.end(), path.begin(), path.end()));
  }
}

TEST_CASE("layered desk parameters") {
  struct Row {
    int n, layers, columns, shift, q;
    std::size_t dirs, starts;
  };
  for (Row r : {Row{64, 2, 32, 16, 1, 4, 16}, Row{256, 3, 85, 28, 1, 7, 42}, Row{1024, 5, 204, 40, 1, 10, 102}}) {
    CAPTURE(r.n);
    LayeredInstance inst = build_layered_instance(r.n, 1);
    CHECK(inst.params.layers == r.layers);
    CHECK(inst.params.columns == r.columns);
    CHECK(inst.params.max_shift == r.shift);
    CHECK(inst.params.q == r.q);
    CHECK(inst.directions.size() == r.dirs);
    CHECK(inst.start_set.size() == r.starts);
    for (std::size_t k = 0; k < inst.paths.size(); ++k) {
      auto path = inst.paths[k];
      REQUIRE(path.size() == static_cast<std::size_t>(r.layers));
      for (std::size_t i = 0; i < path.size(); ++i) CHECK(inst.layer_of(path[i]) == static_cast<int>(i) + 1);
    }
    CHECK_FALSE(first_non_usp_path(inst.graph, inst.paths).has_value());
  }
}

TEST_CASE("edge weights are squared heights plus the hop penalty") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    LayeredInstance inst = build_layered_instance(256, seed);
    const auto& c = inst.graph.coords();
    const Rational H = inst.params.hop_penalty;
    const Rational u_max = Rational(inst.params.max_shift + 1);
    CHECK(H == Rational(inst.params.layers - 1) * (1 + u_max * u_max) + 1);
    for (std::size_t e = 0; e < inst.graph.edge_count(); ++e) {
      const Edge& ed = inst.graph.edge(e);
      Rational dy = c[ed.v].y - c[ed.u].y;
      CHECK(c[ed.v].x - c[ed.u].x == 1);
      CHECK(dy == inst.edge_vector(e));
      CHECK(ed.w - H == dy * dy);
    }
  }
}

TEST_CASE("greedy steps take the unique closest edge vector") {
  LayeredInstance inst = build_layered_instance(256, 3);
  for (std::size_t k = 0; k < inst.paths.size(); ++k) {
    auto path = inst.paths[k];
    const Rational& d = inst.directions[inst.path_direction[k]];
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      int layer = inst.layer_of(path[i]);
      int col = inst.column_of(path[i]);
      // Scan the edges that leave this node.
      std::vector<std::pair<Rational, NodeId>> options;
      for (int x = 0; x <= inst.params.max_shift && col + x <= inst.params.columns; ++x) {
        options.emplace_back(abs(Rational(x) + inst.psi[layer + 1] - d), inst.node(layer + 1, col + x));
      }
      std::sort(options.begin(), options.end());
      REQUIRE(options.size() >= 1);
      if (options.size() > 1) CHECK(options[0].first < options[1].first);
      CHECK(options[0].second == path[i + 1]);
    }
  }
  CHECK_NOTHROW(verify_layered_instance(inst));
}

TEST_CASE("layered build is deterministic and validates its range") {
  LayeredInstance a = build_layered_instance(256, 9);
  LayeredInstance b = build_layered_instance(256, 9);
  CHECK(a.psi == b.psi);
  CHECK(path_list(a.paths) == path_list(b.paths));
  CHECK(layered_to_json(a) == layered_to_json(b));
  LayeredInstance c = build_layered_instance(256, 10);
  CHECK(a.psi != c.psi);
  CHECK_NOTHROW(build_layered_instance(32, 0));
  CHECK_THROWS_AS(build_layered_instance(16, 0), ParamRangeEmpty);
  CHECK_THROWS_AS(build_layered_instance(64, 0, {.layers = 6}), ParamRangeEmpty);
}

TEST_CASE("verify_layered_instance catches a tampered path") {
  LayeredInstance inst = build_layered_instance(256, 2);
  // Two unbalanced steps lose to the balanced route through the middle layer.
  PathSystem bad(inst.graph.node_count(), PathMode::undirected);
  bad.add_path(inst.paths[0]);
  bad.add_path({inst.node(1, 1), inst.node(2, 1), inst.node(3, 5)});
  inst.paths = bad;
  CHECK_THROWS_AS(verify_layered_instance(inst), VerificationFailed);
  auto first = first_non_usp_path(inst.graph, inst.paths);
  REQUIRE(first.has_value());
  CHECK(*first == 1);
}

TEST_CASE("hop path multiplicity") {
  LayeredInstance inst = build_layered_instance(256, 4);
  std::vector<std::size_t> through(inst.graph.node_count(), 0);
  for (std::size_t k = 0; k < inst.paths.size(); ++k) {
    for (NodeId v : inst.paths[k]) ++through[v];
  }
  for (NodeId v = 0; v < inst.graph.node_count(); v += 7) {
    auto m = hop_path_multiplicity(inst, v, v);
    CHECK(m.paths == through[v]);
    CHECK(m.hops == 0);
  }
  // Same layer, different nodes never share a path.
  CHECK(hop_path_multiplicity(inst, inst.node(1, 1), inst.node(1, 2)).paths == 0);
  auto m = hop_path_multiplicity(inst, inst.node(1, 1), inst.node(3, 1));
  CHECK(m.hops == 2);

  // Exhaustive scan over consecutive-layer pairs of every path.
  const double l = inst.params.layers;
  double worst = 0;
  for (std::size_t k = 0; k < inst.paths.size(); ++k) {
    auto path = inst.paths[k];
    for (std::size_t a = 0; a < path.size(); ++a) {
      for (std::size_t b = a + 1; b < path.size(); ++b) {
        auto hm = hop_path_multiplicity(inst, path[a], path[b]);
        worst = std::max(worst, hm.paths * hm.hops / l);
      }
    }
  }
  CHECK(worst >= 1.0 / l);
  CHECK(worst <= 4.0);
  CHECK(inst.params.multiplicity_ratio <= 4.0);
}

TEST_CASE("crossing examples") {
  auto two = [](Point a, Point b, Point c, Point d) {
    WeightedGraph g(4, false);
    g.set_coords({a, b, c, d});
    g.add_edge(0, 1, 1);
    g.add_edge(2, 3, 1);
    return g;
  };
  auto P = [](int x, int y) { return Point{Rational(x), Rational(y)}; };
  WeightedGraph parallel = two(P(0, 0), P(2, 0), P(0, 1), P(2, 1));
  CHECK(count_crossings_all_pairs(parallel) == 0);
  CHECK(count_crossings_sweep(parallel) == 0);
  WeightedGraph cross = two(P(0, 0), P(2, 2), P(0, 2), P(2, 0));
  CHECK(count_crossings_all_pairs(cross) == 1);
  CHECK(count_crossings_sweep(cross) == 1);
  // An endpoint touching the other segment's interior is not a crossing.
  WeightedGraph touch = two(P(0, 0), P(2, 2), P(1, 1), P(3, 0));
  CHECK(count_crossings_all_pairs(touch) == 0);
  CHECK(count_crossings_sweep(touch) == 0);
  WeightedGraph overlap = two(P(0, 0), P(2, 2), P(1, 1), P(3, 3));
  CHECK(count_crossings_all_pairs(overlap) == 1);
  CHECK(count_crossings_sweep(overlap) == 1);
  // Crossing exactly above an endpoint of a third edge.
  WeightedGraph three(6, false);
  three.set_coords({P(0, 0), P(4, 4), P(0, 4), P(4, 0), P(2, 7), P(5, 9)});
  three.add_edge(0, 1, 1);
  three.add_edge(2, 3, 1);
  three.add_edge(4, 5, 1);
  CHECK(count_crossings_all_pairs(three) == 1);
  CHECK(count_crossings_sweep(three) == 1);
  WeightedGraph vertical = two(P(0, 0), P(0, 2), P(1, 0), P(2, 1));
  CHECK_THROWS_AS(count_crossings_sweep(vertical), std::invalid_argument);
}

TEST_CASE("crossing counters agree") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    LayeredInstance inst = small_instance(3, 9, 4, seed);
    std::size_t fast = count_crossings(inst);
    CHECK(fast == count_crossings_all_pairs(inst.graph));
    CHECK(fast == count_crossings_sweep(inst.graph));
  }
  LayeredInstance inst = build_layered_instance(64, 5);
  std::size_t fast = count_crossings(inst);
  CHECK(fast == count_crossings_sweep(inst.graph));
  CHECK(fast == count_crossings_all_pairs(inst.graph));

  // Random segments with small integer coordinates exercise collinear cases.
  Rng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    WeightedGraph g(12, false);
    std::vector<Point> c;
    for (int v = 0; v < 12; ++v) {
      c.push_back({Rational(static_cast<long>(v % 2 == 0 ? rng.below(3) : 3 + rng.below(3))),
                   Rational(static_cast<long>(rng.below(4)))});
    }
    g.set_coords(c);
    for (int v = 0; v < 12; v += 2) g.add_edge(v, v + 1, 1);
    CHECK(count_crossings_sweep(g) == count_crossings_all_pairs(g));
  }
}

TEST_CASE("planarizing a drawing without crossings adds one per edge") {
  LayeredInstance inst = small_instance(2, 2, 1, 1);
  REQUIRE(count_crossings(inst) == 0);
  for (PieceWeight mode : {PieceWeight::squared_length, PieceWeight::slab_scaled}) {
    PlanarizedInstance out = planarize(inst, true, mode);
    CHECK(out.graph.node_count() == inst.graph.node_count());
    CHECK(out.crossing_nodes == 0);
    CHECK(out.vertical_lines == 0);
    REQUIRE(out.graph.edge_count() == inst.graph.edge_count());
    for (std::size_t e = 0; e < inst.graph.edge_count(); ++e) {
      CHECK(out.graph.edge(e).w == inst.graph.edge(e).w + 1);
    }
    CHECK(path_list(out.paths) == path_list(inst.paths));
  }
}

TEST_CASE("a single crossing becomes one degree-4 node") {
  LayeredInstance inst = small_instance(2, 3, 2, 7);
  REQUIRE(count_crossings(inst) == 1);
  PlanarizedInstance out = planarize(inst, false);
  CHECK(out.graph.node_count() == 7);
  CHECK(out.crossing_nodes == 1);
  CHECK(out.vertical_lines == 1);
  CHECK(out.subdivision_nodes == 5);
  CHECK(out.graph.edge_count() == 8);
  int degree = 0;
  for (const Edge& e : out.graph.edges()) degree += (e.u == 6) + (e.v == 6);
  CHECK(degree == 4);
  // The node sits where (1, 2) and (2, 0) meet, halfway across the gap.
  const Point& p = out.graph.coords()[6];
  CHECK(p.x == Rational(3, 2));
  CHECK(p.y == inst.graph.coords()[inst.node(1, 2)].y + inst.psi[2] / 2);
  CHECK(count_crossings_sweep(out.graph) == 0);
  // Each half of a crossed edge keeps the squared length of its piece.
  const Rational H = inst.params.hop_penalty;
  auto e = out.graph.find_edge(inst.node(1, 1), 6);
  REQUIRE(e);
  Rational u = 2 + inst.psi[2];
  CHECK(out.graph.edge(*e).w == (1 + u * u) / 4 + H);
  // Uncrossed edges are subdivided then contracted, two pieces each.
  auto f = out.graph.find_edge(inst.node(1, 1), inst.node(2, 1));
  REQUIRE(f);
  u = inst.psi[2];
  CHECK(out.graph.edge(*f).w == (1 + u * u) / 2 + 2 * H);
}

TEST_CASE("planarize matches the literal construction") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    LayeredInstance inst = small_instance(3, 7, 4, seed);
    for (PieceWeight mode : {PieceWeight::squared_length, PieceWeight::slab_scaled}) {
      PlanarizedInstance fast = planarize(inst, false, mode);
      PlanarizedInstance ref = planarize_reference(inst, nullptr, mode);
      CHECK(fast.graph.node_count() == ref.graph.node_count());
      CHECK(fast.crossing_nodes == ref.crossing_nodes);
      CHECK(fast.subdivision_nodes == ref.subdivision_nodes);
      CHECK(fast.vertical_lines == ref.vertical_lines);
      CHECK(edge_set(fast.graph) == edge_set(ref.graph));
      CHECK(fast.graph.coords() == ref.graph.coords());
      CHECK(path_list(fast.paths) == path_list(ref.paths));
    }
  }
  LayeredInstance inst = build_layered_instance(64, 0);
  PlanarizedInstance fast = planarize(inst, false);
  PlanarizedInstance ref = planarize_reference(inst);
  CHECK(edge_set(fast.graph) == edge_set(ref.graph));
  CHECK(path_list(fast.paths) == path_list(ref.paths));
}

TEST_CASE("contraction order does not matter") {
  LayeredInstance inst = small_instance(3, 6, 3, 2);
  PlanarizedInstance base = planarize_reference(inst);
  std::vector<std::size_t> order;
  for (std::size_t v = inst.graph.node_count(); v < inst.graph.node_count() + base.subdivision_nodes; ++v) {
    order.push_back(v);
  }
  std::reverse(order.begin(), order.end());
  PlanarizedInstance reversed = planarize_reference(inst, &order);
  CHECK(edge_set(reversed.graph) == edge_set(base.graph));
  CHECK(path_list(reversed.paths) == path_list(base.paths));
  Rng rng(5);
  for (int trial = 0; trial < 3; ++trial) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    PlanarizedInstance shuffled = planarize_reference(inst, &order);
    CHECK(edge_set(shuffled.graph) == edge_set(base.graph));
  }
}

TEST_CASE("planarized n = 64 instance") {
  LayeredInstance inst = build_layered_instance(64, 0);
  PlanarizedInstance out = planarize(inst, true, PieceWeight::slab_scaled);
  CHECK(out.original_nodes == 64);
  CHECK(out.crossing_nodes > 0);
  CHECK(count_crossings_sweep(out.graph) == 0);
  REQUIRE(out.paths.size() == inst.paths.size());
  for (std::size_t k = 0; k < out.paths.size(); ++k) {
    auto a = inst.paths[k];
    auto b = out.paths[k];
    CHECK(a.front() == b.front());
    CHECK(a.back() == b.back());
    // Image is a walk of G' whose weight is the straight traversal cost.
    Rational expected = 0;
    const std::size_t pieces = out.vertical_lines + 1;
    for (std::size_t i = 0; i + 1 < a.size(); ++i) {
      Rational u = inst.edge_vector(*inst.graph.find_edge(a[i], a[i + 1]));
      expected += 1 + u * u + out.piece_penalty * static_cast<long>(pieces);
    }
    CHECK(out.graph.path_weight(b) == expected);
  }
  CHECK_FALSE(check_consistency(out.paths).has_value());
}

TEST_CASE("squared-length pieces let a bent route undercut a straight one") {
  // The cost of a monotone route across a gap is (|dt|^2 + dy^2) per piece.
  // With unequal slabs, spreading the rise evenly over pieces beats keeping a
  // constant slope, so some image path stops being the unique shortest one.
  LayeredInstance inst = build_layered_instance(64, 0);
  PlanarizedInstance out = planarize(inst, false, PieceWeight::squared_length);
  auto bad = first_non_usp_path(out.graph, out.paths);
  REQUIRE(bad.has_value());
  auto path = out.paths[*bad];
  ShortestPathOracle oracle(out.graph);
  auto best = oracle.tree(path.front());
  auto alt = best.path_to(path.back());
  CHECK(out.graph.path_weight(alt) <= out.graph.path_weight(path));
  CHECK_FALSE(std::equal(alt.begin(), alt.end(), path.begin(), path.end()));
  CHECK_THROWS_AS(planarize(inst, true, PieceWeight::squared_length), VerificationFailed);
}

TEST_CASE("2-lift of a single edge") {
  WeightedGraph g(2, false);
  g.add_edge(0, 1, 3);
  PathSystem ps(2, PathMode::undirected);
  ps.add_path({0, 1});
  LiftedSystem out = bipartite_2lift(g, ps);
  CHECK(out.graph.node_count() == 4);
  REQUIRE(out.graph.edge_count() == 1);
  CHECK(out.graph.edge(0).u == 0);
  CHECK(out.graph.edge(0).v == 3);
  CHECK(out.graph.edge(0).w == 3);
  CHECK(path_list(out.paths) == std::vector<std::vector<NodeId>>{{0, 3}});
  CHECK(out.threaded_paths == 1);
}

TEST_CASE("2-lift keeps bipartiteness, consistency and herdisc") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    int n = 5 + static_cast<int>(seed % 2);
    RandomUspInstance base = random_usp_graph(n, 0.6, seed);
    LiftedSystem out = bipartite_2lift(base.graph, base.paths);
    CHECK(out.graph.node_count() == 2 * n);
    CHECK_NOTHROW(bipartite_side_coloring(out.graph));
    CHECK_FALSE(check_consistency(out.paths).has_value());
    REQUIRE(out.paths.size() == base.paths.size());
    std::set<NodeId> copies(out.copy_of.begin(), out.copy_of.end());
    CHECK(copies.size() == static_cast<std::size_t>(n));
    for (NodeId v = 0; v < n; ++v) CHECK(out.copy_of[v] / 2 == v);

    IncidenceMatrix before = vertex_incidence_matrix(base.paths);
    IncidenceMatrix after = vertex_incidence_matrix(out.paths);
    std::vector<std::size_t> cols(out.copy_of.begin(), out.copy_of.end());
    IncidenceMatrix restricted = after.select_columns(cols);
    int h0 = exact_hereditary_discrepancy(before).value;
    CHECK(exact_hereditary_discrepancy(restricted).value >= h0);
    CHECK(exact_hereditary_discrepancy(after).value == h0);
    ++checked;
  }
  CHECK(checked == 12);

  WeightedGraph g(4, false);
  g.add_edge(0, 1, 1);
  g.add_edge(1, 2, 1);
  g.add_edge(2, 3, 1);
  PathSystem bad(4, PathMode::undirected);
  bad.add_path({0, 1, 2, 3});
  bad.add_path({0, 2, 3});
  CHECK_THROWS_AS(bipartite_2lift(g, bad), InconsistentSystem);
}

TEST_CASE("Hadamard grid family") {
  HadamardGrid h2 = hadamard_grid_family(2);
  CHECK(h2.grid.node_count() == 4);
  CHECK(h2.grid.edge_count() == 4);
  CHECK(h2.paths.size() == 6);
  CHECK(h2.matrix == std::vector<std::vector<int>>{{1, 1}, {1, 0}});
  CHECK(path_list(h2.paths) == std::vector<std::vector<NodeId>>{
                                   {0, 2, 3, 1}, {2, 0, 1, 3}, {0, 2, 3}, {2, 0, 1}, {0, 1}, {2, 3}});

  for (int n : {4, 8, 16}) {
    CAPTURE(n);
    HadamardGrid h = hadamard_grid_family(n);
    CHECK(h.grid.edge_count() == static_cast<std::size_t>(3 * n - 2));
    CHECK(h.paths.size() == static_cast<std::size_t>(2 * n + 2));
    for (int i = 0; i < n; ++i) {
      for (int side = 0; side < 2; ++side) {
        auto p = h.paths[2 * i + side];
        std::vector<int> verticals;
        for (std::size_t k = 1; k < p.size(); ++k) {
          CHECK(h.grid.has_edge(p[k - 1], p[k]));
          if (std::abs(p[k] - p[k - 1]) == n) verticals.push_back(p[k] % n);
        }
        std::vector<int> expected;
        for (int j = 0; j < n; ++j) {
          if (h.matrix[i][j]) expected.push_back(j);
        }
        CHECK(verticals == expected);
      }
    }
    CHECK(check_consistency(h.paths).has_value());
  }
  CHECK_THROWS_AS(hadamard_grid_family(3), NotPowerOfTwo);
  CHECK_THROWS_AS(hadamard_grid_family(32), NotPowerOfTwo);

  HadamardGrid h4 = hadamard_grid_family(4);
  IncidenceMatrix m = edge_incidence_matrix(h4.paths);
  CHECK(m.cols() == 10);
  CHECK(exact_discrepancy(m).value >= 1);
}
