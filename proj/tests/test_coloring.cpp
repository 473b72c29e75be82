#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "doctest.h"
#include "uspdisc/coloring.hpp"
#include "uspdisc/discrepancy.hpp"
#include "uspdisc/errors.hpp"
#include "uspdisc/random.hpp"
#include "uspdisc/shortest_paths.hpp"

using namespace uspdisc;

namespace {

PathSystem single_path(int n) {
  PathSystem ps(n, PathMode::undirected);
  std::vector<NodeId> p(n);
  for (int v = 0; v < n; ++v) p[v] = v;
  ps.add_path(p);
  return ps;
}

// Every monotone staircase between every ordered pair of grid nodes.
void for_each_monotone_path(int k, int l, const std::function<void(const std::vector<NodeId>&)>& visit) {
  std::vector<NodeId> path;
  std::function<void(int, int, int, int)> walk = [&](int x, int y, int tx, int ty) {
    path.push_back(grid_node(l, x, y));
    if (x == tx && y == ty) {
      visit(path);
    } else {
      if (x != tx) walk(x + (tx > x ? 1 : -1), y, tx, ty);
      if (y != ty) walk(x, y + (ty > y ? 1 : -1), tx, ty);
    }
    path.pop_back();
  };
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < l; ++b)
      for (int c = 0; c < k; ++c)
        for (int d = 0; d < l; ++d) walk(a, b, c, d);
}

}  // namespace

TEST_CASE("cover threshold") {
  CHECK(cover_threshold(16) == 4);
  CHECK(cover_threshold(17) == 5);
  CHECK(cover_threshold(100) == 10);
  CHECK(cover_threshold(1) == 1);
  CHECK(cover_threshold(4096) == 64);
}

TEST_CASE("cover of short paths is empty") {
  PathSystem ps(16, PathMode::undirected);
  ps.add_path({0, 1, 2});
  ps.add_path({3, 4, 5});
  CHECK(build_path_cover(ps, CoverMode::vertex).paths.empty());
}

TEST_CASE("cover of one 16-node path") {
  auto ps = single_path(16);
  for (CoverMode mode : {CoverMode::vertex, CoverMode::edge}) {
    auto cover = build_path_cover(ps, mode);
    REQUIRE(cover.paths.size() == 4);
    for (int k = 0; k < 4; ++k) {
      CHECK(cover.paths[k] == std::vector<NodeId>{4 * k, 4 * k + 1, 4 * k + 2, 4 * k + 3});
      CHECK(cover.source_index[k] == 0);
    }
    CHECK(audit_path_cover(ps, cover).ok());
  }
}

TEST_CASE("cover rejects inconsistent and directed systems") {
  PathSystem bad(5, PathMode::undirected);
  bad.add_path({1, 2, 3});
  bad.add_path({1, 4, 3});
  CHECK_THROWS_AS(build_path_cover(bad, CoverMode::vertex), InconsistentSystem);
  PathSystem dir(3, PathMode::directed);
  dir.add_path({0, 1, 2});
  CHECK_THROWS_AS(build_path_cover(dir, CoverMode::vertex), std::invalid_argument);
}

TEST_CASE("cover on a random USP system with n = 100") {
  auto inst = random_usp_graph(100, 0.04, 3);
  for (CoverMode mode : {CoverMode::vertex, CoverMode::edge}) {
    auto cover = build_path_cover(inst.paths, mode);
    CHECK(cover.paths.size() <= 10);
    auto audit = audit_path_cover(inst.paths, cover);
    CHECK(audit.poorly_covered == 0);
    CHECK(audit.ok());
  }
}

TEST_CASE("alternating vertex labels") {
  auto ps = single_path(16);
  auto cover = build_path_cover(ps, CoverMode::vertex);
  const std::vector<int> first = {-1, 1, -1, 1};
  std::set<int> seen;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto x = alternating_vertex_coloring(ps, cover, seed);
    for (const auto& cp : cover.paths) {
      std::vector<int> got;
      for (NodeId v : cp) got.push_back(x.values[v]);
      bool is_first = got == first;
      bool is_second = got == std::vector<int>{1, -1, 1, -1};
      CHECK((is_first || is_second));
      seen.insert(is_first ? 1 : 2);
    }
    CHECK(x == alternating_vertex_coloring(ps, cover, seed));
  }
  CHECK(seen.size() == 2);
}

TEST_CASE("alternating edge labels") {
  auto ps = single_path(16);
  auto cover = build_path_cover(ps, CoverMode::edge);
  auto universe = edge_universe(ps);
  std::set<int> seen;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto x = alternating_edge_coloring(ps, cover, seed);
    REQUIRE(x.values.size() == 15);
    for (std::size_t k = 0; k < cover.paths.size(); ++k) {
      auto edges = cover_edges(ps, cover, k);
      REQUIRE(edges.size() == 3);
      std::vector<int> got;
      for (auto e : edges) {
        auto c = std::lower_bound(universe.begin(), universe.end(), e) - universe.begin();
        got.push_back(x.values[c]);
      }
      bool is_first = got == std::vector<int>{-1, 1, -1};
      CHECK((is_first || got == std::vector<int>{1, -1, 1}));
      seen.insert(is_first ? 1 : 2);
    }
  }
  CHECK(seen.size() == 2);
}

TEST_CASE("per-cover-path sums and E3 bound on random USP systems") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    auto inst = random_usp_graph(60 + static_cast<int>(seed) * 10, 0.05, seed);
    auto vc = build_path_cover(inst.paths, CoverMode::vertex, false);
    auto ec = build_path_cover(inst.paths, CoverMode::edge, false);
    auto xv = alternating_vertex_coloring(inst.paths, vc, seed);
    auto xe = alternating_edge_coloring(inst.paths, ec, seed);
    auto av = audit_path_cover(inst.paths, vc, &xv);
    auto ae = audit_path_cover(inst.paths, ec, &xe);
    CHECK(av.ok());
    CHECK(ae.ok());
    CHECK(ae.repeats == 0);
    CHECK(ae.e3_excess == 0);
  }
}

TEST_CASE("even intersections contribute zero") {
  auto ps = single_path(16);
  PathSystem probe(16, PathMode::undirected);
  probe.add_path({2, 3, 4, 5});
  probe.add_path({1, 2, 3, 4, 5, 6, 7});
  auto cover = build_path_cover(ps, CoverMode::vertex);
  auto x = alternating_vertex_coloring(ps, cover, 4);
  int a = 0;
  for (NodeId v : {2, 3}) a += x.values[v];
  CHECK(a == 0);
  for (NodeId v : {4, 5, 6, 7}) a += x.values[v];
  CHECK(a == 0);
}

TEST_CASE("per-cover-path contribution has mean zero") {
  // Path 0..15 covered by four blocks; probe paths cut odd pieces out of them.
  auto ps = single_path(16);
  auto cover = build_path_cover(ps, CoverMode::vertex);
  const std::vector<std::vector<NodeId>> pieces = {{0}, {1, 2, 3}, {4, 5, 6}, {13}, {9, 10, 11}};
  const int trials = 10000;
  for (const auto& piece : pieces) {
    long total = 0;
    for (int seed = 0; seed < trials; ++seed) {
      auto x = alternating_vertex_coloring(ps, cover, static_cast<std::uint64_t>(seed));
      int s = 0;
      for (NodeId v : piece) s += x.values[v];
      CHECK(std::abs(s) == 1);
      total += s;
    }
    double mean = static_cast<double>(total) / trials;
    CHECK(std::abs(mean) <= 3.0 / std::sqrt(static_cast<double>(trials)));
  }
}

TEST_CASE("random coloring") {
  CHECK(random_coloring(0, Target::vertices, 1).values.empty());
  CHECK(random_coloring(50, Target::edges, 7) == random_coloring(50, Target::edges, 7));
  CHECK_FALSE(random_coloring(50, Target::edges, 7) == random_coloring(50, Target::edges, 8));
  auto j = coloring_to_json(random_coloring(5, Target::edges, 2));
  CHECK(coloring_from_json(j) == random_coloring(5, Target::edges, 2));
}

TEST_CASE("bipartite side coloring") {
  WeightedGraph edge(2, false);
  edge.add_edge(0, 1, 1);
  auto x = bipartite_side_coloring(edge);
  CHECK(x.values[0] + x.values[1] == 0);
  WeightedGraph tri(3, false);
  tri.add_edge(0, 1, 1);
  tri.add_edge(1, 2, 1);
  tri.add_edge(2, 0, 1);
  CHECK_THROWS_AS(bipartite_side_coloring(tri), NotBipartite);
}

TEST_CASE("grid_edges lists each grid edge once") {
  CHECK(grid_edges(1, 1).empty());
  CHECK(grid_edges(1, 2) == EdgeList{{0, 1}});
  CHECK(grid_edges(2, 2) == EdgeList{{0, 1}, {0, 2}, {1, 3}, {2, 3}});
  CHECK(grid_edges(3, 3).size() == 12);
}

TEST_CASE("grid parity colorings") {
  CHECK(grid_parity_coloring(1, 1, Target::vertices).values == std::vector<std::int8_t>{1});
  auto x = grid_parity_coloring(3, 3, Target::vertices);
  int worst = 0;
  for_each_monotone_path(3, 3, [&](const std::vector<NodeId>& p) {
    int s = 0;
    for (NodeId v : p) s += x.values[v];
    worst = std::max(worst, std::abs(s));
  });
  CHECK(worst == 1);
  auto e = grid_parity_coloring(6, 6, Target::edges);
  auto universe = grid_edges(6, 6);
  worst = 0;
  for_each_monotone_path(6, 6, [&](const std::vector<NodeId>& p) {
    int s = 0;
    for (std::size_t k = 1; k < p.size(); ++k) {
      NodePair key{std::min(p[k - 1], p[k]), std::max(p[k - 1], p[k])};
      s += e.values[std::lower_bound(universe.begin(), universe.end(), key) - universe.begin()];
    }
    worst = std::max(worst, std::abs(s));
  });
  CHECK(worst <= 2);
  CHECK(worst >= 1);
}

TEST_CASE("system_discrepancy matches the incidence matrix") {
  auto inst = random_usp_graph(30, 0.2, 2);
  auto xv = random_coloring(30, Target::vertices, 1);
  CHECK(system_discrepancy(inst.paths, xv) == eval_discrepancy(vertex_incidence_matrix(inst.paths), xv));
  auto em = edge_incidence_matrix(inst.paths);
  auto xe = random_coloring(em.cols(), Target::edges, 1);
  CHECK(system_discrepancy(inst.paths, xe) == eval_discrepancy(em, xe));
}
