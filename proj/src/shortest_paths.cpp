#include "uspdisc/shortest_paths.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>
#include <queue>
#include <unordered_set>
#include <variant>

#include <boost/multiprecision/cpp_int.hpp>

#include "uspdisc/errors.hpp"
#include "uspdisc/random.hpp"

namespace uspdisc {

using boost::multiprecision::int256_t;

std::vector<NodeId> SourceTree::path_to(NodeId t) const {
  std::vector<NodeId> out;
  if (!reached[t]) return out;
  for (NodeId v = t; v != -1; v = parent[v]) out.push_back(v);
  std::reverse(out.begin(), out.end());
  return out;
}

int SourceTree::path_nodes(NodeId t) const {
  if (!reached[t]) return 0;
  int k = 0;
  for (NodeId v = t; v != -1; v = parent[v]) ++k;
  return k;
}

namespace {

template <class W>
struct Engine {
  std::vector<std::size_t> offset;
  std::vector<NodeId> target;
  std::vector<W> weight;
  double tau = 0;

  bool tie(const W& a, const W& b) const {
    if constexpr (std::is_same_v<W, double>) {
      return std::fabs(a - b) <= tau * std::max(std::fabs(a), std::fabs(b));
    } else {
      return a == b;
    }
  }
  bool less(const W& a, const W& b) const {
    if constexpr (std::is_same_v<W, double>) {
      return a < b && !tie(a, b);
    } else {
      return a < b;
    }
  }

  SourceTree run(NodeId s) const {
    const std::size_t n = offset.size() - 1;
    SourceTree t;
    t.source = s;
    t.parent.assign(n, -1);
    t.reached.assign(n, 0);
    t.unique.assign(n, 0);
    std::vector<W> dist(n);
    std::vector<int> tight(n, 0);
    std::vector<char> settled(n, 0);
    using Item = std::pair<W, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    dist[s] = W(0);
    t.reached[s] = 1;
    heap.emplace(W(0), s);
    while (!heap.empty()) {
      auto [d, u] = heap.top();
      heap.pop();
      if (settled[u] || d != dist[u]) continue;
      settled[u] = 1;
      t.settle_order.push_back(u);
      for (std::size_t k = offset[u]; k < offset[u + 1]; ++k) {
        NodeId v = target[k];
        if (v == s) continue;
        W cand = d + weight[k];
        if (!t.reached[v]) {
          t.reached[v] = 1;
          dist[v] = cand;
          t.parent[v] = u;
          tight[v] = 1;
          heap.emplace(std::move(cand), v);
        } else if (less(cand, dist[v])) {
          dist[v] = cand;
          t.parent[v] = u;
          tight[v] = 1;
          heap.emplace(std::move(cand), v);
        } else if (tie(cand, dist[v]) && t.parent[v] != u) {
          ++tight[v];
        }
      }
    }
    t.unique[s] = 1;
    for (NodeId v : t.settle_order) {
      if (v != s) t.unique[v] = tight[v] == 1 && t.unique[t.parent[v]];
    }
    return t;
  }
};

using AnyEngine = std::variant<Engine<std::int64_t>, Engine<__int128>, Engine<int256_t>,
                               Engine<Rational>, Engine<double>>;

template <class W, class Convert>
Engine<W> build(const WeightedGraph& g, Convert convert) {
  Engine<W> e;
  const int n = g.node_count();
  std::vector<std::size_t> degree(n + 1, 0);
  for (const Edge& x : g.edges()) {
    ++degree[x.u + 1];
    if (!g.directed()) ++degree[x.v + 1];
  }
  for (int v = 0; v < n; ++v) degree[v + 1] += degree[v];
  e.offset = degree;
  e.target.resize(degree[n]);
  e.weight.resize(degree[n]);
  std::vector<std::size_t> fill(degree.begin(), degree.end() - 1);
  // Arcs are laid out in edge insertion order per node: deterministic.
  for (const Edge& x : g.edges()) {
    W w = convert(x.w);
    e.target[fill[x.u]] = x.v;
    e.weight[fill[x.u]++] = w;
    if (!g.directed()) {
      e.target[fill[x.v]] = x.u;
      e.weight[fill[x.v]++] = w;
    }
  }
  return e;
}

__int128 to_int128(const mpz_class& z) {
  // Magnitude fits in 126 bits by the caller's check.
  mpz_class mag = abs(z);
  mpz_class hi = mag >> 64;
  mpz_class lo = mag - (hi << 64);
  unsigned __int128 v = (static_cast<unsigned __int128>(mpz_get_ui(hi.get_mpz_t())) << 64) |
                        mpz_get_ui(lo.get_mpz_t());
  return sgn(z) < 0 ? -static_cast<__int128>(v) : static_cast<__int128>(v);
}

}  // namespace

struct ShortestPathOracle::Impl {
  AnyEngine engine;
  std::string name;
};

ShortestPathOracle::ShortestPathOracle(const WeightedGraph& g, OracleOptions opts)
    : graph_(&g), impl_(std::make_unique<Impl>()) {
  for (const Edge& e : g.edges()) {
    if (sgn(e.w) < 0) throw NegativeWeight("negative edge weight");
  }
  if (opts.arithmetic == Arithmetic::floating) {
    auto e = build<double>(g, [](const Rational& w) { return w.get_d(); });
    e.tau = opts.tolerance;
    impl_->engine = std::move(e);
    impl_->name = "double";
    return;
  }
  // Scale all weights by the lcm of denominators and pick the narrowest
  // integer type that holds every simple path length.
  mpz_class scale = 1;
  for (const Edge& e : g.edges()) mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), e.w.get_den_mpz_t());
  mpz_class max_scaled = 0;
  for (const Edge& e : g.edges()) {
    mpz_class s = e.w.get_num() * (scale / e.w.get_den());
    if (s > max_scaled) max_scaled = s;
  }
  mpz_class bound = max_scaled * std::max(1, g.node_count());
  std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
  auto scaled = [&](const Rational& w) -> mpz_class { return w.get_num() * (scale / w.get_den()); };
  if (bits <= 62) {
    impl_->engine = build<std::int64_t>(g, [&](const Rational& w) {
      return static_cast<std::int64_t>(mpz_get_si(scaled(w).get_mpz_t()));
    });
    impl_->name = "int64";
  } else if (bits <= 125) {
    impl_->engine = build<__int128>(g, [&](const Rational& w) { return to_int128(scaled(w)); });
    impl_->name = "int128";
  } else if (bits <= 253) {
    impl_->engine = build<int256_t>(g, [&](const Rational& w) { return int256_t(scaled(w).get_str()); });
    impl_->name = "int256";
  } else {
    impl_->engine = build<Rational>(g, [](const Rational& w) { return w; });
    impl_->name = "rational";
  }
}

ShortestPathOracle::~ShortestPathOracle() = default;
ShortestPathOracle::ShortestPathOracle(ShortestPathOracle&&) noexcept = default;
ShortestPathOracle& ShortestPathOracle::operator=(ShortestPathOracle&&) noexcept = default;

SourceTree ShortestPathOracle::tree(NodeId s) const {
  if (s < 0 || s >= graph_->node_count()) throw std::invalid_argument("source out of range");
  return std::visit([s](const auto& e) { return e.run(s); }, impl_->engine);
}

std::string ShortestPathOracle::engine() const { return impl_->name; }

ShortestPathResult ShortestPathOracle::query(NodeId s, NodeId t) const {
  if (t < 0 || t >= graph_->node_count()) throw std::invalid_argument("target out of range");
  SourceTree tr = tree(s);
  if (!tr.reached[t]) throw Unreachable(s, t);
  ShortestPathResult r;
  r.path = tr.path_to(t);
  r.length = graph_->path_weight(r.path);
  r.unique = tr.unique[t];
  return r;
}

ShortestPathResult shortest_path(const WeightedGraph& g, NodeId s, NodeId t, OracleOptions opts) {
  return ShortestPathOracle(g, opts).query(s, t);
}

AllPairsResult all_pairs_unique_shortest_paths(const WeightedGraph& g, OracleOptions opts) {
  ShortestPathOracle oracle(g, opts);
  const int n = g.node_count();
  AllPairsResult out;
  out.paths = PathSystem(n, g.directed() ? PathMode::directed : PathMode::undirected);
  std::vector<NodeId> path;
  for (NodeId s = 0; s < n; ++s) {
    SourceTree tr = oracle.tree(s);
    for (NodeId t = g.directed() ? 0 : s + 1; t < n; ++t) {
      if (t == s) continue;
      if (!tr.reached[t]) {
        out.omitted_unreachable = true;
        continue;
      }
      if (!tr.unique[t]) throw TieDetected(s, t);
      path.clear();
      for (NodeId v = t; v != -1; v = tr.parent[v]) path.push_back(v);
      std::reverse(path.begin(), path.end());
      out.paths.add_path(path);
    }
  }
  if (out.omitted_unreachable) {
    std::cerr << "warning: unreachable pairs omitted from the path system\n";
  }
  return out;
}

WeightedGraph perturb_weights(const WeightedGraph& g, std::uint64_t seed, double epsilon) {
  if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
  Rng rng = Rng::derive(seed, 0x7065727475726231ULL);
  const Rational eps = rational_from_double(epsilon);
  // delta = eps * (k + 1) / (2^32 + 2), k uniform in [0, 2^32]: strictly inside (0, eps).
  const mpz_class den = (mpz_class(1) << 32) + 2;
  WeightedGraph out(g.node_count(), g.directed());
  for (const Edge& e : g.edges()) {
    mpz_class k = mpz_class(std::to_string(rng.below((std::uint64_t{1} << 32) + 1) + 1));
    Rational delta = eps * Rational(k, den);
    Rational w = e.w * (1 + delta);
    w.canonicalize();
    out.add_edge(e.u, e.v, w);
  }
  if (g.has_coords()) out.set_coords(g.coords());
  return out;
}

PathSystem unique_paths_from_sources(const WeightedGraph& g, std::span<const NodeId> sources,
                                     OracleOptions opts) {
  ShortestPathOracle oracle(g, opts);
  const int n = g.node_count();
  std::vector<char> is_source(n, 0);
  for (NodeId s : sources) {
    if (s < 0 || s >= n) throw std::invalid_argument("source out of range");
    is_source[s] = 1;
  }
  PathSystem out(n, g.directed() ? PathMode::directed : PathMode::undirected);
  for (NodeId s : sources) {
    SourceTree tr = oracle.tree(s);
    for (NodeId t = 0; t < n; ++t) {
      if (t == s || !tr.reached[t]) continue;
      if (!g.directed() && is_source[t] && t < s) continue;
      if (!tr.unique[t]) throw TieDetected(s, t);
      out.add_path(tr.path_to(t));
    }
  }
  return out;
}

namespace {

std::vector<NodeId> sample_sources(int n, std::size_t count, Rng& rng) {
  std::vector<NodeId> all(n);
  for (int v = 0; v < n; ++v) all[v] = v;
  if (count == 0 || count >= static_cast<std::size_t>(n)) return all;
  for (std::size_t i = 0; i < count; ++i) std::swap(all[i], all[i + rng.below(n - i)]);
  all.resize(count);
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace

RandomUspInstance random_usp_graph(int n, double density, std::uint64_t seed, std::size_t sources) {
  if (n < 2) throw std::invalid_argument("random_usp_graph needs n >= 2");
  if (!(density > 0 && density <= 1)) throw std::invalid_argument("density must lie in (0, 1]");
  constexpr int kAttempts = 64;
  constexpr std::uint64_t kWeightRange = std::uint64_t{1} << 40;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(attempt));
    WeightedGraph g(n, false);
    std::unordered_set<std::uint64_t> used;
    auto fresh_weight = [&] {
      for (;;) {
        std::uint64_t w = rng.below(kWeightRange) + 1;
        if (used.insert(w).second) return w;
      }
    };
    // Decide all pairs first so the weight draws do not shift the topology.
    std::vector<std::pair<NodeId, NodeId>> pairs;
    for (NodeId u = 0; u < n; ++u) {
      for (NodeId v = u + 1; v < n; ++v) {
        if (density >= 1 || rng.unit() < density) pairs.emplace_back(u, v);
      }
    }
    used.reserve(pairs.size());
    std::vector<std::uint64_t> weights;
    weights.reserve(pairs.size());
    for (std::size_t k = 0; k < pairs.size(); ++k) weights.push_back(fresh_weight());
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      g.add_edge(pairs[k].first, pairs[k].second, Rational(mpz_class(std::to_string(weights[k]))));
    }
    // Connectivity by union-find.
    std::vector<int> root(n);
    for (int v = 0; v < n; ++v) root[v] = v;
    std::function<int(int)> find = [&](int v) { return root[v] == v ? v : root[v] = find(root[v]); };
    int components = n;
    for (auto [u, v] : pairs) {
      int a = find(u), b = find(v);
      if (a != b) {
        root[a] = b;
        --components;
      }
    }
    if (components != 1) continue;
    try {
      if (sources == 0) {
        AllPairsResult apsp = all_pairs_unique_shortest_paths(g);
        return {std::move(g), std::move(apsp.paths), attempt + 1};
      }
      auto chosen = sample_sources(n, sources, rng);
      PathSystem ps = unique_paths_from_sources(g, chosen);
      return {std::move(g), std::move(ps), attempt + 1};
    } catch (const TieDetected&) {
      continue;
    }
  }
  throw GenerationFailed("no connected unique-shortest-path graph within the retry budget");
}

RandomUspInstance random_grid_usp(int k, int l, std::uint64_t seed, std::size_t sources) {
  if (k < 1 || l < 1 || k * l < 2) throw std::invalid_argument("grid needs at least two nodes");
  constexpr int kAttempts = 64;
  const Rational base(mpz_class(1) << 30);
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    Rng rng = Rng::derive(seed, 0x6772696400000000ULL + attempt);
    WeightedGraph g(k * l, false);
    std::vector<Point> coords(k * l);
    for (int x = 0; x < k; ++x) {
      for (int y = 0; y < l; ++y) coords[x * l + y] = {Rational(x), Rational(y)};
    }
    g.set_coords(std::move(coords));
    std::unordered_set<std::uint64_t> used;
    auto weight = [&] {
      for (;;) {
        std::uint64_t r = rng.below(std::uint64_t{1} << 20) + 1;
        if (used.insert(r).second) return Rational(base + Rational(static_cast<unsigned long>(r)));
      }
    };
    for (int x = 0; x < k; ++x) {
      for (int y = 0; y < l; ++y) {
        if (x + 1 < k) g.add_edge(x * l + y, (x + 1) * l + y, weight());
        if (y + 1 < l) g.add_edge(x * l + y, x * l + y + 1, weight());
      }
    }
    try {
      auto chosen = sample_sources(k * l, sources, rng);
      PathSystem ps = unique_paths_from_sources(g, chosen);
      return {std::move(g), std::move(ps), attempt + 1};
    } catch (const TieDetected&) {
      continue;
    }
  }
  throw GenerationFailed("no tie-free grid weighting within the retry budget");
}

}  // namespace uspdisc
