#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "uspdisc/constructions.hpp"
#include "uspdisc/errors.hpp"
#include "uspdisc/random.hpp"
#include "uspdisc/shortest_paths.hpp"

namespace uspdisc {

namespace {

constexpr std::uint64_t kPsiDen = std::uint64_t{1} << 32;

Rational psi_value(std::uint64_t num) {
  Rational r(mpz_class(std::to_string(num)), mpz_class(1) << 32);
  r.canonicalize();
  return r;
}

}  // namespace

nlohmann::json params_to_json(const LayeredParams& p) {
  return {{"n", p.n},
          {"l", p.layers},
          {"columns", p.columns},
          {"max_shift", p.max_shift},
          {"q", p.q},
          {"d_max", p.d_max},
          {"seed", p.seed},
          {"start_count", p.start_count},
          {"direction_count", p.direction_count},
          {"path_count", p.path_count},
          {"hop_penalty", to_string(p.hop_penalty)},
          {"resamples", p.resamples},
          {"clipped_steps", p.clipped_steps},
          {"multiplicity_ratio", p.multiplicity_ratio}};
}

Rational LayeredInstance::edge_vector(std::size_t edge_index) const {
  const Edge& e = graph.edge(edge_index);
  return Rational(edge_shift[edge_index]) + psi[layer_of(e.v)];
}

std::vector<Rational> LayeredInstance::edge_vector_set(int gap) const {
  std::vector<Rational> out;
  for (int x = 0; x <= params.max_shift; ++x) out.push_back(Rational(x) + psi[gap + 1]);
  return out;
}

int default_layers(int n) {
  double v = std::sqrt(static_cast<double>(n)) / std::log(static_cast<double>(n));
  return std::max(2, static_cast<int>(std::lround(v)));
}

int default_q(int n, int layers) {
  return std::max(1, static_cast<int>(std::lround(layers / std::log(static_cast<double>(n)))));
}

LayeredInstance assemble_layered(int n, int layers, int columns, int max_shift,
                                 std::vector<std::uint64_t> psi_num) {
  if (layers < 2 || columns < 1 || max_shift < 0) throw std::invalid_argument("bad layered dimensions");
  if (psi_num.size() != static_cast<std::size_t>(layers) + 1) throw std::invalid_argument("psi size");
  LayeredInstance inst;
  inst.params.n = n;
  inst.params.layers = layers;
  inst.params.columns = columns;
  inst.params.max_shift = max_shift;
  inst.psi_num = std::move(psi_num);
  inst.psi.assign(layers + 1, Rational(0));
  for (int i = 1; i <= layers; ++i) {
    if (inst.psi_num[i] == 0 || inst.psi_num[i] >= kPsiDen) throw std::invalid_argument("psi outside (0, 1)");
    inst.psi[i] = psi_value(inst.psi_num[i]);
  }
  // Any monotone path pays (l - 1) penalties, anything else at least l + 1;
  // the penalty exceeds the spread of sum u^2 over monotone paths.
  const Rational u_max = Rational(max_shift + 1);
  inst.params.hop_penalty = Rational(layers - 1) * (1 + u_max * u_max) + 1;

  inst.graph = WeightedGraph(layers * columns, false);
  std::vector<Point> coords(static_cast<std::size_t>(layers) * columns);
  Rational cumulative = 0;
  for (int i = 1; i <= layers; ++i) {
    cumulative += inst.psi[i];
    for (int j = 1; j <= columns; ++j) coords[inst.node(i, j)] = {Rational(i), Rational(j) + cumulative};
  }
  inst.graph.set_coords(std::move(coords));
  for (int i = 1; i < layers; ++i) {
    for (int j = 1; j <= columns; ++j) {
      for (int x = 0; x <= max_shift && j + x <= columns; ++x) {
        Rational u = Rational(x) + inst.psi[i + 1];
        inst.graph.add_edge(inst.node(i, j), inst.node(i + 1, j + x), u * u + inst.params.hop_penalty);
        inst.edge_shift.push_back(x);
      }
    }
  }
  inst.paths = PathSystem(inst.graph.node_count(), PathMode::undirected);
  return inst;
}

LayeredInstance build_layered_instance(int n, std::uint64_t seed, const LayeredOverrides& overrides) {
  if (n < 4) throw ParamRangeEmpty("n too small for a layered instance");
  const int layers = overrides.layers ? *overrides.layers : default_layers(n);
  if (layers < 2) throw std::invalid_argument("need at least two layers");
  const int columns = n / layers;
  const int max_shift = n / (layers * layers);
  const int q = overrides.q ? *overrides.q : default_q(n, layers);
  if (q < 1) throw std::invalid_argument("q must be positive");
  const int d_max = n / (4 * layers * layers) - 1;
  if (d_max < 1 || columns / 2 < 1) {
    throw ParamRangeEmpty("direction range [1, " + std::to_string(d_max) + "] is empty for n=" +
                          std::to_string(n) + ", l=" + std::to_string(layers));
  }
  std::set<Rational> dset;
  for (int x = 1; x <= d_max; ++x) {
    for (int y = 0; y <= q; ++y) dset.insert(Rational(x) + Rational(y, q));
  }
  std::vector<Rational> directions(dset.begin(), dset.end());

  Rng rng = Rng::derive(seed, 0x6c61796572656431ULL);
  std::vector<std::uint64_t> psi_num(layers + 1, 0);
  for (int i = 1; i <= layers; ++i) psi_num[i] = rng.below(kPsiDen - 1) + 1;

  // best[i][d]: the x minimizing |psi_{i+1} + x - d| over C_i, which must be unique.
  std::vector<std::vector<int>> best(layers, std::vector<int>(directions.size(), 0));
  int resamples = 0;
  for (int i = 1; i < layers; ++i) {
    for (;;) {
      Rational psi = psi_value(psi_num[i + 1]);
      bool tie = false;
      for (std::size_t d = 0; d < directions.size() && !tie; ++d) {
        Rational lowest = -1;
        int arg = -1, count = 0;
        for (int x = 0; x <= max_shift; ++x) {
          Rational gap = abs(Rational(x) + psi - directions[d]);
          if (arg < 0 || gap < lowest) {
            lowest = gap;
            arg = x;
            count = 1;
          } else if (gap == lowest) {
            ++count;
          }
        }
        tie = count > 1;
        best[i][d] = arg;
      }
      if (!tie) break;
      if (++resamples > 64) throw GenerationFailed("argmin ties persist after resampling psi");
      psi_num[i + 1] = rng.below(kPsiDen - 1) + 1;
    }
  }

  LayeredInstance inst = assemble_layered(n, layers, columns, max_shift, std::move(psi_num));
  inst.params.seed = seed;
  inst.params.q = q;
  inst.params.d_max = d_max;
  inst.params.resamples = resamples;
  inst.directions = directions;
  for (int j = 1; j <= columns / 2; ++j) inst.start_set.push_back(inst.node(1, j));
  inst.params.start_count = inst.start_set.size();
  inst.params.direction_count = directions.size();

  std::set<std::vector<NodeId>> seen;
  std::vector<NodeId> path;
  for (NodeId s : inst.start_set) {
    for (std::size_t d = 0; d < directions.size(); ++d) {
      path.assign(1, s);
      int j = inst.column_of(s);
      for (int i = 1; i < layers; ++i) {
        // argmin over the edges that exist at this node; |x + psi - d| is
        // unimodal in x, so clipping to the last column keeps it unique.
        int x = best[i][d];
        if (j + x > columns) {
          x = columns - j;
          ++inst.params.clipped_steps;
        }
        j += x;
        path.push_back(inst.node(i + 1, j));
      }
      if (seen.insert(path).second) {
        inst.paths.add_path(path);
        inst.path_direction.push_back(d);
      }
    }
  }
  inst.params.path_count = inst.paths.size();

  std::vector<std::size_t> through(inst.graph.node_count(), 0);
  for (std::size_t p = 0; p < inst.paths.size(); ++p) {
    for (NodeId v : inst.paths[p]) ++through[v];
  }
  std::size_t most = *std::max_element(through.begin(), through.end());
  inst.params.multiplicity_ratio = inst.paths.empty()
                                       ? 0.0
                                       : static_cast<double>(most) * n /
                                             (static_cast<double>(layers) * inst.paths.size());
  verify_layered_instance(inst);
  return inst;
}

std::optional<std::size_t> first_non_usp_path(const WeightedGraph& g, const PathSystem& ps) {
  ShortestPathOracle oracle(g);
  std::map<NodeId, std::vector<std::size_t>> by_source;
  for (std::size_t p = 0; p < ps.size(); ++p) by_source[ps[p].front()].push_back(p);
  std::optional<std::size_t> first;
  for (auto& [s, indices] : by_source) {
    if (first && indices.front() > *first) continue;
    SourceTree tr = oracle.tree(s);
    for (std::size_t p : indices) {
      auto path = ps[p];
      NodeId t = path.back();
      bool ok = tr.reached[t] && tr.unique[t] && tr.path_nodes(t) == static_cast<int>(path.size());
      if (ok) {
        NodeId v = t;
        for (std::size_t k = path.size(); k-- > 0; v = tr.parent[v]) {
          if (v != path[k]) {
            ok = false;
            break;
          }
        }
      }
      if (!ok) {
        if (!first || p < *first) first = p;
        break;
      }
    }
  }
  return first;
}

void verify_layered_instance(const LayeredInstance& inst) {
  const auto& prm = inst.params;
  for (std::size_t p = 0; p < inst.paths.size(); ++p) {
    auto path = inst.paths[p];
    if (path.size() != static_cast<std::size_t>(prm.layers)) {
      throw VerificationFailed(p, "does not visit every layer once");
    }
    for (std::size_t k = 0; k < path.size(); ++k) {
      if (inst.layer_of(path[k]) != static_cast<int>(k) + 1) throw VerificationFailed(p, "leaves layer order");
      if (k > 0 && !inst.graph.has_edge(path[k - 1], path[k])) throw VerificationFailed(p, "uses a missing edge");
    }
  }
  const auto& coords = inst.graph.coords();
  for (std::size_t e = 0; e < inst.graph.edge_count(); ++e) {
    const Edge& edge = inst.graph.edge(e);
    Rational dy = coords[edge.v].y - coords[edge.u].y;
    if (coords[edge.v].x - coords[edge.u].x != 1 || edge.w - prm.hop_penalty != dy * dy) {
      throw VerificationFailed(e, "edge weight differs from the squared vector height");
    }
  }
  // Unique argmin over the full edge vector set, per gap and direction.
  for (int i = 1; i < prm.layers; ++i) {
    auto c = inst.edge_vector_set(i);
    for (const Rational& d : inst.directions) {
      std::vector<Rational> gaps;
      for (const Rational& v : c) gaps.push_back(abs(v - d));
      auto lowest = *std::min_element(gaps.begin(), gaps.end());
      if (std::count(gaps.begin(), gaps.end(), lowest) != 1) {
        throw VerificationFailed(0, "argmin over C_" + std::to_string(i) + " is not unique");
      }
    }
  }
  if (auto bad = first_non_usp_path(inst.graph, inst.paths)) {
    throw VerificationFailed(*bad, "is not the unique shortest path between its endpoints");
  }
}

HopMultiplicity hop_path_multiplicity(const LayeredInstance& inst, NodeId u, NodeId v) {
  HopMultiplicity out;
  out.hops = std::abs(inst.layer_of(u) - inst.layer_of(v));
  for (std::size_t p = 0; p < inst.paths.size(); ++p) {
    auto path = inst.paths[p];
    bool has_u = std::find(path.begin(), path.end(), u) != path.end();
    bool has_v = std::find(path.begin(), path.end(), v) != path.end();
    if (has_u && has_v) ++out.paths;
  }
  return out;
}

nlohmann::json layered_to_json(const LayeredInstance& inst) {
  std::vector<std::string> psi, directions;
  for (std::size_t i = 1; i < inst.psi.size(); ++i) psi.push_back(to_string(inst.psi[i]));
  for (const auto& d : inst.directions) directions.push_back(to_string(d));
  return {{"graph", graph_to_json(inst.graph)},
          {"paths", paths_to_json(inst.paths)},
          {"params", params_to_json(inst.params)},
          {"psi", psi},
          {"directions", directions},
          {"start_set", inst.start_set},
          {"path_direction", inst.path_direction}};
}

}  // namespace uspdisc
