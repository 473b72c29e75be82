#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "uspdisc/coloring.hpp"
#include "uspdisc/constructions.hpp"
#include "uspdisc/discrepancy.hpp"
#include "uspdisc/errors.hpp"
#include "uspdisc/harness.hpp"
#include "uspdisc/shortest_paths.hpp"

using namespace uspdisc;
using nlohmann::json;

namespace {

// Exit codes: 0 ok, 1 a verification failed, 2 bad input or other error.
constexpr int kVerifyFailed = 1;
constexpr int kError = 2;

struct Common {
  std::uint64_t seed = 0;
  std::string format = "json";
  std::string out = "-";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "random seed")->capture_default_str();
  cmd->add_option("--format", c.format, "output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  cmd->add_option("--out", c.out, "output file, - for stdout")->capture_default_str();
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  f << text;
}

json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
}

void require_json(const Common& c, const char* what) {
  if (c.format != "json") throw ConfigInvalid(std::string(what) + " only writes json");
}

json bundle(const WeightedGraph& g, const PathSystem& ps, json params = json::object()) {
  return {{"graph", graph_to_json(g)}, {"paths", paths_to_json(ps)}, {"params", std::move(params)}};
}

struct Loaded {
  WeightedGraph graph;
  PathSystem paths;
};

Loaded load_bundle(const std::string& path) {
  json j = read_json(path);
  if (!j.contains("graph") || !j.contains("paths")) throw IoError(path + ": expected {graph, paths}");
  return {graph_from_json(j["graph"]), paths_from_json(j["paths"])};
}

Target parse_target(const std::string& s) { return s == "edges" ? Target::edges : Target::vertices; }

IncidenceMatrix matrix_for(const PathSystem& ps, Target t) {
  return t == Target::edges ? edge_incidence_matrix(ps) : vertex_incidence_matrix(ps);
}

std::string one_row(const json& obj, const std::string& format) {
  if (format == "json") return obj.dump(2) + "\n";
  std::ostringstream head, row;
  bool first = true;
  for (const auto& [k, v] : obj.items()) {
    head << (first ? "" : ",") << k;
    row << (first ? "" : ",") << (v.is_string() ? v.get<std::string>() : v.dump());
    first = false;
  }
  return head.str() + "\n" + row.str() + "\n";
}

std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(std::stoull(part));
    } else {
      std::uint64_t a = std::stoull(part.substr(0, dots)), b = std::stoull(part.substr(dots + 2));
      for (std::uint64_t v = a; v <= b; ++v) out.push_back(v);
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unique-shortest-path systems, low-discrepancy colorings and lower-bound families"};
  app.require_subcommand(1);

  Common gen_c;
  std::string gen_family = "layered";
  int gen_n = 64, gen_k = 0, gen_l = 0;
  double gen_density = 0;
  std::size_t gen_sources = 0;
  auto* gen = app.add_subcommand("gen", "generate an instance bundle");
  add_common(gen, gen_c);
  gen->add_option("--family", gen_family)
      ->check(CLI::IsMember({"layered", "random_usp", "grid_usp", "hadamard_grid"}))
      ->capture_default_str();
  gen->add_option("--n", gen_n, "node count (columns for hadamard_grid)")->capture_default_str();
  gen->add_option("--rows", gen_k, "grid_usp rows");
  gen->add_option("--cols", gen_l, "grid_usp columns");
  gen->add_option("--density", gen_density, "random_usp edge probability (0 = 3 ln n / n)");
  gen->add_option("--sources", gen_sources, "keep only paths from this many sources (0 = all pairs)");

  Common ver_c;
  std::string ver_in;
  bool ver_usp = true;
  auto* ver = app.add_subcommand("verify", "check consistency and unique shortest paths");
  add_common(ver, ver_c);
  ver->add_option("--in", ver_in, "bundle")->required();
  ver->add_flag("!--no-usp", ver_usp, "skip the shortest-path check");

  Common col_c;
  std::string col_in, col_target = "vertices", col_method = "structured";
  auto* col = app.add_subcommand("color", "color a bundle and report its discrepancy");
  add_common(col, col_c);
  col->add_option("--in", col_in, "bundle")->required();
  col->add_option("--target", col_target)->check(CLI::IsMember({"vertices", "edges"}))->capture_default_str();
  col->add_option("--method", col_method)
      ->check(CLI::IsMember({"structured", "random", "bipartite"}))
      ->capture_default_str();

  Common disc_c;
  std::string disc_in, disc_target = "vertices";
  bool disc_hereditary = false;
  std::size_t disc_guard = 0;
  auto* disc = app.add_subcommand("disc", "exact (hereditary) discrepancy of a bundle's incidence matrix");
  add_common(disc, disc_c);
  disc->add_option("--in", disc_in, "bundle")->required();
  disc->add_option("--target", disc_target)->check(CLI::IsMember({"vertices", "edges"}))->capture_default_str();
  disc->add_flag("--hereditary", disc_hereditary);
  disc->add_option("--max-cols", disc_guard, "raise the exhaustive-search column guard");

  Common bnd_c;
  std::string bnd_in, bnd_target = "vertices";
  double bnd_c_const = 0.25;
  auto* bnd = app.add_subcommand("bounds", "trace-based lower bounds");
  add_common(bnd, bnd_c);
  bnd->add_option("--in", bnd_in, "bundle")->required();
  bnd->add_option("--target", bnd_target)->check(CLI::IsMember({"vertices", "edges"}))->capture_default_str();
  bnd->add_option("--c", bnd_c_const, "Chazelle-Lvov constant in (0, 1)")->capture_default_str();

  Common pl_c;
  int pl_n = 64;
  std::string pl_weights = "squared_length";
  auto* pl = app.add_subcommand("planarize", "planarize a generated layered instance");
  add_common(pl, pl_c);
  pl->add_option("--n", pl_n)->capture_default_str();
  pl->add_option("--piece-weight", pl_weights)
      ->check(CLI::IsMember({"squared_length", "slab_scaled"}))
      ->capture_default_str();

  Common lift_c;
  std::string lift_in;
  auto* lift = app.add_subcommand("lift", "bipartite 2-lift of a consistent bundle");
  add_common(lift, lift_c);
  lift->add_option("--in", lift_in, "bundle")->required();

  Common ex_c;
  ex_c.format = "csv";
  std::string ex_config, ex_family = "layered", ex_ns = "64", ex_seeds, ex_coloring = "both",
                         ex_target = "vertices", ex_weights = "squared_length";
  bool ex_timing = false;
  auto* ex = app.add_subcommand("experiment", "run a sweep and write a report");
  add_common(ex, ex_c);
  ex->add_option("--config", ex_config, "JSON config; flags below are ignored when given");
  ex->add_option("--family", ex_family)->capture_default_str();
  ex->add_option("--n", ex_ns, "comma-separated n values")->capture_default_str();
  ex->add_option("--seeds", ex_seeds, "list like 0..9,20 (default: --seed)");
  ex->add_option("--coloring", ex_coloring)->check(CLI::IsMember({"structured", "random", "both"}));
  ex->add_option("--target", ex_target)->check(CLI::IsMember({"vertices", "edges"}));
  ex->add_option("--piece-weight", ex_weights)->check(CLI::IsMember({"squared_length", "slab_scaled"}));
  ex->add_flag("--timing", ex_timing, "fill wall_ms (reports are then not byte-stable)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      require_json(gen_c, "gen");
      json out;
      if (gen_family == "layered") {
        out = layered_to_json(build_layered_instance(gen_n, gen_c.seed));
      } else if (gen_family == "random_usp") {
        double d = gen_density > 0 ? gen_density : std::min(1.0, 3.0 * std::log(gen_n) / gen_n);
        auto inst = random_usp_graph(gen_n, d, gen_c.seed, gen_sources);
        out = bundle(inst.graph, inst.paths, {{"density", d}, {"attempts", inst.attempts}});
      } else if (gen_family == "grid_usp") {
        int k = gen_k > 0 ? gen_k : 10, l = gen_l > 0 ? gen_l : 10;
        auto inst = random_grid_usp(k, l, gen_c.seed, gen_sources);
        out = bundle(inst.graph, inst.paths, {{"rows", k}, {"cols", l}});
      } else {
        auto h = hadamard_grid_family(gen_n);
        out = bundle(h.grid, h.paths, {{"matrix", h.matrix}});
      }
      write_text(gen_c.out, out.dump() + "\n");
      return 0;
    }
    if (ver->parsed()) {
      Loaded b = load_bundle(ver_in);
      json result = {{"paths", b.paths.size()}};
      bool ok = true;
      if (auto w = check_consistency(b.paths)) {
        ok = false;
        result["consistent"] = false;
        result["witness"] = {{"u", w->u}, {"v", w->v}, {"i", w->i}, {"j", w->j}};
      } else {
        result["consistent"] = true;
      }
      if (ver_usp) {
        auto bad = first_non_usp_path(b.graph, b.paths);
        result["unique_shortest"] = !bad.has_value();
        if (bad) {
          ok = false;
          result["first_failing_path"] = *bad;
        }
      }
      result["ok"] = ok;
      write_text(ver_c.out, one_row(result, ver_c.format));
      return ok ? 0 : kVerifyFailed;
    }
    if (col->parsed()) {
      Loaded b = load_bundle(col_in);
      Target t = parse_target(col_target);
      std::optional<EdgeList> universe;
      if (t == Target::edges) universe = edge_universe(b.paths);
      Coloring x;
      if (col_method == "random") {
        x = random_coloring(t == Target::edges ? universe->size() : b.paths.ground_size(), t, col_c.seed);
      } else if (col_method == "bipartite") {
        if (t == Target::edges) throw ConfigInvalid("bipartite coloring colors vertices");
        x = bipartite_side_coloring(b.graph);
      } else {
        PathCover cover = build_path_cover(b.paths, t == Target::edges ? CoverMode::edge : CoverMode::vertex);
        x = t == Target::edges ? alternating_edge_coloring(b.paths, cover, col_c.seed, universe)
                               : alternating_vertex_coloring(b.paths, cover, col_c.seed);
      }
      int d = system_discrepancy(b.paths, x, universe);
      if (col_c.format == "json") {
        json out = {{"discrepancy", d}, {"coloring", coloring_to_json(x)}};
        write_text(col_c.out, out.dump() + "\n");
      } else {
        std::ostringstream s;
        s << "column,sign\n";
        for (std::size_t i = 0; i < x.values.size(); ++i) s << i << ',' << int(x.values[i]) << '\n';
        write_text(col_c.out, s.str());
      }
      return 0;
    }
    if (disc->parsed()) {
      Loaded b = load_bundle(disc_in);
      IncidenceMatrix m = matrix_for(b.paths, parse_target(disc_target));
      json out = {{"rows", m.rows()}, {"cols", m.cols()}};
      if (disc_hereditary) {
        auto h = exact_hereditary_discrepancy(m, disc_guard ? disc_guard : kHerdiscColumnGuard);
        out["herdisc"] = h.value;
        out["witness_cols"] = h.witness_cols;
      } else {
        auto r = exact_discrepancy(m, disc_guard ? disc_guard : kDiscColumnGuard);
        out["disc"] = r.value;
      }
      write_text(disc_c.out, one_row(out, disc_c.format));
      return 0;
    }
    if (bnd->parsed()) {
      Loaded b = load_bundle(bnd_in);
      IncidenceMatrix m = matrix_for(b.paths, parse_target(bnd_target));
      TraceStats t = trace_stats(m);
      json out = {{"rows", m.rows()},
                  {"cols", m.cols()},
                  {"tr_M", t.tr_M},
                  {"tr_M2", t.tr_M2},
                  {"larsen", larsen_bound(t)},
                  {"chazelle_lvov", chazelle_lvov_bound(t, bnd_c_const)},
                  {"rectangles", count_rectangles(m)}};
      write_text(bnd_c.out, one_row(out, bnd_c.format));
      return 0;
    }
    if (pl->parsed()) {
      require_json(pl_c, "planarize");
      LayeredInstance inst = build_layered_instance(pl_n, pl_c.seed);
      PieceWeight w = pl_weights == "slab_scaled" ? PieceWeight::slab_scaled : PieceWeight::squared_length;
      PlanarizedInstance out = planarize(inst, false, w);
      std::size_t crossings = count_crossings_sweep(out.graph);
      auto bad = first_non_usp_path(out.graph, out.paths);
      json params = {{"original_nodes", out.original_nodes},
                     {"crossing_nodes", out.crossing_nodes},
                     {"subdivision_nodes", out.subdivision_nodes},
                     {"vertical_lines", out.vertical_lines},
                     {"piece_penalty", to_string(out.piece_penalty)},
                     {"piece_weight", pl_weights},
                     {"crossings", crossings},
                     {"unique_shortest", !bad.has_value()}};
      if (bad) params["first_failing_path"] = *bad;
      write_text(pl_c.out, bundle(out.graph, out.paths, params).dump() + "\n");
      return crossings == 0 && !bad ? 0 : kVerifyFailed;
    }
    if (lift->parsed()) {
      require_json(lift_c, "lift");
      Loaded b = load_bundle(lift_in);
      LiftedSystem out = bipartite_2lift(b.graph, b.paths);
      json params = {{"copy_of", out.copy_of}, {"threaded_paths", out.threaded_paths}};
      write_text(lift_c.out, bundle(out.graph, out.paths, params).dump() + "\n");
      return 0;
    }
    if (ex->parsed()) {
      ExperimentConfig cfg;
      if (!ex_config.empty()) {
        cfg = config_from_json(read_json(ex_config));
      } else {
        json j = {{"family", ex_family},
                  {"seeds", ex_seeds.empty() ? std::vector<std::uint64_t>{ex_c.seed} : parse_seeds(ex_seeds)},
                  {"coloring", ex_coloring},
                  {"target", ex_target},
                  {"piece_weight", ex_weights},
                  {"timing", ex_timing},
                  {"format", ex_c.format}};
        std::vector<int> ns;
        for (auto s : parse_seeds(ex_ns)) ns.push_back(static_cast<int>(s));
        j["n_values"] = ns;
        cfg = config_from_json(j);
      }
      cfg.workers = workers_from_env();
      auto rows = run_experiment(cfg);
      std::string path = ex_c.out != "-" ? ex_c.out : (cfg.output_path.empty() ? "-" : cfg.output_path);
      emit_report(rows, ex_config.empty() ? ex_c.format : cfg.format, path);
      bool ok = std::all_of(rows.begin(), rows.end(), [](const ResultRow& r) { return r.verify_ok; });
      return ok ? 0 : kVerifyFailed;
    }
  } catch (const VerificationFailed& e) {
    std::cerr << "verification failed: " << e.what() << "\n";
    return kVerifyFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
