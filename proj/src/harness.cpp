#include "uspdisc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "uspdisc/discrepancy.hpp"
#include "uspdisc/errors.hpp"
#include "uspdisc/random.hpp"
#include "uspdisc/shortest_paths.hpp"

namespace uspdisc {

namespace {

constexpr std::uint64_t kRandomStream = 0x72616e646f6d3031ULL;

struct Built {
  PathSystem paths;
  int layers = 0;
  bool ok = false;
  std::string error;
  // Kept alive for the coloring step.
  std::optional<LayeredInstance> layered;
  std::optional<PlanarizedInstance> planar;
  std::optional<RandomUspInstance> random;
  std::optional<LiftedSystem> lift;
  std::optional<HadamardGrid> hadamard;
};

int longest_path(const PathSystem& ps) {
  std::size_t best = 0;
  for (std::size_t p = 0; p < ps.size(); ++p) best = std::max(best, ps[p].size());
  return static_cast<int>(best);
}

double default_density(int n) { return std::min(1.0, 3.0 * std::log(static_cast<double>(n)) / n); }

Built build_family(const ExperimentConfig& cfg, int n, std::uint64_t seed) {
  Built b;
  const double density = cfg.density > 0 ? cfg.density : default_density(n);
  const std::size_t sources = cfg.sources > 0 ? cfg.sources : 16;
  switch (cfg.family) {
    case Family::layered: {
      b.layered = build_layered_instance(n, seed);  // verifies or throws
      b.paths = b.layered->paths;
      b.layers = b.layered->params.layers;
      b.ok = true;
      break;
    }
    case Family::planarized: {
      b.layered = build_layered_instance(n, seed);
      b.planar = planarize(*b.layered, false, cfg.piece_weight);
      b.paths = b.planar->paths;
      b.layers = b.layered->params.layers;
      if (count_crossings_sweep(b.planar->graph) != 0) {
        b.error = "planarized drawing has crossings";
      } else if (auto bad = first_non_usp_path(b.planar->graph, b.planar->paths)) {
        b.error = "path " + std::to_string(*bad) + " is not unique shortest";
      } else {
        b.ok = true;
      }
      break;
    }
    case Family::random_usp: {
      b.random = random_usp_graph(n, density, seed, sources);
      b.paths = b.random->paths;
      b.layers = longest_path(b.paths);
      b.ok = !check_consistency(b.paths).has_value();
      if (!b.ok) b.error = "generated system is inconsistent";
      break;
    }
    case Family::bipartite_lift: {
      b.random = random_usp_graph(n, density, seed, sources);
      b.lift = bipartite_2lift(b.random->graph, b.random->paths);
      b.paths = b.lift->paths;
      b.layers = longest_path(b.paths);
      try {
        bipartite_side_coloring(b.lift->graph);
        b.ok = !check_consistency(b.paths).has_value();
        if (!b.ok) b.error = "lifted system is inconsistent";
      } catch (const NotBipartite&) {
        b.error = "lift is not bipartite";
      }
      break;
    }
    case Family::hadamard_grid: {
      b.hadamard = hadamard_grid_family(n);
      b.paths = b.hadamard->paths;
      b.layers = longest_path(b.paths);
      // The family is meant to be inconsistent.
      b.ok = b.hadamard->grid.edge_count() == static_cast<std::size_t>(3 * n - 2) &&
             b.paths.size() == static_cast<std::size_t>(2 * n + 2) &&
             (n < 4 || check_consistency(b.paths).has_value());
      if (!b.ok) b.error = "grid family has the wrong shape";
      break;
    }
  }
  return b;
}

ResultRow run_cell(const ExperimentConfig& cfg, int n, std::uint64_t seed) {
  auto start = std::chrono::steady_clock::now();
  ResultRow row;
  row.family = to_string(cfg.family);
  row.n = n;
  row.seed = seed;
  try {
    Built b = build_family(cfg, n, seed);
    row.layers = b.layers;
    row.paths = b.paths.size();
    row.verify_ok = b.ok;
    row.error = b.error;
    if (b.ok) {
      const PathSystem& ps = b.paths;
      const bool edges = cfg.target == Target::edges;
      std::optional<EdgeList> universe;
      if (edges) universe = edge_universe(ps);
      IncidenceMatrix m = edges ? edge_incidence_matrix(ps, universe) : vertex_incidence_matrix(ps);

      if (cfg.coloring != ColoringChoice::random) {
        if (cfg.family == Family::hadamard_grid) {
          if (m.cols() <= cfg.exact_column_guard) {
            row.structured_disc = exact_discrepancy(m, cfg.exact_column_guard).value;
          } else {
            row.error = "exact solver guard: " + std::to_string(m.cols()) + " columns";
          }
        } else if (cfg.family == Family::bipartite_lift && !edges) {
          row.structured_disc = system_discrepancy(ps, bipartite_side_coloring(b.lift->graph));
        } else {
          PathCover cover = build_path_cover(ps, edges ? CoverMode::edge : CoverMode::vertex, false);
          Coloring x = edges ? alternating_edge_coloring(ps, cover, seed, universe)
                             : alternating_vertex_coloring(ps, cover, seed);
          row.structured_disc = system_discrepancy(ps, x, universe);
        }
      }
      if (cfg.coloring != ColoringChoice::structured) {
        Coloring x = random_coloring(m.cols(), cfg.target, Rng::derive(seed, kRandomStream).next());
        row.random_disc = system_discrepancy(ps, x, universe);
      }
      if (cfg.bounds.larsen || cfg.bounds.chazelle_lvov) {
        TraceStats t = trace_stats(m);
        row.tr_m = t.tr_M;
        row.tr_m2 = t.tr_M2;
        if (t.tr_M > 0) {
          if (cfg.bounds.larsen) row.larsen = larsen_bound(t);
          if (cfg.bounds.chazelle_lvov) row.chazelle_lvov = chazelle_lvov_bound(t);
        }
      }
      if (cfg.bounds.rectangles) row.rectangles = count_rectangles(m);
    }
  } catch (const std::exception& e) {
    row.verify_ok = false;
    row.error = e.what();
  }
  if (cfg.timing) {
    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return row;
}

std::string fmt_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

template <class T>
std::string opt_field(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_floating_point_v<T>) {
    return fmt_real(*v);
  } else {
    return std::to_string(*v);
  }
}

template <class T>
nlohmann::json opt_json(const std::optional<T>& v) {
  if (!v) return nullptr;
  if constexpr (std::is_floating_point_v<T>) {
    return std::strtod(fmt_real(*v).c_str(), nullptr);
  } else {
    return *v;
  }
}

const char* kColumns[] = {"family", "n", "seed", "l", "paths", "structured_disc", "random_disc", "larsen",
                          "chazelle_lvov", "tr_M", "tr_M2", "rectangles", "verify_ok", "wall_ms", "error"};

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::layered: return "layered";
    case Family::planarized: return "planarized";
    case Family::random_usp: return "random_usp";
    case Family::bipartite_lift: return "bipartite_lift";
    case Family::hadamard_grid: return "hadamard_grid";
  }
  return "";
}

Family family_from_string(const std::string& s) {
  for (Family f : {Family::layered, Family::planarized, Family::random_usp, Family::bipartite_lift,
                   Family::hadamard_grid}) {
    if (to_string(f) == s) return f;
  }
  throw ConfigInvalid("unknown family '" + s + "'");
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.n_values.empty()) throw ConfigInvalid("n_values is empty");
  if (cfg.seeds.empty()) throw ConfigInvalid("seeds is empty");
  if (cfg.format != "csv" && cfg.format != "json") throw ConfigInvalid("format must be csv or json");
  if (cfg.workers < 1) throw ConfigInvalid("workers must be positive");
  if (cfg.density < 0 || cfg.density > 1) throw ConfigInvalid("density must lie in [0, 1]");
  for (int n : cfg.n_values) {
    if (n < 2) throw ConfigInvalid("n must be at least 2");
    if (cfg.family == Family::hadamard_grid && n != 2 && n != 4 && n != 8 && n != 16) {
      throw ConfigInvalid("hadamard_grid needs n in {2, 4, 8, 16}");
    }
  }
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigInvalid("config must be a JSON object");
  ExperimentConfig cfg;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "family") {
        cfg.family = family_from_string(v.get<std::string>());
      } else if (key == "n_values") {
        cfg.n_values = v.get<std::vector<int>>();
      } else if (key == "seeds") {
        cfg.seeds = v.get<std::vector<std::uint64_t>>();
      } else if (key == "coloring") {
        auto s = v.get<std::string>();
        if (s == "structured") cfg.coloring = ColoringChoice::structured;
        else if (s == "random") cfg.coloring = ColoringChoice::random;
        else if (s == "both") cfg.coloring = ColoringChoice::both;
        else throw ConfigInvalid("unknown coloring '" + s + "'");
      } else if (key == "target") {
        auto s = v.get<std::string>();
        if (s == "vertices") cfg.target = Target::vertices;
        else if (s == "edges") cfg.target = Target::edges;
        else throw ConfigInvalid("unknown target '" + s + "'");
      } else if (key == "bounds") {
        cfg.bounds = {false, false, false};
        for (const auto& b : v.get<std::vector<std::string>>()) {
          if (b == "larsen") cfg.bounds.larsen = true;
          else if (b == "chazelle_lvov") cfg.bounds.chazelle_lvov = true;
          else if (b == "rectangles") cfg.bounds.rectangles = true;
          else throw ConfigInvalid("unknown bound '" + b + "'");
        }
      } else if (key == "output_path") {
        cfg.output_path = v.get<std::string>();
      } else if (key == "format") {
        cfg.format = v.get<std::string>();
      } else if (key == "density") {
        cfg.density = v.get<double>();
      } else if (key == "sources") {
        cfg.sources = v.get<std::size_t>();
      } else if (key == "piece_weight") {
        auto s = v.get<std::string>();
        if (s == "squared_length") cfg.piece_weight = PieceWeight::squared_length;
        else if (s == "slab_scaled") cfg.piece_weight = PieceWeight::slab_scaled;
        else throw ConfigInvalid("unknown piece_weight '" + s + "'");
      } else if (key == "exact_column_guard") {
        cfg.exact_column_guard = v.get<std::size_t>();
      } else if (key == "timing") {
        cfg.timing = v.get<bool>();
      } else if (key == "workers") {
        cfg.workers = v.get<int>();
      } else {
        throw ConfigInvalid("unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigInvalid(std::string("bad config value: ") + e.what());
  }
  validate_config(cfg);
  return cfg;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  std::vector<std::string> bounds;
  if (cfg.bounds.larsen) bounds.push_back("larsen");
  if (cfg.bounds.chazelle_lvov) bounds.push_back("chazelle_lvov");
  if (cfg.bounds.rectangles) bounds.push_back("rectangles");
  const char* coloring[] = {"structured", "random", "both"};
  return {{"family", to_string(cfg.family)},
          {"n_values", cfg.n_values},
          {"seeds", cfg.seeds},
          {"coloring", coloring[static_cast<int>(cfg.coloring)]},
          {"target", cfg.target == Target::vertices ? "vertices" : "edges"},
          {"bounds", bounds},
          {"output_path", cfg.output_path},
          {"format", cfg.format},
          {"density", cfg.density},
          {"sources", cfg.sources},
          {"piece_weight", cfg.piece_weight == PieceWeight::squared_length ? "squared_length" : "slab_scaled"},
          {"exact_column_guard", cfg.exact_column_guard},
          {"timing", cfg.timing},
          {"workers", cfg.workers}};
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  std::vector<std::pair<int, std::uint64_t>> cells;
  for (int n : cfg.n_values) {
    for (std::uint64_t s : cfg.seeds) cells.emplace_back(n, s);
  }
  std::vector<ResultRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next++) < cells.size();) rows[i] = run_cell(cfg, cells[i].first, cells[i].second);
  };
  const int workers = std::min<int>(cfg.workers, static_cast<int>(cells.size()));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.family, a.n, a.seed) < std::tie(b.family, b.n, b.seed);
  });
  return rows;
}

std::string format_report(std::vector<ResultRow> rows, const std::string& format) {
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.family, a.n, a.seed) < std::tie(b.family, b.n, b.seed);
  });
  if (format == "json") {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const ResultRow& r : rows) {
      nlohmann::ordered_json o = nlohmann::ordered_json::object();
      o["family"] = r.family;
      o["n"] = r.n;
      o["seed"] = r.seed;
      o["l"] = r.layers;
      o["paths"] = r.paths;
      o["structured_disc"] = opt_json(r.structured_disc);
      o["random_disc"] = opt_json(r.random_disc);
      o["larsen"] = opt_json(r.larsen);
      o["chazelle_lvov"] = opt_json(r.chazelle_lvov);
      o["tr_M"] = opt_json(r.tr_m);
      o["tr_M2"] = opt_json(r.tr_m2);
      o["rectangles"] = opt_json(r.rectangles);
      o["verify_ok"] = r.verify_ok;
      o["wall_ms"] = opt_json(r.wall_ms);
      o["error"] = r.error;
      arr.push_back(std::move(o));
    }
    return arr.dump(2) + "\n";
  }
  if (format != "csv") throw ConfigInvalid("format must be csv or json");
  std::ostringstream out;
  for (std::size_t c = 0; c < std::size(kColumns); ++c) out << (c ? "," : "") << kColumns[c];
  out << '\n';
  for (const ResultRow& r : rows) {
    out << csv_field(r.family) << ',' << r.n << ',' << r.seed << ',' << r.layers << ',' << r.paths << ','
        << opt_field(r.structured_disc) << ',' << opt_field(r.random_disc) << ',' << opt_field(r.larsen) << ','
        << opt_field(r.chazelle_lvov) << ',' << opt_field(r.tr_m) << ',' << opt_field(r.tr_m2) << ','
        << opt_field(r.rectangles) << ',' << (r.verify_ok ? "true" : "false") << ',' << opt_field(r.wall_ms)
        << ',' << csv_field(r.error) << '\n';
  }
  return out.str();
}

void emit_report(const std::vector<ResultRow>& rows, const std::string& format, const std::string& path) {
  if (rows.empty()) throw std::invalid_argument("no rows to report");
  std::string text = format_report(rows, format);
  if (path.empty() || path == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  f << text;
  if (!f) throw IoError("write failed for " + path);
}

CalibrationCheck check_calibration(const std::string& path, const std::string& key, double measured,
                                   double rel_tol) {
  nlohmann::json j = nlohmann::json::object();
  {
    std::ifstream in(path);
    if (in) {
      try {
        in >> j;
      } catch (const nlohmann::json::exception&) {
        throw IoError("calibration file " + path + " is not valid JSON");
      }
      if (!j.is_object()) throw IoError("calibration file " + path + " is not an object");
    }
  }
  CalibrationCheck out;
  out.measured = measured;
  if (j.contains(key)) {
    out.stored = j[key].get<double>();
    out.ok = std::abs(measured - out.stored) <= rel_tol * std::abs(out.stored);
    return out;
  }
  out.recorded = true;
  out.stored = measured;
  j[key] = measured;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  f << j.dump(2) << '\n';
  return out;
}

int workers_from_env() {
  const char* v = std::getenv("USPDISC_WORKERS");
  if (!v || !*v) return 1;
  char* end = nullptr;
  long w = std::strtol(v, &end, 10);
  if (*end != '\0' || w < 1 || w > 1024) throw ConfigInvalid("USPDISC_WORKERS must be a positive integer");
  return static_cast<int>(w);
}

}  // namespace uspdisc
