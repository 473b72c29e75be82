#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "uspdisc/coloring.hpp"
#include "uspdisc/constructions.hpp"

namespace uspdisc {

enum class Family { layered, planarized, random_usp, bipartite_lift, hadamard_grid };
enum class ColoringChoice { structured, random, both };

std::string to_string(Family f);
Family family_from_string(const std::string& s);  // ConfigInvalid

struct BoundSelection {
  bool larsen = true;
  bool chazelle_lvov = true;
  bool rectangles = true;
};

struct ExperimentConfig {
  Family family = Family::layered;
  std::vector<int> n_values;
  std::vector<std::uint64_t> seeds;
  ColoringChoice coloring = ColoringChoice::both;
  Target target = Target::vertices;
  BoundSelection bounds;
  std::string output_path;  // empty or "-" is stdout
  std::string format = "csv";
  // random_usp and bipartite_lift: 0 picks min(1, 3 ln n / n) and 16 sources.
  double density = 0;
  std::size_t sources = 0;
  PieceWeight piece_weight = PieceWeight::squared_length;
  // hadamard_grid rows use the exact solver as their structured coloring.
  std::size_t exact_column_guard = 24;
  bool timing = false;  // wall_ms is left empty otherwise, keeping reports byte-stable
  int workers = 1;
};

// Throws ConfigInvalid.
void validate_config(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

struct ResultRow {
  std::string family;
  int n = 0;
  std::uint64_t seed = 0;
  int layers = 0;  // l for layered families, longest path (nodes) otherwise
  std::size_t paths = 0;
  std::optional<int> structured_disc;
  std::optional<int> random_disc;
  std::optional<double> larsen;
  std::optional<double> chazelle_lvov;
  std::optional<std::uint64_t> tr_m;
  std::optional<std::uint64_t> tr_m2;
  std::optional<std::uint64_t> rectangles;
  bool verify_ok = false;
  std::optional<double> wall_ms;
  std::string error;  // why a cell stopped early
};

// One row per (n, seed), sorted by (family, n, seed). A failing cell is
// recorded in its row and never aborts the sweep.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

// Fixed column order, LF endings, reals with 6 significant digits.
std::string format_report(std::vector<ResultRow> rows, const std::string& format);
void emit_report(const std::vector<ResultRow>& rows, const std::string& format, const std::string& path);

// Persisted calibration constants. The first measurement of a key is
// recorded; later ones must stay within rel_tol of it.
struct CalibrationCheck {
  bool recorded = false;  // key was new
  bool ok = true;
  double stored = 0;
  double measured = 0;
};
CalibrationCheck check_calibration(const std::string& path, const std::string& key, double measured,
                                   double rel_tol = 0.2);

// Worker count from USPDISC_WORKERS, default 1.
int workers_from_env();

}  // namespace uspdisc
