#pragma once

// Convergence-study driver: runs the (eps, p) grid for one problem, writes
// results.csv, fit.json, plot.gp and mesh.json.

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

namespace sblfem::study {

struct StudyConfig {
  int dimension = 1;
  std::string problem = "LAYERED";
  std::vector<double> eps{1e-2, 1e-4, 1e-6, 1e-8};
  int p_min = 3;
  int p_max = 12;
  double kappa = 1.0;
  double rho0 = 0.5;       ///< 2D ring thickness
  int n_sectors = 8;       ///< 2D boundary elements
  double b = 1.0;          ///< 2D constant coefficients and forcing
  double c = 1.0;
  double f0 = 1.0;
  std::vector<std::string> norms{"energy", "balanced", "max", "c1max"};
  std::string out_dir = "study_out";
  bool timing = false;     ///< record wall_ms (otherwise 0, keeping files reproducible)

  /// Throws std::invalid_argument on eps outside (0,1], p outside the
  /// supported range (1D: 3..16, 2D: 2..8), non-positive kappa, and so on.
  void validate() const;
};

StudyConfig default_config(int dimension);

/// Flat key = value lines (TOML syntax subset: numbers, booleans, quoted
/// strings, flat arrays, # comments) applied on top of `base`.
StudyConfig parse_config(const std::string& text, StudyConfig base);
StudyConfig load_config_file(const std::string& path, StudyConfig base);

struct StudyRow {
  std::string problem;
  double eps = 0.0;
  int p = 0;
  double kappa = 0.0;
  double energy = 0.0;
  double balanced = 0.0;
  double max = 0.0;
  double c1max = 0.0;
  std::size_t dofs = 0;
  double wall_ms = 0.0;
  std::string error;  ///< non-empty when the run failed
};

struct StudyReport {
  StudyConfig config;
  std::vector<StudyRow> rows;  ///< sorted by (eps descending, p ascending)
};

StudyRow run_case_1d(const std::string& problem, double eps, int p, double kappa);
StudyRow run_case_2d(const StudyConfig& config, double eps, int p);

/// Worker count: SBL_FEM_THREADS if set and positive, else the hardware
/// concurrency (at least 1).
unsigned worker_count();

StudyReport run_study(const StudyConfig& config);

std::string results_csv(const StudyReport& report);
nlohmann::json fit_json(const StudyReport& report);
std::string plot_script(const StudyReport& report);
nlohmann::json mesh_json(const StudyConfig& config);

/// Writes results.csv, fit.json, plot.gp and mesh.json into config.out_dir.
void write_study(const StudyReport& report);

/// Per-p maximum over eps of a norm column ("energy", "balanced", "max", "c1max").
std::vector<std::pair<int, double>> envelope(const StudyReport& report, const std::string& norm);

}  // namespace sblfem::study
