// sblfem: convergence studies, self-verification and mesh export.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sblfem/meshing.hpp"
#include "sblfem/study.hpp"
#include "sblfem/verify.hpp"

namespace {

using sblfem::study::StudyConfig;

struct StudyOptions {
  std::string config;
  std::optional<std::vector<double>> eps;
  std::optional<int> p_min, p_max;
  std::optional<double> kappa;
  std::optional<std::string> problem, out;
  bool timing = false;
};

void add_study_options(CLI::App* cmd, StudyOptions& o) {
  cmd->add_option("--config", o.config, "flat key = value config file")->check(CLI::ExistingFile);
  cmd->add_option("--eps", o.eps, "eps values (repeatable)");
  cmd->add_option("--p-min", o.p_min, "smallest polynomial degree");
  cmd->add_option("--p-max", o.p_max, "largest polynomial degree");
  cmd->add_option("--kappa", o.kappa, "layer-width constant");
  cmd->add_option("--problem", o.problem, "catalog problem name");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_flag("--timing", o.timing, "record wall-clock time per run");
}

StudyConfig resolve(int dimension, const StudyOptions& o) {
  StudyConfig cfg = sblfem::study::default_config(dimension);
  if (!o.config.empty()) cfg = sblfem::study::load_config_file(o.config, cfg);
  cfg.dimension = dimension;
  if (o.eps) cfg.eps = *o.eps;
  if (o.p_min) cfg.p_min = *o.p_min;
  if (o.p_max) cfg.p_max = *o.p_max;
  if (o.kappa) cfg.kappa = *o.kappa;
  if (o.problem) cfg.problem = *o.problem;
  if (o.out) cfg.out_dir = *o.out;
  if (o.timing) cfg.timing = true;
  cfg.validate();
  return cfg;
}

int run_study(int dimension, const StudyOptions& o) {
  const StudyConfig cfg = resolve(dimension, o);
  const auto report = sblfem::study::run_study(cfg);
  sblfem::study::write_study(report);
  std::size_t failed = 0;
  for (const auto& r : report.rows)
    if (!r.error.empty()) {
      ++failed;
      std::cerr << "run eps=" << r.eps << " p=" << r.p << " failed: " << r.error << "\n";
    }
  std::cout << report.rows.size() << " runs, " << failed << " failed; results in " << cfg.out_dir << "\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral boundary layer FEM: studies and verification"};
  app.require_subcommand(1);

  StudyOptions s1, s2;
  auto* study1 = app.add_subcommand("study1d", "1D convergence study (p in 3..16)");
  add_study_options(study1, s1);
  auto* study2 = app.add_subcommand("study2d", "2D convergence study on the unit disk (p in 2..8)");
  add_study_options(study2, s2);

  std::string suite = "ALL", json_out;
  auto* verify = app.add_subcommand("verify", "run verification suites");
  verify->add_option("--suite", suite, "suite name or ALL")
      ->check(CLI::IsMember([] {
        auto names = sblfem::verify::suite_names();
        names.push_back("ALL");
        return names;
      }()));
  verify->add_option("--json", json_out, "write the JSON summary to this file ('-' for stdout)");

  int dim = 2, p = 4;
  double kappa = 1.0, eps = 1e-2, rho0 = 0.5;
  int sectors = 8;
  std::string mesh_out = "-";
  auto* dump = app.add_subcommand("dump-mesh", "write an SBL mesh as JSON");
  dump->add_option("--dim", dim, "1 or 2")->check(CLI::IsMember({1, 2}));
  dump->add_option("--p", p, "polynomial degree")->check(CLI::PositiveNumber);
  dump->add_option("--kappa", kappa, "layer-width constant")->check(CLI::PositiveNumber);
  dump->add_option("--eps", eps, "eps in (0, 1]")->check(CLI::Range(0.0, 1.0));
  dump->add_option("--rho0", rho0, "2D ring thickness")->check(CLI::Range(0.0, 1.0));
  dump->add_option("--sectors", sectors, "2D boundary elements (multiple of 4)");
  dump->add_option("--out", mesh_out, "output file ('-' for stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*study1) return run_study(1, s1);
    if (*study2) return run_study(2, s2);
    if (*verify) {
      const auto results = sblfem::verify::run_suites(suite);
      nlohmann::json summary = nlohmann::json::array();
      bool ok = true;
      for (const auto& r : results) {
        ok = ok && r.passed();
        summary.push_back(sblfem::verify::to_json(r));
        std::cout << (r.passed() ? "PASS " : "FAIL ") << r.name << "\n";
        for (const auto& c : r.checks)
          std::cout << "  [" << (c.passed ? "ok" : "!!") << "] " << c.name << ": " << c.value << " (bound " << c.bound
                    << ")" << (c.detail.empty() ? "" : "  " + c.detail) << "\n";
      }
      if (json_out == "-") {
        std::cout << summary.dump(2) << "\n";
      } else if (!json_out.empty()) {
        std::ofstream(json_out) << summary.dump(2) << "\n";
      }
      return ok ? 0 : 1;
    }
    if (*dump) {
      if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
      const nlohmann::json j = dim == 1 ? sblfem::mesh::to_json(sblfem::mesh::build_mesh_1d(kappa, p, eps))
                                        : sblfem::mesh::to_json(sblfem::mesh::build_mesh_2d({rho0, sectors}, kappa, p, eps));
      if (mesh_out == "-") {
        std::cout << j.dump(2) << "\n";
      } else {
        std::ofstream out(mesh_out);
        if (!out) throw std::runtime_error("cannot write " + mesh_out);
        out << j.dump(2) << "\n";
      }
      return 0;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  return 0;
}
