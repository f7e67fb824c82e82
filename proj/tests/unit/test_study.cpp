#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "sblfem/study.hpp"

using namespace sblfem;

namespace {

std::string read(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = study::parse_config(
      "# study\nproblem = \"VARCOEF\"\neps = [1e-2, 1e-5]  # two values\np_min = 4\np_max = 9\nkappa = 2.5\n"
      "timing = true\nnorms = [\"energy\", \"max\"]\n",
      study::default_config(1));
  CHECK(cfg.problem == "VARCOEF");
  CHECK(cfg.eps == std::vector<double>{1e-2, 1e-5});
  CHECK(cfg.p_min == 4);
  CHECK(cfg.p_max == 9);
  CHECK(cfg.kappa == 2.5);
  CHECK(cfg.timing);
  CHECK(cfg.norms.size() == 2);
  CHECK_NOTHROW(cfg.validate());

  CHECK_THROWS_AS(study::parse_config("unknown = 1\n", study::default_config(1)), std::invalid_argument);
  CHECK_THROWS_AS(study::parse_config("p_min = abc\n", study::default_config(1)), std::invalid_argument);
  CHECK_THROWS_AS(study::parse_config("[table]\n", study::default_config(1)), std::invalid_argument);
}

TEST_CASE("config validation") {
  auto cfg = study::default_config(1);
  cfg.p_min = 2;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = study::default_config(2);
  cfg.p_max = 9;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = study::default_config(1);
  cfg.eps = {0.0};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = study::default_config(1);
  cfg.problem = "BESSEL";
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("study output is deterministic and independent of the thread count") {
  auto cfg = study::default_config(1);
  cfg.problem = "LAYERED";
  cfg.eps = {1e-3, 1e-1};
  cfg.p_min = 3;
  cfg.p_max = 7;
  setenv("SBL_FEM_THREADS", "1", 1);
  CHECK(study::worker_count() == 1);
  const auto a = study::run_study(cfg);
  setenv("SBL_FEM_THREADS", "4", 1);
  CHECK(study::worker_count() == 4);
  const auto b = study::run_study(cfg);
  unsetenv("SBL_FEM_THREADS");
  CHECK(study::results_csv(a) == study::results_csv(b));
  REQUIRE(a.rows.size() == 10);
  CHECK(a.rows.front().eps == 1e-1);  // eps descending, then p ascending
  CHECK(a.rows.front().p == 3);
  CHECK(a.rows.back().p == 7);
  for (const auto& r : a.rows) {
    CHECK(r.error.empty());
    CHECK(r.wall_ms == 0.0);
  }
}

TEST_CASE("failed runs are recorded and the study continues") {
  auto cfg = study::default_config(2);
  cfg.eps = {1.0, 0.05};  // b^2 <= 4 eps^2 c at eps = 1: no exact solution
  cfg.p_min = 2;
  cfg.p_max = 2;
  const auto r = study::run_study(cfg);
  REQUIRE(r.rows.size() == 2);
  CHECK_FALSE(r.rows[0].error.empty());
  CHECK(r.rows[1].error.empty());
  CHECK(r.rows[1].energy > 0.0);
  CHECK(study::fit_json(r)["failures"].size() == 1);
}

TEST_CASE("write_study produces the four artifacts") {
  auto cfg = study::default_config(1);
  cfg.problem = "POLY";
  cfg.eps = {1e-2};
  cfg.p_min = 3;
  cfg.p_max = 5;
  cfg.out_dir = (std::filesystem::temp_directory_path() / "sblfem_study_test").string();
  std::filesystem::remove_all(cfg.out_dir);
  study::write_study(study::run_study(cfg));
  const std::filesystem::path dir(cfg.out_dir);
  for (const char* f : {"results.csv", "fit.json", "plot.gp", "mesh.json"}) CHECK(std::filesystem::exists(dir / f));
  const auto csv = read(dir / "results.csv");
  CHECK(csv.rfind("problem,eps,p,kappa,energy,balanced,max,c1max,dofs,wall_ms\n", 0) == 0);
  const auto fit = nlohmann::json::parse(read(dir / "fit.json"));
  CHECK(fit["per_eps"].size() == 1);
  CHECK(fit["envelope"].contains("balanced"));
  std::filesystem::remove_all(cfg.out_dir);
}
