#include "sblfem/study.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "sblfem/fem1d.hpp"
#include "sblfem/fem2d.hpp"
#include "sblfem/fit.hpp"
#include "sblfem/meshing.hpp"
#include "sblfem/problems.hpp"

namespace sblfem::study {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

std::string unquote(const std::string& v, const std::string& key) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  throw std::invalid_argument("config: " + key + " expects a quoted string");
}

double to_double(const std::string& v, const std::string& key) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: " + key + " expects a number, got '" + v + "'");
  }
  if (used != v.size()) throw std::invalid_argument("config: " + key + " expects a number, got '" + v + "'");
  return out;
}

int to_int(const std::string& v, const std::string& key) {
  const double d = to_double(v, key);
  if (d != std::floor(d)) throw std::invalid_argument("config: " + key + " expects an integer");
  return static_cast<int>(d);
}

std::vector<std::string> split_array(const std::string& v, const std::string& key) {
  if (v.size() < 2 || v.front() != '[' || v.back() != ']')
    throw std::invalid_argument("config: " + key + " expects an array");
  std::vector<std::string> out;
  std::stringstream ss(v.substr(1, v.size() - 2));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

const std::vector<std::string>& known_norms() {
  static const std::vector<std::string> names{"energy", "balanced", "max", "c1max"};
  return names;
}

double column(const StudyRow& r, const std::string& norm) {
  if (norm == "energy") return r.energy;
  if (norm == "balanced") return r.balanced;
  if (norm == "max") return r.max;
  if (norm == "c1max") return r.c1max;
  throw std::invalid_argument("unknown norm '" + norm + "'");
}

nlohmann::json fit_to_json(const fit::ExpFit& f) {
  return {{"beta", f.beta}, {"log_c", f.log_c}, {"r2", f.r2}, {"n", f.n}};
}

// Exact or failed sweeps can leave fewer than two usable points.
nlohmann::json try_fit(const std::vector<double>& ps, const std::vector<double>& errs) {
  try {
    return fit_to_json(fit::fit_exponential(ps, errs));
  } catch (const std::invalid_argument& e) {
    return {{"beta", nullptr}, {"log_c", nullptr}, {"r2", nullptr}, {"n", 0}, {"note", e.what()}};
  }
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

void StudyConfig::validate() const {
  if (dimension != 1 && dimension != 2) throw std::invalid_argument("dimension must be 1 or 2");
  if (eps.empty()) throw std::invalid_argument("eps list is empty");
  for (double e : eps)
    if (!(e > 0.0 && e <= 1.0)) throw std::invalid_argument("eps must lie in (0, 1]");
  const int lo = dimension == 1 ? 3 : 2;
  const int hi = dimension == 1 ? 16 : 8;
  if (p_min < lo || p_max > hi || p_min > p_max) {
    std::ostringstream os;
    os << "p range [" << p_min << ", " << p_max << "] outside [" << lo << ", " << hi << "]";
    throw std::invalid_argument(os.str());
  }
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
  if (dimension == 1) {
    const auto names = problems::catalog_1d_names();
    if (std::find(names.begin(), names.end(), problem) == names.end())
      throw std::invalid_argument("unknown 1D problem '" + problem + "'");
  } else {
    if (problem != "BESSEL" && problem != "POLY_DISK")
      throw std::invalid_argument("unknown 2D problem '" + problem + "'");
    if (!(rho0 > 0.0 && rho0 < 1.0)) throw std::invalid_argument("rho0 must lie in (0, 1)");
    if (n_sectors < 4 || n_sectors % 4 != 0) throw std::invalid_argument("n_sectors must be a positive multiple of 4");
    if (!(b > 0.0 && c > 0.0)) throw std::invalid_argument("b and c must be positive");
  }
  for (const auto& n : norms)
    if (std::find(known_norms().begin(), known_norms().end(), n) == known_norms().end())
      throw std::invalid_argument("unknown norm '" + n + "'");
}

StudyConfig default_config(int dimension) {
  StudyConfig cfg;
  cfg.dimension = dimension;
  if (dimension == 2) {
    cfg.problem = "BESSEL";
    cfg.eps = {1e-2, 1e-4, 1e-6};
    cfg.p_min = 2;
    cfg.p_max = 8;
  }
  return cfg;
}

StudyConfig parse_config(const std::string& text, StudyConfig cfg) {
  std::stringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') throw std::invalid_argument("config line " + std::to_string(line_no) + ": tables are not supported");
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "dimension") cfg.dimension = to_int(value, key);
    else if (key == "problem") cfg.problem = unquote(value, key);
    else if (key == "eps") {
      cfg.eps.clear();
      if (!value.empty() && value.front() == '[') {
        for (const auto& item : split_array(value, key)) cfg.eps.push_back(to_double(item, key));
      } else {
        cfg.eps.push_back(to_double(value, key));
      }
    } else if (key == "p_min") cfg.p_min = to_int(value, key);
    else if (key == "p_max") cfg.p_max = to_int(value, key);
    else if (key == "kappa") cfg.kappa = to_double(value, key);
    else if (key == "rho0") cfg.rho0 = to_double(value, key);
    else if (key == "n_sectors") cfg.n_sectors = to_int(value, key);
    else if (key == "b") cfg.b = to_double(value, key);
    else if (key == "c") cfg.c = to_double(value, key);
    else if (key == "f0") cfg.f0 = to_double(value, key);
    else if (key == "out_dir") cfg.out_dir = unquote(value, key);
    else if (key == "timing") {
      if (value != "true" && value != "false") throw std::invalid_argument("config: timing expects true or false");
      cfg.timing = value == "true";
    } else if (key == "norms") {
      cfg.norms.clear();
      for (const auto& item : split_array(value, key)) cfg.norms.push_back(unquote(item, key));
    } else {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

StudyConfig load_config_file(const std::string& path, StudyConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

StudyRow run_case_1d(const std::string& problem, double eps, int p, double kappa) {
  StudyRow row;
  row.problem = problem;
  row.eps = eps;
  row.p = p;
  row.kappa = kappa;
  const auto spec = problems::catalog_1d(problem, eps);
  const auto sol = fem1d::solve_1d(spec, kappa, p);
  const auto& u = spec.exact->u;
  const auto& field = sol.field;
  const ElementJetFn err = [&](std::size_t j, double x) { return u(x) - field.jet_on_element(j, x); };
  const auto rep = fem1d::norms_1d(err, field.mesh(), {eps, spec.b, spec.c});
  row.energy = rep.energy;
  row.balanced = rep.balanced;
  row.max = rep.max;
  row.c1max = rep.c1max;
  row.dofs = sol.dofs;
  return row;
}

StudyRow run_case_2d(const StudyConfig& cfg, double eps, int p) {
  StudyRow row;
  row.problem = cfg.problem;
  row.eps = eps;
  row.p = p;
  row.kappa = cfg.kappa;
  const auto spec = cfg.problem == "BESSEL" ? problems::bessel_exact_disk(eps, cfg.b, cfg.c, cfg.f0)
                                            : problems::polynomial_disk(eps, cfg.b, cfg.c);
  fem2d::Discretization2D disc(mesh::build_mesh_2d({cfg.rho0, cfg.n_sectors}, cfg.kappa, p, eps), p);
  const auto sol = fem2d::solve_mixed(spec, disc);
  const auto rep = fem2d::norms_2d(fem2d::error_pair(spec, sol.field), disc.mesh, eps, spec.b, spec.c);
  row.energy = rep.energy;
  row.balanced = rep.balanced;
  row.max = rep.max_u;
  row.c1max = rep.c1max;
  row.dofs = sol.dofs;
  return row;
}

unsigned worker_count() {
  if (const char* env = std::getenv("SBL_FEM_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

StudyReport run_study(const StudyConfig& config) {
  config.validate();
  StudyReport report;
  report.config = config;

  std::vector<double> eps = config.eps;
  std::sort(eps.begin(), eps.end(), std::greater<>());
  eps.erase(std::unique(eps.begin(), eps.end()), eps.end());

  struct Task {
    double eps;
    int p;
  };
  std::vector<Task> tasks;
  for (double e : eps)
    for (int p = config.p_min; p <= config.p_max; ++p) tasks.push_back({e, p});

  // Each task writes its own slot, so the row order does not depend on scheduling.
  report.rows.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const auto start = std::chrono::steady_clock::now();
      StudyRow row;
      try {
        row = config.dimension == 1 ? run_case_1d(config.problem, tasks[i].eps, tasks[i].p, config.kappa)
                                    : run_case_2d(config, tasks[i].eps, tasks[i].p);
      } catch (const std::exception& ex) {
        row.problem = config.problem;
        row.eps = tasks[i].eps;
        row.p = tasks[i].p;
        row.kappa = config.kappa;
        row.energy = row.balanced = row.max = row.c1max = std::nan("");
        row.error = ex.what();
      }
      if (config.timing)
        row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      report.rows[i] = std::move(row);
    }
  };
  const unsigned n_workers = std::min<std::size_t>(worker_count(), std::max<std::size_t>(tasks.size(), 1));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return report;
}

std::vector<std::pair<int, double>> envelope(const StudyReport& report, const std::string& norm) {
  std::map<int, double> best;
  for (const auto& r : report.rows) {
    if (!r.error.empty()) continue;
    const double v = column(r, norm);
    auto [it, inserted] = best.try_emplace(r.p, v);
    if (!inserted) it->second = std::max(it->second, v);
  }
  return {best.begin(), best.end()};
}

std::string results_csv(const StudyReport& report) {
  std::ostringstream os;
  os << "problem,eps,p,kappa,energy,balanced,max,c1max,dofs,wall_ms\n";
  for (const auto& r : report.rows) {
    os << r.problem << ',' << format_double(r.eps) << ',' << r.p << ',' << format_double(r.kappa) << ','
       << format_double(r.energy) << ',' << format_double(r.balanced) << ',' << format_double(r.max) << ','
       << format_double(r.c1max) << ',' << r.dofs << ',' << format_double(r.wall_ms) << '\n';
  }
  return os.str();
}

nlohmann::json fit_json(const StudyReport& report) {
  const auto& cfg = report.config;
  nlohmann::json out;
  out["problem"] = cfg.problem;
  out["dimension"] = cfg.dimension;
  out["kappa"] = cfg.kappa;
  out["p_min"] = cfg.p_min;
  out["p_max"] = cfg.p_max;

  std::vector<double> eps;
  for (const auto& r : report.rows)
    if (std::find(eps.begin(), eps.end(), r.eps) == eps.end()) eps.push_back(r.eps);

  nlohmann::json per_eps = nlohmann::json::array();
  for (double e : eps) {
    nlohmann::json entry;
    entry["eps"] = e;
    for (const auto& norm : cfg.norms) {
      std::vector<double> ps, errs;
      for (const auto& r : report.rows) {
        if (r.eps != e || !r.error.empty()) continue;
        ps.push_back(r.p);
        errs.push_back(column(r, norm));
      }
      entry[norm] = try_fit(ps, errs);
    }
    per_eps.push_back(entry);
  }
  out["per_eps"] = per_eps;

  nlohmann::json env;
  for (const auto& norm : cfg.norms) {
    std::vector<double> ps, errs;
    for (const auto& [p, v] : envelope(report, norm)) {
      ps.push_back(p);
      errs.push_back(v);
    }
    env[norm] = try_fit(ps, errs);
  }
  out["envelope"] = env;

  nlohmann::json failures = nlohmann::json::array();
  for (const auto& r : report.rows)
    if (!r.error.empty()) failures.push_back({{"eps", r.eps}, {"p", r.p}, {"error", r.error}});
  out["failures"] = failures;
  return out;
}

std::string plot_script(const StudyReport& report) {
  const auto& cfg = report.config;
  std::vector<double> eps;
  for (const auto& r : report.rows)
    if (std::find(eps.begin(), eps.end(), r.eps) == eps.end()) eps.push_back(r.eps);

  std::ostringstream os;
  os << "# gnuplot script; run from the output directory\n"
     << "set datafile separator ','\n"
     << "set terminal pngcairo size 900,600\n"
     << "set logscale y\n"
     << "set format y '10^{%L}'\n"
     << "set xlabel 'p'\n"
     << "set key outside right\n";
  const std::map<std::string, int> col{{"energy", 5}, {"balanced", 6}, {"max", 7}, {"c1max", 8}};
  for (const auto& norm : cfg.norms) {
    os << "\nset output '" << norm << ".png'\n"
       << "set title '" << cfg.problem << ": " << norm << " error, kappa = " << cfg.kappa << "'\n"
       << "plot ";
    for (std::size_t i = 0; i < eps.size(); ++i) {
      if (i) os << ", \\\n     ";
      os << "'results.csv' every ::1 using ($2 == " << format_double(eps[i]) << " ? $3 : 1/0):"
         << col.at(norm) << " with linespoints title 'eps = " << eps[i] << "'";
    }
    os << '\n';
  }
  return os.str();
}

nlohmann::json mesh_json(const StudyConfig& cfg) {
  // Mesh of the smallest eps at the largest p: the most strongly graded one.
  const double eps = *std::min_element(cfg.eps.begin(), cfg.eps.end());
  if (cfg.dimension == 1) return mesh::to_json(mesh::build_mesh_1d(cfg.kappa, cfg.p_max, eps));
  return mesh::to_json(mesh::build_mesh_2d({cfg.rho0, cfg.n_sectors}, cfg.kappa, cfg.p_max, eps));
}

void write_study(const StudyReport& report) {
  namespace fs = std::filesystem;
  const fs::path dir(report.config.out_dir);
  fs::create_directories(dir);
  auto write = [&](const char* name, const std::string& text) {
    std::ofstream out(dir / name);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << text;
  };
  write("results.csv", results_csv(report));
  write("fit.json", fit_json(report).dump(2) + "\n");
  write("plot.gp", plot_script(report));
  write("mesh.json", mesh_json(report.config).dump(2) + "\n");
}

}  // namespace sblfem::study
