#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sblfem/fem1d.hpp"
#include "sblfem/problems.hpp"

using namespace sblfem;

namespace {

ElementJetFn error_of(const fem1d::ProblemSpec1D& prob, const fem1d::DiscreteField1D& f) {
  return [&](std::size_t j, double x) { return prob.exact->u(x) - f.jet_on_element(j, x); };
}

}  // namespace

TEST_CASE("DofMap1D numbering") {
  const fem1d::DofMap1D d(3, 6);
  CHECK(d.num_total() == 8 + 3 * 3);
  CHECK(d.num_free() == d.num_total() - 4);
  CHECK(d.global(0, 0) == 0);
  CHECK(d.global(0, 3) == 3);
  CHECK(d.global(1, 0) == 2);
  CHECK(d.global(2, 4) == 8 + 2 * 3);
  for (std::size_t g : {0u, 1u, 6u, 7u}) CHECK(d.free_index(g) == -1);
  CHECK(d.free_index(2) >= 0);
}

TEST_CASE("POLY with eps = 1 and p = 4 is reproduced exactly") {
  const auto prob = problems::catalog_1d("POLY", 1.0);
  const auto sol = fem1d::solve_1d(prob, 1.0, 4);
  const auto rep = fem1d::norms_1d(error_of(prob, sol.field), sol.field.mesh(), {1.0, prob.b, prob.c});
  CHECK(rep.energy < 1e-10);
  CHECK(rep.max < 1e-12);
}

TEST_CASE("assembled matrix is symmetric with clamped dofs removed") {
  const auto prob = problems::catalog_1d("VARCOEF", 1e-2);
  const auto mesh = mesh::build_mesh_1d(1.0, 5, 1e-2);
  const auto sys = fem1d::assemble_1d(prob, mesh, 5);
  CHECK(sys.system.size() == sys.dofs.num_free());
  CHECK(sys.system.matrix.max_asymmetry() < 1e-14 * sys.system.matrix.frobenius());
  CHECK(sys.system.symmetric);
}

TEST_CASE("discrete solution of the symmetric LAYERED problem is symmetric") {
  const auto prob = problems::catalog_1d("LAYERED", 1e-3);
  const auto sol = fem1d::solve_1d(prob, 1.0, 7);
  for (double x : {0.0005, 0.01, 0.3, 0.45})
    CHECK(sol.field.evaluate(x) == doctest::Approx(sol.field.evaluate(1.0 - x)).epsilon(1e-10).scale(1e-6));
}

TEST_CASE("energy and balanced norms of a smooth function against closed forms") {
  // w = sin(pi x), b = c = 1: |w|_2^2 = pi^4/2, |w|_1^2 = pi^2/2, ||w||_0^2 = 1/2.
  const double eps = 0.1, pi = std::numbers::pi;
  const JetFn w = [pi](double x) {
    return Jet{std::sin(pi * x), pi * std::cos(pi * x), -pi * pi * std::sin(pi * x), 0.0, 0.0};
  };
  const ScalarFn one = [](double) { return 1.0; };
  const auto r = fem1d::norms_1d(element_agnostic(w), mesh::build_mesh_1d(1.0, 3, eps), {eps, one, one});
  const double h2 = std::pow(pi, 4) / 2, h1 = pi * pi / 2, l2 = 0.5;
  CHECK(r.energy == doctest::Approx(std::sqrt(eps * eps * h2 + h1 + l2)).epsilon(1e-13));
  CHECK(r.balanced == doctest::Approx(std::sqrt(eps * h2 + h1 + l2)).epsilon(1e-13));
  // Sampled maxima: lower bounds within a second-order deficit of the sample spacing.
  CHECK(r.max <= 1.0);
  CHECK(r.max == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(r.c1max <= pi + 1e-14);
  CHECK(r.c1max == doctest::Approx(pi).epsilon(1e-4));
}

TEST_CASE("errors decrease with p for every catalog problem") {
  for (const auto& name : problems::catalog_1d_names()) {
    const auto prob = problems::catalog_1d(name, 1e-4);
    double prev = 1e300;
    for (int p : {3, 6, 9, 12}) {
      const auto sol = fem1d::solve_1d(prob, 1.0, p);
      const double e = fem1d::norms_1d(error_of(prob, sol.field), sol.field.mesh(), {prob.eps, prob.b, prob.c}).energy;
      CHECK(e <= prev * 1.0000001 + 1e-13);
      prev = e;
    }
  }
}

TEST_CASE("Galerkin orthogonality of the discrete solution") {
  const auto prob = problems::catalog_1d("VARCOEF", 1e-6);
  const auto sol = fem1d::solve_1d(prob, 1.0, 9);
  CHECK(fem1d::galerkin_orthogonality_residual(prob, sol.field) < 1e-9);
}

TEST_CASE("region helpers and evaluation domain") {
  const auto m = mesh::build_mesh_1d(1.0, 4, 1e-2);
  CHECK(fem1d::layer_elements(m) == std::vector<std::size_t>{0, 2});
  CHECK(fem1d::coarse_elements(m) == std::vector<std::size_t>{1});
  const auto prob = problems::catalog_1d("POLY", 0.5);
  const auto sol = fem1d::solve_1d(prob, 1.0, 4);
  CHECK_THROWS_AS(sol.field.evaluate(1.2), std::out_of_range);
}

TEST_CASE("problem validation") {
  auto prob = problems::catalog_1d("POLY", 0.5);
  prob.eps = 0.0;
  CHECK_THROWS_AS(prob.validate(), std::invalid_argument);
  prob.eps = 0.5;
  prob.c = [](double x) { return x - 0.5; };
  CHECK_THROWS_AS(prob.validate(), std::invalid_argument);
}
