#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "sblfem/fem2d.hpp"
#include "sblfem/problems.hpp"

using namespace sblfem;

namespace {

mesh::SblMesh2D disk(int p, double eps) { return mesh::build_mesh_2d({0.5, 8}, 1.0, p, eps); }

}  // namespace

TEST_CASE("DofMap2D node counts") {
  for (int p : {1, 2, 5}) {
    fem2d::Discretization2D disc(disk(p, 1e-2), p);
    const auto pairing = mesh::check_edge_pairing(disc.mesh);
    const std::size_t edges = pairing.interior_edges + pairing.boundary_edges;
    const std::size_t expected = disc.mesh.vertices.size() + edges * (p - 1) + disc.mesh.size() * (p - 1) * (p - 1);
    CHECK(disc.dofs.num_nodes() == expected);
    CHECK(disc.dofs.num_boundary() == static_cast<std::size_t>(8 * p));
  }
}

TEST_CASE("mass and stiffness blocks: area, constants in the kernel, symmetry") {
  fem2d::Discretization2D disc(disk(4, 1e-2), 4);
  const auto blocks = fem2d::assemble_blocks(disc, [](double, double) { return 1.0; });
  const std::size_t n = disc.dofs.num_nodes();
  const std::vector<double> ones(n, 1.0);
  const auto m1 = blocks.mass.multiply(ones);
  const auto k1 = blocks.stiffness.multiply(ones);
  double area = 0.0, kmax = 0.0, load = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    area += m1[i];
    kmax = std::max(kmax, std::abs(k1[i]));
    load += blocks.load[i];
  }
  CHECK(area == doctest::Approx(std::numbers::pi).epsilon(1e-11));
  CHECK(load == doctest::Approx(std::numbers::pi).epsilon(1e-11));
  CHECK(kmax < 1e-11);
  CHECK(blocks.stiffness.max_asymmetry() < 1e-13);
  CHECK(blocks.mass.max_asymmetry() < 1e-15);
}

TEST_CASE("sparse mixed solve agrees with a dense Eigen LU") {
  const auto prob = problems::bessel_exact_disk(1e-2, 1.0, 1.0, 1.0);
  fem2d::Discretization2D disc(disk(2, 1e-2), 2);
  const auto sys = fem2d::assemble_mixed(prob, disc);
  const std::size_t n = sys.system.size();
  const auto d = sys.system.matrix.to_dense();
  Eigen::MatrixXd a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = d[i * n + j];
  const Eigen::VectorXd ref = a.fullPivLu().solve(Eigen::Map<const Eigen::VectorXd>(sys.system.rhs.data(), n));
  const auto sol = fem2d::solve_mixed(prob, disc);
  for (std::size_t node = 0; node < disc.dofs.num_nodes(); ++node) {
    const long iu = sys.u_index[node];
    if (iu >= 0) CHECK(sol.field.u.values()[node] == doctest::Approx(ref(iu)).epsilon(1e-10).scale(1e-6));
    CHECK(sol.field.w.values()[node] == doctest::Approx(ref(sys.n_u + node)).epsilon(1e-10).scale(1e-6));
  }
}

TEST_CASE("norms of known error fields") {
  fem2d::Discretization2D disc(disk(3, 1e-2), 3);
  // e_u = 1, e_w = 0: energy^2 = c pi; e_w = 1, e_u = 0: balanced^2 = pi / eps.
  const fem2d::PairFn unit_u = [](std::size_t, double, double, mesh::Vec2) {
    return fem2d::PairValue{{1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
  };
  const fem2d::PairFn unit_w = [](std::size_t, double, double, mesh::Vec2) {
    return fem2d::PairValue{{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}};
  };
  const auto a = fem2d::norms_2d(unit_u, disc.mesh, 1e-2, 1.0, 2.0);
  CHECK(a.energy == doctest::Approx(std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-12));
  CHECK(a.l2_u == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));
  CHECK(a.max_u == doctest::Approx(1.0));
  const auto b = fem2d::norms_2d(unit_w, disc.mesh, 1e-2, 1.0, 2.0);
  CHECK(b.balanced == doctest::Approx(std::sqrt(std::numbers::pi / 1e-2)).epsilon(1e-12));
  CHECK(b.energy == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));
}

TEST_CASE("POLY_DISK errors decrease with p") {
  double prev = 1e300;
  for (int p : {2, 4, 6}) {
    const auto prob = problems::polynomial_disk(0.1, 1.0, 1.0);
    fem2d::Discretization2D disc(disk(p, 0.1), p);
    const auto sol = fem2d::solve_mixed(prob, disc);
    const double e = fem2d::norms_2d(fem2d::error_pair(prob, sol.field), disc.mesh, 0.1, 1.0, 1.0).energy;
    CHECK(e < prev);
    prev = e;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("region helpers partition the needle mesh") {
  const auto m = disk(4, 1e-3);
  const auto needles = fem2d::needle_elements(m);
  const auto regular = fem2d::regular_elements(m);
  CHECK(needles.size() == 8);
  CHECK(needles.size() + regular.size() == m.size());
  CHECK(fem2d::inner_elements(m).size() == 12);
}

TEST_CASE("special representatives: interface values and boundary trace") {
  const double eps = 1e-3;
  const int p = 4;
  const auto prob = problems::bessel_exact_disk(eps, 1.0, 1.0, 1.0);
  fem2d::Discretization2D disc(disk(p, eps), p);
  const auto rep = fem2d::special_representatives_2d(prob, disc);
  const auto w1 = fem2d::project_regular(prob.exact->parts->w_smooth, disc, fem2d::ProjectionMode::L2);
  for (std::size_t e : fem2d::needle_elements(disc.mesh))
    for (int j = 0; j <= p; ++j) {
      const std::size_t iface = disc.dofs.node(e, p, j);
      CHECK(rep.w[iface] == doctest::Approx(w1[iface]));
      CHECK(rep.u[disc.dofs.node(e, 0, j)] == 0.0);
    }
  fem2d::Discretization2D coarse(mesh::build_mesh_2d({0.5, 8}, 1.0, p, 0.5), p);
  CHECK_THROWS_AS(fem2d::special_representatives_2d(problems::bessel_exact_disk(0.4, 1.0, 1.0, 1.0), coarse),
                  std::invalid_argument);
}

TEST_CASE("samples export") {
  const auto prob = problems::polynomial_disk(0.5, 1.0, 1.0);
  fem2d::Discretization2D disc(disk(2, 0.5), 2);
  const auto sol = fem2d::solve_mixed(prob, disc);
  const auto csv = fem2d::export_samples_csv(disc, sol.field, 3);
  CHECK(csv.rfind("element,xi,eta,x,y,u,w", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(1 + 9 * disc.mesh.size()));
}
