#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "sblfem/meshing.hpp"

using namespace sblfem::mesh;

TEST_CASE("1D SBL mesh nodes and regions") {
  const auto m = build_mesh_1d(2.0, 5, 1e-3);
  REQUIRE(m.nodes.size() == 4);
  CHECK(m.nodes[1] == doctest::Approx(1e-2));
  CHECK(m.nodes[2] == doctest::Approx(1.0 - 1e-2));
  CHECK(m.regions[0] == Region1D::Layer);
  CHECK(m.regions[1] == Region1D::Coarse);
  CHECK(m.locate(0.0) == 0);
  CHECK(m.locate(m.nodes[1]) == 1);
  CHECK(m.locate(1.0) == 2);
  CHECK_THROWS(m.locate(1.5));
}

TEST_CASE("1D asymptotic range clamps tau to 1/3") {
  const auto m = build_mesh_1d(1.0, 4, 0.2);
  CHECK(m.tau == doctest::Approx(1.0 / 3.0));
  for (auto r : m.regions) CHECK(r == Region1D::Coarse);
}

TEST_CASE("1D mesh arguments are validated") {
  CHECK_THROWS_AS(build_mesh_1d(1.0, 4, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(build_mesh_1d(-1.0, 4, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(mesh_from_nodes({0.0, 0.5, 0.4, 1.0}), std::invalid_argument);
}

TEST_CASE("element maps: Jacobian matches finite differences") {
  const auto disk = build_mesh_2d({0.5, 8}, 1.0, 3, 1e-2);
  const double h = 1e-6;
  for (const auto& el : disk.elements) {
    const double xi = 0.37, eta = 0.61;
    const auto m = el.map.eval(xi, eta);
    const auto px = el.map.eval(xi + h, eta).x, mx = el.map.eval(xi - h, eta).x;
    const auto py = el.map.eval(xi, eta + h).x, my = el.map.eval(xi, eta - h).x;
    CHECK(m.dx_dxi == doctest::Approx((px.x - mx.x) / (2 * h)).epsilon(1e-6).scale(1e-3));
    CHECK(m.dy_dxi == doctest::Approx((px.y - mx.y) / (2 * h)).epsilon(1e-6).scale(1e-3));
    CHECK(m.dx_deta == doctest::Approx((py.x - my.x) / (2 * h)).epsilon(1e-6).scale(1e-3));
    CHECK(m.dy_deta == doctest::Approx((py.y - my.y) / (2 * h)).epsilon(1e-6).scale(1e-3));
  }
}

TEST_CASE("asymptotic disk mesh: counts, area, orientation, pairing") {
  const auto m = build_asymptotic_mesh_disk(0.5, 8);
  CHECK(m.n_boundary == 8);
  CHECK(m.size() == 8 + 4 + 8);  // ring, 2x2 squares, 4*2 blended
  CHECK(mesh_area(m) == doctest::Approx(std::numbers::pi).epsilon(1e-12));
  CHECK(min_jacobian(m) > 0.0);
  const auto pairing = check_edge_pairing(m);
  CHECK(pairing.ok());
  CHECK(pairing.boundary_edges == 8);
  // Euler characteristic of a disk: V - E + F = 1.
  const long e = static_cast<long>(pairing.interior_edges + pairing.boundary_edges);
  CHECK(static_cast<long>(m.vertices.size()) - e + static_cast<long>(m.size()) == 1);
}

TEST_CASE("needle split") {
  const double kappa = 1.0, eps = 1e-3;
  const int p = 6;
  const auto m = build_mesh_2d({0.5, 8}, kappa, p, eps);
  CHECK(m.needles);
  CHECK(m.split == doctest::Approx(kappa * p * eps));
  CHECK(m.size() == 8 + 8 + 12);
  std::set<int> parents;
  for (std::size_t e = 0; e < 8; ++e) {
    CHECK(m.elements[e].tag == ElementTag::Needle);
    CHECK(m.elements[e].boundary_edge >= 0);
    parents.insert(m.elements[e].parent);
    // Needle touches the unit circle along its boundary edge.
    const auto x = m.elements[e].map.eval(0.0, 0.5).x;
    CHECK(std::hypot(x.x, x.y) == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK(parents.size() == 8);
  for (std::size_t e = 8; e < 16; ++e) CHECK(m.elements[e].tag == ElementTag::RegularSplit);
  CHECK(mesh_area(m) == doctest::Approx(std::numbers::pi).epsilon(1e-12));
  CHECK(check_edge_pairing(m).ok());

  // Asymptotic range leaves the mesh unchanged.
  const auto coarse = build_mesh_2d({0.5, 8}, 1.0, 6, 0.1);
  CHECK_FALSE(coarse.needles);
  CHECK(coarse.size() == 20);
}

TEST_CASE("geometry arguments are validated") {
  CHECK_THROWS_AS(build_asymptotic_mesh_disk(0.5, 6), std::invalid_argument);
  CHECK_THROWS_AS(build_asymptotic_mesh_disk(1.5, 8), std::invalid_argument);
}

TEST_CASE("mesh JSON export") {
  const auto j1 = to_json(build_mesh_1d(1.0, 4, 1e-2));
  CHECK(j1["nodes"].size() == 4);
  const auto j2 = to_json(build_mesh_2d({0.5, 8}, 1.0, 4, 1e-2));
  CHECK(j2["elements"].size() == 28);
}
