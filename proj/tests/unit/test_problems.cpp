#include <doctest.h>

#include <cmath>

#include "sblfem/problems.hpp"

using namespace sblfem;

TEST_CASE("scaled Bessel functions agree with std::cyl_bessel_i") {
  for (int nu : {0, 1})
    for (double x : {0.0, 1e-3, 0.5, 4.0, 17.0, 29.9, 30.0, 30.1, 55.0, 200.0, 650.0}) {
      const double ref = std::cyl_bessel_i(static_cast<double>(nu), x) * std::exp(-x);
      CHECK(problems::scaled_bessel_i(nu, x) == doctest::Approx(ref).epsilon(1e-13));
    }
  CHECK_THROWS_AS(problems::scaled_bessel_i(2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(problems::scaled_bessel_i(0, -1.0), std::invalid_argument);
}

TEST_CASE("catalog solutions satisfy the boundary conditions") {
  for (const auto& name : problems::catalog_1d_names())
    for (double eps : {1.0, 1e-3, 1e-8}) {
      const auto prob = problems::catalog_1d(name, eps);
      const auto& u = prob.exact->u;
      CHECK(std::abs(u(0.0)[0]) < 1e-14);
      CHECK(std::abs(u(1.0)[0]) < 1e-14);
      CHECK(std::abs(u(0.0)[1]) < 1e-13);
      CHECK(std::abs(u(1.0)[1]) < 1e-13);
    }
}

TEST_CASE("catalog forcing matches a finite-difference evaluation of the operator") {
  // f = eps^2 u'''' - b' u' - b u'' + c u with u'''' and u'' from central
  // differences of the values only.
  const double h = 2e-3;
  for (const auto& name : problems::catalog_1d_names()) {
    const double eps = 0.2;
    const auto prob = problems::catalog_1d(name, eps);
    const auto bp = problems::catalog_b_prime(name);
    auto u = [&](double x) { return prob.exact->u(x)[0]; };
    for (double x : {0.2, 0.5, 0.81}) {
      const double d1 = (u(x - 2 * h) - 8 * u(x - h) + 8 * u(x + h) - u(x + 2 * h)) / (12 * h);
      const double d2 = (-u(x - 2 * h) + 16 * u(x - h) - 30 * u(x) + 16 * u(x + h) - u(x + 2 * h)) / (12 * h * h);
      const double d4 = (-u(x - 3 * h) + 12 * u(x - 2 * h) - 39 * u(x - h) + 56 * u(x) - 39 * u(x + h) +
                         12 * u(x + 2 * h) - u(x + 3 * h)) / (6 * std::pow(h, 4));
      const double lhs = eps * eps * d4 - bp(x) * d1 - prob.b(x) * d2 + prob.c(x) * u(x);
      CHECK(lhs == doctest::Approx(prob.f(x)).epsilon(1e-4).scale(1.0));
    }
    CHECK(problems::catalog_residual(prob, bp) < 1e-12);
  }
}

TEST_CASE("exponential layer jets") {
  const double eps = 1e-3;
  const auto w = problems::exponential_layer(eps);
  const Jet j = w(2e-3);
  const double e = std::exp(-2.0);
  CHECK(j[0] == doctest::Approx(eps * e));
  CHECK(j[1] == doctest::Approx(-e));
  CHECK(j[2] == doctest::Approx(e / eps));
  CHECK(j[4] == doctest::Approx(e / (eps * eps * eps)));
}

TEST_CASE("Bessel disk solution: boundary conditions and radial equation") {
  const double eps = 0.1, b = 1.0, c = 2.0, f0 = 1.5;
  const auto d = problems::bessel_disk(eps, b, c, f0);
  CHECK(std::abs(d.u(1.0)) < 1e-14);
  CHECK(std::abs(d.du(1.0)) < 1e-13);
  CHECK(d.lambda1 * d.lambda2 * eps * eps == doctest::Approx(c));
  CHECK(eps * eps * (d.lambda1 + d.lambda2) == doctest::Approx(b));
  // eps^2 Lap^2 u - b Lap u + c u = f0 with Lap g = g'' + g'/r via differences of Lap u.
  const double h = 2e-4;
  for (double r : {0.3, 0.7, 0.95}) {
    auto lap = [&](double s) { return d.laplace_u(s); };
    const double l1 = (lap(r + h) - lap(r - h)) / (2 * h);
    const double l2 = (lap(r + h) - 2 * lap(r) + lap(r - h)) / (h * h);
    const double res = eps * eps * (l2 + l1 / r) - b * lap(r) + c * d.u(r);
    CHECK(res == doctest::Approx(f0).epsilon(1e-5));
    const double fd_lap = (d.u(r + h) - 2 * d.u(r) + d.u(r - h)) / (h * h) + (d.u(r + h) - d.u(r - h)) / (2 * h * r);
    CHECK(d.laplace_u(r) == doctest::Approx(fd_lap).epsilon(1e-5));
  }
  CHECK_THROWS_AS(problems::bessel_disk(1.0, 1.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("Bessel disk at small eps stays finite and bounded") {
  const auto d = problems::bessel_disk(1e-8, 1.0, 1.0, 1.0);
  for (double r : {0.0, 0.5, 1.0 - 1e-7, 1.0}) {
    CHECK(std::isfinite(d.u(r)));
    CHECK(std::abs(d.u(r)) <= 1.0 + 1e-12);
  }
}

TEST_CASE("2D problem specs") {
  const auto p = problems::bessel_exact_disk(1e-2, 1.0, 1.0, 1.0);
  CHECK(p.name == "BESSEL");
  REQUIRE(p.exact.has_value());
  REQUIRE(p.exact->parts.has_value());
  const double x = 0.3, y = -0.4;
  const auto u = p.exact->u(x, y);
  const auto sum = p.exact->parts->u_smooth(x, y) + p.exact->parts->u_layer(x, y);
  CHECK(u.v == doctest::Approx(sum.v));
  CHECK(u.dx == doctest::Approx(sum.dx));
  CHECK(p.exact->w(x, y).v == doctest::Approx(1e-2 * p.exact->laplace_u(x, y)));

  const auto q = problems::polynomial_disk(0.5, 1.0, 1.0);
  const double r2 = x * x + y * y;
  CHECK(q.exact->u(x, y).v == doctest::Approx((1 - r2) * (1 - r2)));
  CHECK(q.f(x, y) == doctest::Approx(64 * 0.25 - (16 * r2 - 8) + (1 - r2) * (1 - r2)));
}

TEST_CASE("unknown catalog names are rejected") {
  CHECK_THROWS_AS(problems::catalog_1d("NOPE", 0.1), std::invalid_argument);
  CHECK_THROWS_AS(problems::catalog_1d("POLY", 2.0), std::invalid_argument);
}
