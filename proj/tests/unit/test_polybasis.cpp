#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <vector>

#include "sblfem/polybasis.hpp"

using namespace sblfem;

namespace {

// Golub-Welsch: Gauss-Legendre nodes/weights from the Jacobi matrix eigenpairs.
void golub_welsch(int n, std::vector<double>& x, std::vector<double>& w) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    j(k, k - 1) = j(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  x.resize(n);
  w.resize(n);
  for (int k = 0; k < n; ++k) {
    x[k] = es.eigenvalues()(k);
    w[k] = 2.0 * es.eigenvectors()(0, k) * es.eigenvectors()(0, k);
  }
}

}  // namespace

TEST_CASE("legendre_eval agrees with std::legendre") {
  for (int n = 0; n <= 20; ++n)
    for (double x : {-1.0, -0.73, 0.0, 0.21, 0.999, 1.0}) {
      CHECK(poly::legendre_eval(n, x).value == doctest::Approx(std::legendre(n, x)).epsilon(1e-13));
    }
}

TEST_CASE("legendre derivative matches central difference") {
  const double h = 1e-6;
  for (int n = 1; n <= 12; ++n) {
    const double x = 0.37;
    const double fd = (std::legendre(n, x + h) - std::legendre(n, x - h)) / (2 * h);
    CHECK(poly::legendre_eval(n, x).derivative == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("gauss_rule matches Golub-Welsch") {
  for (int n : {1, 2, 5, 12, 24}) {
    std::vector<double> x, w;
    golub_welsch(n, x, w);
    const auto r = poly::gauss_rule(n);
    REQUIRE(r.size() == static_cast<std::size_t>(n));
    CHECK(r.order == 2 * n - 1);
    for (int k = 0; k < n; ++k) {
      CHECK(r.points[k] == doctest::Approx(x[k]).epsilon(1e-13));
      CHECK(r.weights[k] == doctest::Approx(w[k]).epsilon(1e-12));
    }
  }
}

TEST_CASE("gauss_lobatto_rule: endpoints, interior roots of P'_{n-1}, closed-form weights") {
  for (int n : {2, 3, 6, 11}) {
    const auto r = poly::gauss_lobatto_rule(n);
    REQUIRE(r.size() == static_cast<std::size_t>(n));
    CHECK(r.points.front() == -1.0);
    CHECK(r.points.back() == 1.0);
    for (int k = 0; k < n; ++k) {
      const double x = r.points[k];
      if (k > 0 && k < n - 1) CHECK(std::abs(poly::legendre_eval(n - 1, x).derivative) < 1e-11);
      const double pn = std::legendre(n - 1, x);
      CHECK(r.weights[k] == doctest::Approx(2.0 / (n * (n - 1.0) * pn * pn)).epsilon(1e-12));
    }
  }
}

TEST_CASE("graded_rule: polynomial exactness and layer integrals") {
  const auto r = poly::graded_rule(0.2, 0.9, 1e-6, 8);
  double sum = 0.0, cube = 0.0;
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    sum += r.weights[i];
    cube += r.weights[i] * r.points[i] * r.points[i] * r.points[i];
  }
  CHECK(sum == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(cube == doctest::Approx((std::pow(0.9, 4) - std::pow(0.2, 4)) / 4.0).epsilon(1e-14));

  // Right-end layer only.
  const double eps = 1e-7;
  const auto rr = poly::graded_rule(0.0, 1.0, eps, 10, false, true);
  double layer = 0.0;
  for (std::size_t i = 0; i < rr.points.size(); ++i) layer += rr.weights[i] * std::exp(-(1.0 - rr.points[i]) / eps);
  CHECK(layer == doctest::Approx(eps).epsilon(1e-12));

  // Coarse scale: a single Gauss rule.
  CHECK(poly::graded_rule(0.0, 1.0, 0.5, 7).points.size() == 7);
}

TEST_CASE("C1 bubbles equal twice-integrated scaled Legendre polynomials") {
  // Oracle: b(t) = int_{-1}^t (t - s) b''(s) ds by high-order Gauss.
  const int p = 9;
  const poly::C1ReferenceBasis basis(p);
  const auto g = poly::gauss_rule(30);
  std::vector<Jet> v(basis.size());
  for (double t : {-0.8, -0.1, 0.4, 0.95}) {
    basis.eval_all(t, v);
    for (int k = 2; k <= p - 2; ++k) {
      double b = 0.0, db = 0.0;
      for (std::size_t q = 0; q < g.size(); ++q) {
        const double s = -1.0 + (t + 1.0) * (g.points[q] + 1.0) / 2.0;
        const double w = g.weights[q] * (t + 1.0) / 2.0;
        const double d2 = std::sqrt((2.0 * k + 1.0) / 2.0) * std::legendre(k, s);
        b += w * (t - s) * d2;
        db += w * d2;
      }
      CHECK(v[static_cast<std::size_t>(k + 2)][0] == doctest::Approx(b).epsilon(1e-12).scale(1.0));
      CHECK(v[static_cast<std::size_t>(k + 2)][1] == doctest::Approx(db).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("C1 Hermite functions: derivative columns match finite differences") {
  const poly::C1ReferenceBasis basis(6);
  const double h = 1e-5, t = 0.31;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double fd1 = (basis.eval(i, t + h)[0] - basis.eval(i, t - h)[0]) / (2 * h);
    const double fd2 = (basis.eval(i, t + h)[1] - basis.eval(i, t - h)[1]) / (2 * h);
    CHECK(basis.eval(i, t)[1] == doctest::Approx(fd1).epsilon(1e-8));
    CHECK(basis.eval(i, t)[2] == doctest::Approx(fd2).epsilon(1e-8));
  }
}

TEST_CASE("Gauss-Lobatto Lagrange basis reproduces polynomials of degree p") {
  const int p = 7;
  const poly::GaussLobattoBasis gl(p);
  auto q = [](double t) { return 1.0 - 2.0 * t + 0.5 * std::pow(t, 5) + 0.25 * std::pow(t, 7); };
  auto dq = [](double t) { return -2.0 + 2.5 * std::pow(t, 4) + 1.75 * std::pow(t, 6); };
  std::vector<double> val(gl.size()), der(gl.size());
  for (double t : {-0.9, -0.2, 0.33, 0.77}) {
    gl.eval_all(t, val, der);
    double v = 0.0, d = 0.0;
    for (std::size_t i = 0; i < gl.size(); ++i) {
      v += q(gl.nodes()[i]) * val[i];
      d += q(gl.nodes()[i]) * der[i];
    }
    CHECK(v == doctest::Approx(q(t)).epsilon(1e-13));
    CHECK(d == doctest::Approx(dq(t)).epsilon(1e-11));
  }
}

TEST_CASE("invalid degrees are rejected") {
  CHECK_THROWS_AS(poly::C1ReferenceBasis(2), std::invalid_argument);
  CHECK_THROWS_AS(poly::GaussLobattoBasis(0), std::invalid_argument);
  CHECK_THROWS(poly::gauss_lobatto_rule(1));
}
