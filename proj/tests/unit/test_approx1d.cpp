#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "sblfem/approx1d.hpp"
#include "sblfem/polybasis.hpp"
#include "sblfem/problems.hpp"

using namespace sblfem;

TEST_CASE("corrector norms against closed-form integrals") {
  for (double tau : {0.3, 1e-4}) {
    const auto c0 = approx1d::corrector(tau, approx1d::CorrectorKind::Chi0);
    const auto c1 = approx1d::corrector(tau, approx1d::CorrectorKind::Chi1);
    // With x = tau s: chi_0 = tau (s^3 - s^2), chi_1 = 3 s^2 - 2 s^3.
    CHECK(c0.seminorm(0) == doctest::Approx(std::sqrt(std::pow(tau, 3) / 105.0)).epsilon(1e-13));
    CHECK(c0.seminorm(1) == doctest::Approx(std::sqrt(2.0 * tau / 15.0)).epsilon(1e-13));
    CHECK(c0.seminorm(2) == doctest::Approx(2.0 / std::sqrt(tau)).epsilon(1e-13));
    CHECK(c1.seminorm(0) == doctest::Approx(std::sqrt(13.0 * tau / 35.0)).epsilon(1e-13));
    CHECK(c1.seminorm(1) == doctest::Approx(std::sqrt(6.0 / (5.0 * tau))).epsilon(1e-13));
    CHECK(c1.seminorm(2) == doctest::Approx(std::sqrt(12.0 / std::pow(tau, 3))).epsilon(1e-13));
  }
}

TEST_CASE("project_smooth agrees with an Eigen solve in a monomial bubble basis") {
  // Oracle: u_{S,p} = l(x) + sum_k a_k x (1-x) x^k with l the linear
  // interpolant of u_S at 0, 1, B0-orthogonality solved densely.
  const int p = 7;
  const double pi = std::numbers::pi;
  const JetFn us = [pi](double x) {
    return Jet{std::cos(2 * x) + x, -2 * std::sin(2 * x) + 1, -4 * std::cos(2 * x), 0.0, 0.0};
  };
  const ScalarFn b = [](double x) { return 1.0 + x * x; };
  const ScalarFn c = [](double x) { return 2.0 + x; };
  const auto usp = approx1d::project_smooth(us, b, c, p);

  const int n = p - 1;
  const auto rule = poly::map_rule(poly::gauss_rule(40), 0.0, 1.0);
  auto phi = [](int k, double x) { return std::array<double, 2>{x * (1 - x) * std::pow(x, k), (k + 1) * std::pow(x, k) - (k + 2) * std::pow(x, k + 1)}; };
  const double u0 = us(0.0)[0], u1 = us(1.0)[0];
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const double x = rule.points[q], w = rule.weights[q];
    const Jet u = us(x);
    const double lv = u0 + (u1 - u0) * x, ld = u1 - u0;
    for (int i = 0; i < n; ++i) {
      const auto pi_ = phi(i, x);
      r(i) += w * (b(x) * (u[1] - ld) * pi_[1] + c(x) * (u[0] - lv) * pi_[0]);
      for (int j = 0; j < n; ++j) {
        const auto pj = phi(j, x);
        a(i, j) += w * (b(x) * pj[1] * pi_[1] + c(x) * pj[0] * pi_[0]);
      }
    }
  }
  const Eigen::VectorXd coef = a.fullPivLu().solve(r);
  (void)pi;
  for (double x : {0.1, 0.5, 0.77}) {
    double ref = u0 + (u1 - u0) * x;
    for (int k = 0; k < n; ++k) ref += coef(k) * phi(k, x)[0];
    CHECK(usp.eval(x)[0] == doctest::Approx(ref).epsilon(1e-9));
  }
}

TEST_CASE("inverse inequality ratios never exceed the generalized eigenvalue bound") {
  // sup |q|_k / ||q||_0 over P_p on (0, 1) = sqrt(lambda_max(K_k, M)).
  for (int k : {1, 2}) {
    for (int p : {4, 9}) {
      const auto rule = poly::gauss_rule(p + 2);
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p + 1, p + 1), kk = m;
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const double t = rule.points[q], w = rule.weights[q] / 2.0;  // dx = dt / 2
        std::vector<double> v(p + 1), d(p + 1), dd(p + 1);
        poly::legendre_table(p, t, v, d, dd);
        for (int i = 0; i <= p; ++i)
          for (int j = 0; j <= p; ++j) {
            m(i, j) += w * v[i] * v[j];
            const double di = k == 1 ? 2 * d[i] : 4 * dd[i], dj = k == 1 ? 2 * d[j] : 4 * dd[j];
            kk(i, j) += w * di * dj;
          }
      }
      Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(kk, m);
      const double sup = std::sqrt(es.eigenvalues().maxCoeff()) / std::pow(p, 2.0 * k);
      const auto sweep = approx1d::inverse_inequality_sweep(p, k, 300, 42);
      CHECK(sweep.max_markov <= sup * (1 + 1e-10));
      CHECK(sweep.max_markov > 0.2 * sup);  // random sampling gets within a modest factor

      // The extremal eigenvector attains the bound.
      const Eigen::VectorXd top = es.eigenvectors().col(p);
      std::vector<double> coeffs(top.data(), top.data() + top.size());
      CHECK(approx1d::check_inverse_inequality(coeffs, 0.0, 1.0, k).markov == doctest::Approx(sup).epsilon(1e-8));
    }
  }
}

TEST_CASE("interpolant from finite differences matches the exact-derivative interpolant") {
  const auto prob = problems::catalog_1d("LAYERED", 1e-2);
  const auto mesh = mesh::build_mesh_1d(1.0, 6, 1e-2);
  const auto exact = approx1d::interpolate_c1(prob.exact->u, mesh, 6);
  const ScalarFn u = [&](double x) { return prob.exact->u(x)[0]; };
  const auto fd = approx1d::interpolate_c1_fd(u, mesh, 6);
  for (double x : {0.01, 0.05, 0.5, 0.97})
    CHECK(fd.evaluate(x) == doctest::Approx(exact.evaluate(x)).epsilon(1e-6).scale(1e-3));
}

TEST_CASE("special representative: nodal data and C1 continuity") {
  const double eps = 1e-4;
  const int p = 5;
  const auto prob = problems::catalog_1d("LAYERED", eps);
  const auto rep = approx1d::special_representative(prob, 1.0, p);
  const double tau = rep.tau;
  CHECK(tau == doctest::Approx(p * eps));
  // At tau the representative carries u_{S,p} data.
  CHECK(rep.field.evaluate(tau) == doctest::Approx(rep.projection.eval(tau)[0]).epsilon(1e-12));
  CHECK(rep.field.evaluate(tau, 1) == doctest::Approx(rep.projection.eval(tau)[1]).epsilon(1e-10));
  // Field and defining formula agree on every element.
  for (std::size_t j = 0; j < 3; ++j) {
    const double x = rep.field.mesh().nodes[j] + 0.3 * rep.field.mesh().width(j);
    CHECK(rep.field.jet_on_element(j, x)[0] == doctest::Approx(rep.piecewise(j, x)[0]).epsilon(1e-10).scale(1e-8));
  }
  CHECK(std::abs(rep.field.evaluate(0.0)) < 1e-14);
  CHECK_THROWS_AS(approx1d::special_representative(prob, 1.0, 4000), std::invalid_argument);
}

TEST_CASE("reference interval interpolation error decays with p") {
  const JetFn v = [](double t) {
    const double e = std::exp(-(1 + t));
    return Jet{e, -e, e, -e, e};
  };
  double prev = 1e300;
  for (int p = 3; p <= 12; ++p) {
    const auto r = approx1d::reference_interval_interp_check(v, p, 2.0, 2.0, 1.0);
    CHECK(r.error < prev);
    prev = r.error;
    CHECK(r.bound_scale == doctest::Approx(2.0 * std::sqrt(2.0)));
  }
}
