#include "sblfem/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sblfem::problems {

using std::numbers::pi;

namespace {

Jet smooth_sin2(double x) {
  // sin^2(pi x) = (1 - cos(2 pi x)) / 2
  Jet j{};
  const double a = 2.0 * pi;
  j[0] = 0.5 * (1.0 - std::cos(a * x));
  double an = 1.0;
  for (int n = 1; n <= 4; ++n) {
    an *= a;
    j[static_cast<std::size_t>(n)] = -0.5 * an * std::cos(a * x + n * pi / 2);
  }
  return j;
}

Jet poly_u(double x) {
  return {x * x * (1 - x) * (1 - x), 2 * x - 6 * x * x + 4 * x * x * x, 2 - 12 * x + 12 * x * x, -12 + 24 * x,
          24.0};
}

/// eps * phi(x) * exp(-x/eps) with phi(x) = phi0 + phi1 x + (x/eps)^2.
struct LayerProfile {
  double eps, phi0, phi1;

  Jet operator()(double x) const {
    const double e = std::exp(-x / eps);
    Jet out{};
    if (e == 0.0) return out;
    const double ph[3] = {phi0 + phi1 * x + (x / eps) * (x / eps), phi1 + 2.0 * x / (eps * eps), 2.0 / (eps * eps)};
    const double m = -1.0 / eps;
    // Leibniz rule; phi''' = 0.
    static constexpr double binom[5][3] = {{1, 0, 0}, {1, 1, 0}, {1, 2, 1}, {1, 3, 3}, {1, 4, 6}};
    for (int n = 0; n <= 4; ++n) {
      double s = 0.0;
      for (int k = 0; k <= std::min(n, 2); ++k) s += binom[n][k] * ph[k] * std::pow(m, n - k);
      out[static_cast<std::size_t>(n)] = eps * s * e;
    }
    return out;
  }
};

LayerProfile make_layer(double eps) {
  const double E = std::exp(-1.0 / eps);
  const double ie2 = 1.0 / (eps * eps);
  // (1+E) phi0 + E phi1 = -E/eps^2
  // (E-1) phi0 + (eps - eps E + E) phi1 = E (2/eps - 1/eps^2)
  const double a11 = 1.0 + E, a12 = E, r1 = -E * ie2;
  const double a21 = E - 1.0, a22 = eps - eps * E + E, r2 = E * (2.0 / eps - ie2);
  const double det = a11 * a22 - a12 * a21;
  return {eps, (r1 * a22 - a12 * r2) / det, (a11 * r2 - a21 * r1) / det};
}

Jet mirror(const Jet& j) { return {j[0], -j[1], j[2], -j[3], j[4]}; }

fem1d::ProblemSpec1D from_exact(std::string name, double eps, ScalarFn b, ScalarFn b_prime, ScalarFn c,
                                fem1d::ExactSolution1D exact) {
  fem1d::ProblemSpec1D prob;
  prob.name = std::move(name);
  prob.eps = eps;
  prob.b = b;
  prob.c = c;
  const JetFn u = exact.u;
  prob.f = [u, b, b_prime, c, eps](double x) {
    const Jet j = u(x);
    return eps * eps * j[4] - b_prime(x) * j[1] - b(x) * j[2] + c(x) * j[0];
  };
  prob.exact = std::move(exact);
  return prob;
}

}  // namespace

std::vector<std::string> catalog_1d_names() { return {"POLY", "LAYERED", "VARCOEF"}; }

ScalarFn catalog_b_prime(const std::string& name) {
  if (name == "VARCOEF") return [](double x) { return x; };
  return [](double) { return 0.0; };
}

JetFn layered_left_part(double eps) { return make_layer(eps); }

JetFn exponential_layer(double eps) {
  return [eps](double x) {
    const double e = eps * std::exp(-x / eps);
    const double m = -1.0 / eps;
    return Jet{e, e * m, e * m * m, e * m * m * m, e * m * m * m * m};
  };
}

fem1d::ProblemSpec1D catalog_1d(const std::string& name, double eps) {
  if (!(eps > 0.0) || eps > 1.0)
    throw std::invalid_argument("catalog_1d: eps must lie in (0, 1], got " + std::to_string(eps));
  auto one = [](double) { return 1.0; };
  const ScalarFn bp = catalog_b_prime(name);

  if (name == "POLY") {
    fem1d::ExactSolution1D ex{poly_u, std::nullopt};
    return from_exact(name, eps, one, bp, one, std::move(ex));
  }
  if (name == "LAYERED" || name == "VARCOEF") {
    const LayerProfile left = make_layer(eps);
    auto right = [left](double x) { return mirror(left(1.0 - x)); };
    fem1d::Decomposition1D parts{smooth_sin2, left, right, [](double) { return Jet{}; }};
    auto u = [left, right](double x) { return smooth_sin2(x) + left(x) + right(x); };
    fem1d::ExactSolution1D ex{u, parts};
    if (name == "LAYERED") return from_exact(name, eps, one, bp, one, std::move(ex));
    return from_exact(
        name, eps, [](double x) { return 1.0 + 0.5 * x * x; }, bp,
        [](double x) { return 2.0 + 0.5 * std::sin(pi * x); }, std::move(ex));
  }
  throw std::invalid_argument("catalog_1d: unknown problem '" + name + "' (known: POLY, LAYERED, VARCOEF)");
}

double catalog_residual(const fem1d::ProblemSpec1D& problem, const ScalarFn& b_prime) {
  if (!problem.exact) throw std::invalid_argument("catalog_residual: problem has no exact solution");
  double fmax = 0.0, worst = 0.0;
  const double e2 = problem.eps * problem.eps;
  for (int i = 0; i < 200; ++i) {
    const double x = i / 199.0;
    const Jet u = problem.exact->u(x);
    const double f = problem.f(x);
    fmax = std::max(fmax, std::abs(f));
    const double lhs = e2 * u[4] - b_prime(x) * u[1] - problem.b(x) * u[2] + problem.c(x) * u[0];
    worst = std::max(worst, std::abs(lhs - f));
  }
  return fmax > 0.0 ? worst / fmax : worst;
}

// ---------------------------------------------------------------- 2D

namespace {

/// I1(z)/z * e^{-z}, finite at z = 0.
double scaled_i1_over_z(double z) {
  if (z < 1e-6) return (0.5 + z * z / 16.0) * std::exp(-z);
  return scaled_bessel_i(1, z) / z;
}

}  // namespace

double BesselDisk::radial(int i, double r) const {
  const double s = std::sqrt(i == 1 ? lambda1 : lambda2);
  return scaled_bessel_i(0, s * r) / scaled_bessel_i(0, s) * std::exp(s * (r - 1.0));
}

double BesselDisk::radial_d(int i, double r) const {
  const double s = std::sqrt(i == 1 ? lambda1 : lambda2);
  return s * scaled_bessel_i(1, s * r) / scaled_bessel_i(0, s) * std::exp(s * (r - 1.0));
}

double BesselDisk::radial_dd(int i, double r) const {
  // I0'' = I0 - I1/z
  const double s = std::sqrt(i == 1 ? lambda1 : lambda2);
  const double z = s * r;
  return s * s * (scaled_bessel_i(0, z) - scaled_i1_over_z(z)) / scaled_bessel_i(0, s) * std::exp(s * (r - 1.0));
}

double BesselDisk::u(double r) const { return f0 / c + coef_layer * radial(1, r) + coef_smooth * radial(2, r); }

double BesselDisk::du(double r) const { return coef_layer * radial_d(1, r) + coef_smooth * radial_d(2, r); }

double BesselDisk::laplace_u(double r) const {
  return coef_layer * lambda1 * radial(1, r) + coef_smooth * lambda2 * radial(2, r);
}

BesselDisk bessel_disk(double eps, double b, double c, double f0) {
  if (!(eps > 0.0) || eps > 1.0) throw std::invalid_argument("bessel_disk: eps must lie in (0, 1]");
  if (!(b > 0.0) || !(c > 0.0)) throw std::invalid_argument("bessel_disk: b and c must be positive");
  const double disc = b * b - 4.0 * eps * eps * c;
  if (!(disc > 0.0))
    throw std::invalid_argument(
        "bessel_disk: b^2 <= 4 eps^2 c, the characteristic roots are not real and distinct; "
        "the radial Bessel solution needs b^2 > 4 eps^2 c");
  BesselDisk d{eps, b, c, f0, 0.0, 0.0, 0.0, 0.0};
  d.lambda1 = (b + std::sqrt(disc)) / (2.0 * eps * eps);
  d.lambda2 = c / (eps * eps * d.lambda1);
  // u(1) = 0 and u'(1) = 0 with R_i(1) = 1.
  const double d1 = d.radial_d(1, 1.0), d2 = d.radial_d(2, 1.0);
  d.coef_layer = -(f0 / c) * d2 / (d2 - d1);
  d.coef_smooth = (f0 / c) * d1 / (d2 - d1);
  return d;
}

namespace {

fem2d::Value2 radial_value(double v, double dr, double x, double y) {
  const double r = std::hypot(x, y);
  if (r < 1e-14) return {v, 0.0, 0.0};
  return {v, dr * x / r, dr * y / r};
}

}  // namespace

fem2d::ProblemSpec2D bessel_exact_disk(double eps, double b, double c, double f0) {
  const BesselDisk d = bessel_disk(eps, b, c, f0);
  fem2d::ProblemSpec2D prob;
  prob.name = "BESSEL";
  prob.eps = eps;
  prob.b = b;
  prob.c = c;
  prob.f = [f0](double, double) { return f0; };

  fem2d::ExactSolution2D ex;
  ex.u = [d](double x, double y) {
    const double r = std::hypot(x, y);
    return radial_value(d.u(r), d.du(r), x, y);
  };
  ex.w = [d](double x, double y) {
    const double r = std::hypot(x, y);
    const double wr = d.eps * (d.coef_layer * d.lambda1 * d.radial_d(1, r) + d.coef_smooth * d.lambda2 * d.radial_d(2, r));
    return radial_value(d.eps * d.laplace_u(r), wr, x, y);
  };
  ex.laplace_u = [d](double x, double y) { return d.laplace_u(std::hypot(x, y)); };

  fem2d::Decomposition2D parts;
  parts.u_layer = [d](double x, double y) {
    const double r = std::hypot(x, y);
    return radial_value(d.coef_layer * d.radial(1, r), d.coef_layer * d.radial_d(1, r), x, y);
  };
  parts.u_smooth = [d](double x, double y) {
    const double r = std::hypot(x, y);
    return radial_value(d.f0 / d.c + d.coef_smooth * d.radial(2, r), d.coef_smooth * d.radial_d(2, r), x, y);
  };
  parts.w_layer = [d](double x, double y) {
    const double r = std::hypot(x, y);
    const double k = d.eps * d.coef_layer * d.lambda1;
    return radial_value(k * d.radial(1, r), k * d.radial_d(1, r), x, y);
  };
  parts.w_smooth = [d](double x, double y) {
    const double r = std::hypot(x, y);
    const double k = d.eps * d.coef_smooth * d.lambda2;
    return radial_value(k * d.radial(2, r), k * d.radial_d(2, r), x, y);
  };
  ex.parts = parts;
  prob.exact = ex;
  return prob;
}

fem2d::ProblemSpec2D polynomial_disk(double eps, double b, double c) {
  fem2d::ProblemSpec2D prob;
  prob.name = "POLY_DISK";
  prob.eps = eps;
  prob.b = b;
  prob.c = c;
  prob.f = [eps, b, c](double x, double y) {
    const double r2 = x * x + y * y;
    return 64.0 * eps * eps - b * (16.0 * r2 - 8.0) + c * (1.0 - r2) * (1.0 - r2);
  };
  fem2d::ExactSolution2D ex;
  ex.u = [](double x, double y) {
    const double s = 1.0 - x * x - y * y;
    return fem2d::Value2{s * s, -4.0 * s * x, -4.0 * s * y};
  };
  ex.w = [eps](double x, double y) {
    return fem2d::Value2{eps * (16.0 * (x * x + y * y) - 8.0), 32.0 * eps * x, 32.0 * eps * y};
  };
  ex.laplace_u = [](double x, double y) { return 16.0 * (x * x + y * y) - 8.0; };
  prob.exact = ex;
  return prob;
}

}  // namespace sblfem::problems
