#pragma once

// Manufactured and exact test problems: the 1D catalog (POLY, LAYERED,
// VARCOEF) and the radially symmetric exact solutions on the unit disk.

#include <string>
#include <vector>

#include "sblfem/fem1d.hpp"
#include "sblfem/fem2d.hpp"

namespace sblfem::problems {

/// e^{-x} I_nu(x) for nu in {0, 1}, x >= 0. Power series up to x = 30,
/// asymptotic expansion beyond.
double scaled_bessel_i(int nu, double x);

/// Names accepted by catalog_1d.
std::vector<std::string> catalog_1d_names();

/// POLY:     u = x^2 (1-x)^2, b = c = 1.
/// LAYERED:  u = sin^2(pi x) + u_left + u_right, b = c = 1, where
///           u_left(x) = eps * phi(x) * exp(-x/eps), phi(x) = phi0 + phi1 x + (x/eps)^2,
///           u_right(x) = u_left(1 - x), and phi0, phi1 make u, u' vanish at 0 and 1.
/// VARCOEF:  u as in LAYERED, b = 1 + x^2/2, c = 2 + sin(pi x)/2.
/// f is computed from analytic derivatives. Throws std::invalid_argument on
/// an unknown name or eps outside (0, 1].
fem1d::ProblemSpec1D catalog_1d(const std::string& name, double eps);

/// max over 200 points of |eps^2 u'''' - (b u')' + c u - f| / ||f||_inf.
double catalog_residual(const fem1d::ProblemSpec1D& problem, const ScalarFn& b_prime);

/// b'(x) of a catalog entry.
ScalarFn catalog_b_prime(const std::string& name);

/// The clamped layer profile u_left of LAYERED at the given eps (derivatives 0..4).
JetFn layered_left_part(double eps);

/// w(x) = eps * exp(-x/eps) with derivatives 0..4.
JetFn exponential_layer(double eps);

/// Radial exact solution of eps^2 Lap^2 u - b Lap u + c u = f0 on the unit
/// disk with u = du/dn = 0, built from the roots lambda_1 > lambda_2 of
/// eps^2 l^2 - b l + c = 0. Requires b^2 > 4 eps^2 c.
struct BesselDisk {
  double eps, b, c, f0;
  double lambda1, lambda2;
  double coef_layer;   ///< B, multiplying R_1(r) = I0(s1 r) / I0(s1)
  double coef_smooth;  ///< C, multiplying R_2(r) = I0(s2 r) / I0(s2)

  /// Radial profiles R_i and derivatives.
  double radial(int i, double r) const;
  double radial_d(int i, double r) const;
  double radial_dd(int i, double r) const;

  double u(double r) const;
  double du(double r) const;
  double laplace_u(double r) const;
};

BesselDisk bessel_disk(double eps, double b, double c, double f0);

/// Problem with exact solution and decomposition u_layer = B R_1,
/// u_smooth = f0/c + C R_2 (w analogously).
fem2d::ProblemSpec2D bessel_exact_disk(double eps, double b, double c, double f0);

/// u = (1 - r^2)^2 with f = 64 eps^2 - b (16 r^2 - 8) + c (1 - r^2)^2.
fem2d::ProblemSpec2D polynomial_disk(double eps, double b, double c);

}  // namespace sblfem::problems
