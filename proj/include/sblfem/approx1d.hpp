#pragma once

// Analysis-side 1D constructions: the C1 interpolant I_p, the smooth-part
// projection u_{S,p}, the cubic correctors chi_0 / chi_1, the special
// representative u^_p, and the inverse / reference-interval inequalities.

#include <cstdint>
#include <span>
#include <vector>

#include "sblfem/fem1d.hpp"
#include "sblfem/function.hpp"
#include "sblfem/meshing.hpp"

namespace sblfem::approx1d {

/// C1 interpolant: nodal values and slopes of w, and on each element the
/// bubbles make (I_p w)'' the Legendre truncation of w'' of degree p-2.
/// Reads derivatives 0..2 of w. Element integrals use the graded rule of
/// fem1d::element_rule at scale mesh.eps (plain Gauss when mesh.eps == 0)
/// with p+6 points per piece.
fem1d::DiscreteField1D interpolate_c1(const ElementJetFn& w, const mesh::SblMesh1D& mesh, int p);
fem1d::DiscreteField1D interpolate_c1(const JetFn& w, const mesh::SblMesh1D& mesh, int p);

/// Same, with w' and w'' from 5-point central differences (one-sided near
/// element ends) with step 1e-5 times the element width.
fem1d::DiscreteField1D interpolate_c1_fd(const ScalarFn& w, const mesh::SblMesh1D& mesh, int p);

/// Polynomial on [0, 1] in the basis 1-x, x, P_k(2x-1) - P_{k-2}(2x-1) (k = 2..p).
class LegendrePolynomial {
 public:
  LegendrePolynomial() = default;
  LegendrePolynomial(int p, std::vector<double> coeffs);

  int degree() const { return p_; }
  const std::vector<double>& coefficients() const { return coeffs_; }
  /// Derivatives 0..2 at x.
  Jet eval(double x) const;
  JetFn as_function() const;

  /// Values of the basis functions (derivatives 0..2) at x.
  static void basis(int p, double x, std::span<Jet> out);

 private:
  int p_ = 1;
  std::vector<double> coeffs_;
};

/// u_{S,p}: degree-p polynomial with u_{S,p} = u_S at 0 and 1 and
/// B0(u_{S,p} - u_S, v) = 0 for all v in P_p vanishing at 0 and 1, where
/// B0(w, v) = <b w', v'> + <c w, v>.
LegendrePolynomial project_smooth(const JetFn& us, const ScalarFn& b, const ScalarFn& c, int p);

/// sqrt(B0(w, w)) on (0, 1).
double b0_norm(const JetFn& w, const ScalarFn& b, const ScalarFn& c);

enum class CorrectorKind { Chi0, Chi1 };

/// chi_0(x) = x^2 (x - tau) / tau^2,  chi_1(x) = 3 (x/tau)^2 - 2 (x/tau)^3.
struct Corrector {
  double tau = 0.0;
  CorrectorKind kind = CorrectorKind::Chi0;
  std::array<double, 4> coeffs{};  ///< monomial coefficients, degree 0..3

  /// Derivatives 0..3 at x.
  Jet eval(double x) const;
  /// |chi|_{k,(0,tau)}, k = 0..3 (k = 0 is the L2 norm).
  double seminorm(int k) const;
};

Corrector corrector(double tau, CorrectorKind kind);

struct SpecialRepresentative {
  fem1d::DiscreteField1D field;  ///< u^_p in the discrete C1 space
  ElementJetFn piecewise;        ///< u^_p evaluated from its defining formula
  LegendrePolynomial projection; ///< u_{S,p}
  double tau = 0.0;
};

/// u^_p = I_p u + chi_0 (u_{S,p} - u)'(tau) + chi_1 (u_{S,p} - u)(tau) on (0, tau),
/// u_{S,p} on (tau, 1 - tau), and the mirror image on (1 - tau, 1).
/// Requires a decomposition and kappa p eps < 1/3.
SpecialRepresentative special_representative(const fem1d::ProblemSpec1D& problem, double kappa, int p);

/// Ratios for one polynomial q on D = (a, b), q given by Legendre coefficients
/// on D: markov = |q|_k / (p^{2k} |D|^{-k} ||q||_0), literal uses (p!/(p-k)!)^2.
struct InverseRatio {
  double markov = 0.0;
  double literal = 0.0;
};

InverseRatio check_inverse_inequality(std::span<const double> legendre_coeffs, double a, double b, int k);

struct InverseSweep {
  int p = 0;
  int k = 0;
  double max_markov = 0.0;
  double max_literal = 0.0;
};

/// Largest ratios over n random polynomials of degree p (standard normal
/// coefficients in the L2-orthonormal Legendre basis), mt19937_64(seed).
InverseSweep inverse_inequality_sweep(int p, int k, int n, std::uint64_t seed, double a = 0.0, double b = 1.0);

/// ||v - I_p v||_{2,(-1,1)} for a single reference element, and C_v K^{1/2} h.
struct ReferenceCheck {
  double error = 0.0;
  double bound_scale = 0.0;
};

ReferenceCheck reference_interval_interp_check(const JetFn& v, int p, double c_v, double k, double h);

/// On the left layer element (0, tau): (tau)^{-1}||u - I_p u||_0,
/// |u - I_p u|_1 and tau |u - I_p u|_2.
struct LayerTerms {
  double l2_scaled = 0.0;
  double h1 = 0.0;
  double h2_scaled = 0.0;
};

LayerTerms scaled_layer_errors(const JetFn& u, const mesh::SblMesh1D& mesh, int p);

}  // namespace sblfem::approx1d
