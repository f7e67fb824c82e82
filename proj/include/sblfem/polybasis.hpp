#pragma once

// Orthogonal polynomials, quadrature rules and the 1D reference-element bases
// used throughout: the C1 hierarchical basis (Hermite cubics plus integrated
// Legendre bubbles) and the Gauss-Lobatto Lagrange basis.
//
// All reference quantities live on [-1, 1].

#include <cstddef>
#include <span>
#include <vector>

#include "sblfem/function.hpp"

namespace sblfem::poly {

struct LegendreValue {
  double value;
  double derivative;
};

/// P_n(x) and P_n'(x) by the three-term recurrence.
LegendreValue legendre_eval(int n, double x);

/// Fills p[k], dp[k], ddp[k] with P_k, P_k', P_k'' for k = 0..n. Spans must
/// hold at least n + 1 entries; ddp may be empty if not needed.
void legendre_table(int n, double x, std::span<double> p, std::span<double> dp,
                    std::span<double> ddp = {});

struct QuadratureRule {
  std::vector<double> points;
  std::vector<double> weights;
  int order = 0;  ///< polynomial exactness degree on the reference interval

  std::size_t size() const { return points.size(); }
};

/// n-point Gauss-Legendre rule (exact to degree 2n - 1).
QuadratureRule gauss_rule(int n);

/// n-point Gauss-Lobatto rule, n >= 2 (exact to degree 2n - 3).
QuadratureRule gauss_lobatto_rule(int n);

/// Physical rule on [a, b] built from a reference rule.
struct IntervalRule {
  std::vector<double> points;
  std::vector<double> weights;
};

IntervalRule map_rule(const QuadratureRule& ref, double a, double b);

/// Composite Gauss rule on [a, b] whose sub-intervals are geometrically graded
/// towards the chosen end(s) with smallest piece ~`scale`. Integrands with
/// exp(-dist/scale) layers at those ends are then integrated to near machine
/// precision. With scale >= (b - a) / 4 this is a single n-point Gauss rule.
IntervalRule graded_rule(double a, double b, double scale, int n_per_piece,
                         bool grade_left = true, bool grade_right = true);

/// C1 hierarchical basis of degree p >= 3 on [-1, 1].
///
/// Local ordering: 0 = value at -1, 1 = slope at -1, 2 = value at +1,
/// 3 = slope at +1, then p - 3 bubbles b_k (k = 2..p-2) with
/// b_k'' = sqrt((2k+1)/2) P_k. The bubbles have double zeros at both
/// endpoints and are orthonormal in the H^2 seminorm.
class C1ReferenceBasis {
 public:
  explicit C1ReferenceBasis(int p);

  int degree() const { return p_; }
  std::size_t size() const { return static_cast<std::size_t>(p_) + 1; }
  std::size_t num_bubbles() const { return static_cast<std::size_t>(p_) - 3; }

  /// out[i] = (phi_i, phi_i', phi_i'') at t; out.size() >= size().
  void eval_all(double t, std::span<Jet> out) const;
  Jet eval(std::size_t i, double t) const;

 private:
  int p_;
};

/// Gauss-Lobatto Lagrange basis of degree p >= 1 on [-1, 1].
class GaussLobattoBasis {
 public:
  explicit GaussLobattoBasis(int p);

  int degree() const { return p_; }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<double>& nodes() const { return nodes_; }

  /// values[i] = L_i(t), derivs[i] = L_i'(t).
  void eval_all(double t, std::span<double> values, std::span<double> derivs) const;

 private:
  int p_;
  std::vector<double> nodes_;
  std::vector<double> inv_denominators_;
};

}  // namespace sblfem::poly
