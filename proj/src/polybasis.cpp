#include "sblfem/polybasis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sblfem::poly {

namespace {

constexpr double kNewtonTol = 1e-15;
constexpr int kNewtonMaxIter = 100;

}  // namespace

LegendreValue legendre_eval(int n, double x) {
  if (n < 0) throw std::invalid_argument("legendre_eval: negative degree");
  double p0 = 1.0, d0 = 0.0;
  if (n == 0) return {p0, d0};
  double p1 = x, d1 = 1.0;
  for (int k = 1; k < n; ++k) {
    const double p2 = ((2 * k + 1) * x * p1 - k * p0) / (k + 1);
    const double d2 = ((2 * k + 1) * (x * d1 + p1) - k * d0) / (k + 1);
    p0 = p1;
    p1 = p2;
    d0 = d1;
    d1 = d2;
  }
  return {p1, d1};
}

void legendre_table(int n, double x, std::span<double> p, std::span<double> dp,
                    std::span<double> ddp) {
  const bool second = !ddp.empty();
  p[0] = 1.0;
  dp[0] = 0.0;
  if (second) ddp[0] = 0.0;
  if (n == 0) return;
  p[1] = x;
  dp[1] = 1.0;
  if (second) ddp[1] = 0.0;
  // Differentiated recurrence:
  // (k+1) P_{k+1}^{(m)} = (2k+1) (x P_k^{(m)} + m P_k^{(m-1)}) - k P_{k-1}^{(m)}
  for (int k = 1; k < n; ++k) {
    p[k + 1] = ((2 * k + 1) * x * p[k] - k * p[k - 1]) / (k + 1);
    dp[k + 1] = ((2 * k + 1) * (x * dp[k] + p[k]) - k * dp[k - 1]) / (k + 1);
    if (second)
      ddp[k + 1] = ((2 * k + 1) * (x * ddp[k] + 2.0 * dp[k]) - k * ddp[k - 1]) / (k + 1);
  }
}

QuadratureRule gauss_rule(int n) {
  if (n < 1) throw std::invalid_argument("gauss_rule: need at least one point");
  QuadratureRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  rule.order = 2 * n - 1;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < kNewtonMaxIter; ++it) {
      const auto [pn, dpn] = legendre_eval(n, x);
      const double dx = pn / dpn;
      x -= dx;
      if (std::abs(dx) <= kNewtonTol) break;
    }
    const double dpn = legendre_eval(n, x).derivative;
    const double w = 2.0 / ((1.0 - x * x) * dpn * dpn);
    rule.points[i] = -x;
    rule.points[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.points[n / 2] = 0.0;
  return rule;
}

QuadratureRule gauss_lobatto_rule(int n) {
  if (n < 2) throw std::invalid_argument("gauss_lobatto_rule: need at least two points");
  const int p = n - 1;
  QuadratureRule rule;
  rule.points.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  rule.order = 2 * n - 3;
  std::vector<double> lp(n), ldp(n), lddp(n);
  rule.points.front() = -1.0;
  rule.points.back() = 1.0;
  // Interior nodes are the roots of P_p'; Chebyshev-Gauss-Lobatto initial guesses.
  for (int i = 1; i < (n + 1) / 2; ++i) {
    double x = -std::cos(std::numbers::pi * i / p);
    for (int it = 0; it < kNewtonMaxIter; ++it) {
      legendre_table(p, x, lp, ldp, lddp);
      const double dx = ldp[p] / lddp[p];
      x -= dx;
      if (std::abs(dx) <= kNewtonTol) break;
    }
    rule.points[i] = x;
    rule.points[n - 1 - i] = -x;
  }
  if (n % 2 == 1) rule.points[n / 2] = 0.0;
  for (int i = 0; i < n; ++i) {
    const double pp = legendre_eval(p, rule.points[i]).value;
    rule.weights[i] = 2.0 / (p * (p + 1) * pp * pp);
  }
  return rule;
}

IntervalRule map_rule(const QuadratureRule& ref, double a, double b) {
  IntervalRule out;
  out.points.reserve(ref.size());
  out.weights.reserve(ref.size());
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (std::size_t q = 0; q < ref.size(); ++q) {
    out.points.push_back(mid + half * ref.points[q]);
    out.weights.push_back(half * ref.weights[q]);
  }
  return out;
}

IntervalRule graded_rule(double a, double b, double scale, int n_per_piece, bool grade_left,
                         bool grade_right) {
  const double len = b - a;
  const QuadratureRule ref = gauss_rule(n_per_piece);
  if (!(scale > 0.0) || scale >= 0.25 * len || (!grade_left && !grade_right))
    return map_rule(ref, a, b);

  // Breakpoints in distance-from-end coordinates: 0, s, 2s, 4s, ... up to the
  // midpoint (both ends graded) or the far end (one end graded).
  const double reach = (grade_left && grade_right) ? 0.5 * len : len;
  std::vector<double> offsets{0.0};
  for (double d = scale; d < reach * 0.75; d *= 2.0) offsets.push_back(d);
  offsets.push_back(reach);

  std::vector<double> breaks;
  if (grade_left) {
    for (double d : offsets) breaks.push_back(a + d);
  } else {
    breaks.push_back(a);
  }
  if (grade_right) {
    for (auto it = offsets.rbegin(); it != offsets.rend(); ++it) breaks.push_back(b - *it);
  } else {
    breaks.push_back(b);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end(),
                           [&](double x, double y) { return std::abs(x - y) <= 1e-15 * len; }),
               breaks.end());

  IntervalRule out;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const IntervalRule piece = map_rule(ref, breaks[k], breaks[k + 1]);
    out.points.insert(out.points.end(), piece.points.begin(), piece.points.end());
    out.weights.insert(out.weights.end(), piece.weights.begin(), piece.weights.end());
  }
  return out;
}

C1ReferenceBasis::C1ReferenceBasis(int p) : p_(p) {
  if (p < 3)
    throw std::invalid_argument("C1ReferenceBasis: degree must be >= 3 for C1 elements, got " +
                                std::to_string(p));
}

void C1ReferenceBasis::eval_all(double t, std::span<Jet> out) const {
  // Hermite cubics.
  const double omt = 1.0 - t, opt = 1.0 + t;
  out[0] = {omt * omt * (2.0 + t) / 4.0, -3.0 * (1.0 - t * t) / 4.0, 1.5 * t, 0.0, 0.0};
  out[1] = {omt * omt * opt / 4.0, omt * (-1.0 - 3.0 * t) / 4.0, (6.0 * t - 2.0) / 4.0, 0.0, 0.0};
  out[2] = {opt * opt * (2.0 - t) / 4.0, 3.0 * (1.0 - t * t) / 4.0, -1.5 * t, 0.0, 0.0};
  out[3] = {-opt * opt * omt / 4.0, opt * (-1.0 + 3.0 * t) / 4.0, (6.0 * t + 2.0) / 4.0, 0.0, 0.0};
  if (p_ == 3) return;

  std::vector<double> lp(p_ + 1), ldp(p_ + 1);
  legendre_table(p_, t, lp, ldp);
  for (int k = 2; k <= p_ - 2; ++k) {
    const double s = std::sqrt((2.0 * k + 1.0) / 2.0);
    const double d2 = s * lp[k];
    const double d1 = s * (lp[k + 1] - lp[k - 1]) / (2.0 * k + 1.0);
    const double d0 = s * ((lp[k + 2] - lp[k]) / (2.0 * k + 3.0) - (lp[k] - lp[k - 2]) / (2.0 * k - 1.0)) /
                      (2.0 * k + 1.0);
    out[static_cast<std::size_t>(k + 2)] = {d0, d1, d2, 0.0, 0.0};
  }
}

Jet C1ReferenceBasis::eval(std::size_t i, double t) const {
  std::vector<Jet> all(size());
  eval_all(t, all);
  return all.at(i);
}

GaussLobattoBasis::GaussLobattoBasis(int p) : p_(p) {
  if (p < 1) throw std::invalid_argument("GaussLobattoBasis: degree must be >= 1");
  nodes_ = gauss_lobatto_rule(p + 1).points;
  inv_denominators_.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    double d = 1.0;
    for (std::size_t j = 0; j < nodes_.size(); ++j)
      if (j != i) d *= nodes_[i] - nodes_[j];
    inv_denominators_[i] = 1.0 / d;
  }
}

void GaussLobattoBasis::eval_all(double t, std::span<double> values, std::span<double> derivs) const {
  const std::size_t n = nodes_.size();
  for (std::size_t i = 0; i < n; ++i) {
    double prod = 1.0;
    double dsum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      // d/dt of the running product (t - x_j) ...
      dsum = dsum * (t - nodes_[j]) + prod;
      prod *= t - nodes_[j];
    }
    values[i] = prod * inv_denominators_[i];
    derivs[i] = dsum * inv_denominators_[i];
  }
}

}  // namespace sblfem::poly
