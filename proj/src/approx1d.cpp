#include "sblfem/approx1d.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "sblfem/linsolve.hpp"
#include "sblfem/polybasis.hpp"

namespace sblfem::approx1d {

// ---------------------------------------------------------------- interpolant

fem1d::DiscreteField1D interpolate_c1(const ElementJetFn& w, const mesh::SblMesh1D& mesh, int p) {
  if (p < 3) throw std::invalid_argument("interpolate_c1: p must be >= 3");
  const fem1d::DofMap1D dofs(mesh.num_elements(), p);
  std::vector<double> coeffs(dofs.num_total(), 0.0);
  const std::size_t n = mesh.num_elements();

  // Nodal data; interior nodes take the value from the element on their left.
  for (std::size_t i = 0; i <= n; ++i) {
    const std::size_t j = i == 0 ? 0 : i - 1;
    const Jet v = w(j, mesh.nodes[i]);
    coeffs[2 * i] = v[0];
    coeffs[2 * i + 1] = v[1];
  }
  const double scale = mesh.eps > 0.0 ? mesh.eps : 0.0;
  std::vector<double> lp(static_cast<std::size_t>(p) + 1), ldp(static_cast<std::size_t>(p) + 1);
  for (std::size_t j = 0; j < n; ++j) {
    const double a = mesh.nodes[j], h = mesh.width(j);
    const poly::IntervalRule rule = fem1d::element_rule(mesh, j, scale, p + 6);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double x = rule.points[q];
      const double t = 2.0 * (x - a) / h - 1.0;
      const double wt = rule.weights[q] * 2.0 / h;  // dt = (2/h) dx
      const double w2 = 0.25 * h * h * w(j, x)[2];  // d^2 w / dt^2
      poly::legendre_table(p, t, lp, ldp);
      for (int k = 2; k <= p - 2; ++k) {
        const double bk2 = std::sqrt((2.0 * k + 1.0) / 2.0) * lp[static_cast<std::size_t>(k)];
        coeffs[dofs.global(j, static_cast<std::size_t>(k + 2))] += wt * w2 * bk2;
      }
    }
  }
  return fem1d::DiscreteField1D(mesh, p, std::move(coeffs));
}

fem1d::DiscreteField1D interpolate_c1(const JetFn& w, const mesh::SblMesh1D& mesh, int p) {
  return interpolate_c1(element_agnostic(w), mesh, p);
}

fem1d::DiscreteField1D interpolate_c1_fd(const ScalarFn& w, const mesh::SblMesh1D& mesh, int p) {
  auto jet = [w, &mesh](std::size_t j, double x) {
    const double a = mesh.nodes[j], b = mesh.nodes[j + 1];
    const double hf = 1e-5 * (b - a);
    // Stencil x0 + {0..4} hf shifted to stay inside [a, b].
    double x0 = x - 2.0 * hf;
    if (x0 < a) x0 = a;
    if (x0 + 4.0 * hf > b) x0 = b - 4.0 * hf;
    double f[5];
    for (int i = 0; i < 5; ++i) f[i] = w(x0 + i * hf);
    const double s = (x - x0) / hf;  // position of x in stencil units
    // Derivatives of the degree-4 interpolant through the stencil at s.
    double d1 = 0.0, d2 = 0.0;
    for (int i = 0; i < 5; ++i) {
      // Lagrange basis l_i(s) and its first two derivatives by brute force.
      double l = 1.0, dl = 0.0, ddl = 0.0;
      for (int m = 0; m < 5; ++m) {
        if (m == i) continue;
        const double den = i - m;
        ddl = (ddl * (s - m) + 2.0 * dl) / den;
        dl = (dl * (s - m) + l) / den;
        l = l * (s - m) / den;
      }
      d1 += f[i] * dl;
      d2 += f[i] * ddl;
    }
    return Jet{w(x), d1 / hf, d2 / (hf * hf), 0.0, 0.0};
  };
  return interpolate_c1(ElementJetFn(jet), mesh, p);
}

// ---------------------------------------------------------------- smooth projection

LegendrePolynomial::LegendrePolynomial(int p, std::vector<double> coeffs) : p_(p), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != static_cast<std::size_t>(p + 1))
    throw std::invalid_argument("LegendrePolynomial: need p + 1 coefficients");
}

void LegendrePolynomial::basis(int p, double x, std::span<Jet> out) {
  const double t = 2.0 * x - 1.0;
  std::vector<double> lp(static_cast<std::size_t>(p) + 1), ldp(lp.size()), lddp(lp.size());
  poly::legendre_table(p, t, lp, ldp, lddp);
  out[0] = {1.0 - x, -1.0, 0.0, 0.0, 0.0};
  out[1] = {x, 1.0, 0.0, 0.0, 0.0};
  for (int k = 2; k <= p; ++k) {
    const auto K = static_cast<std::size_t>(k);
    out[K] = {lp[K] - lp[K - 2], 2.0 * (ldp[K] - ldp[K - 2]), 4.0 * (lddp[K] - lddp[K - 2]), 0.0, 0.0};
  }
}

Jet LegendrePolynomial::eval(double x) const {
  std::vector<Jet> phi(coeffs_.size());
  basis(p_, x, phi);
  Jet out{};
  for (std::size_t i = 0; i < phi.size(); ++i) out = out + coeffs_[i] * phi[i];
  return out;
}

JetFn LegendrePolynomial::as_function() const {
  return [self = *this](double x) { return self.eval(x); };
}

LegendrePolynomial project_smooth(const JetFn& us, const ScalarFn& b, const ScalarFn& c, int p) {
  if (p < 2) throw std::invalid_argument("project_smooth: p must be >= 2");
  const std::size_t nb = static_cast<std::size_t>(p) + 1;
  const std::size_t n = nb - 2;
  const poly::IntervalRule rule = poly::map_rule(poly::gauss_rule(p + 20), 0.0, 1.0);
  std::vector<double> a(n * n, 0.0), rhs(n, 0.0);
  std::vector<Jet> phi(nb);
  const double u0 = us(0.0)[0], u1 = us(1.0)[0];
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const double x = rule.points[q], wq = rule.weights[q];
    LegendrePolynomial::basis(p, x, phi);
    const double bx = b(x), cx = c(x);
    const Jet u = us(x);
    // Target minus the boundary lift u0 (1-x) + u1 x.
    const double r0 = u[0] - u0 * phi[0][0] - u1 * phi[1][0];
    const double r1 = u[1] - u0 * phi[0][1] - u1 * phi[1][1];
    for (std::size_t i = 0; i < n; ++i) {
      const Jet& vi = phi[i + 2];
      rhs[i] += wq * (bx * r1 * vi[1] + cx * r0 * vi[0]);
      for (std::size_t j = 0; j < n; ++j) a[i * n + j] += wq * (bx * phi[j + 2][1] * vi[1] + cx * phi[j + 2][0] * vi[0]);
    }
  }
  std::vector<linalg::Triplet> t;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) t.push_back({i, j, a[i * n + j]});
  const linalg::SparseSystem sys{linalg::CsrMatrix::from_triplets(n, n, std::move(t)), rhs, true};
  const std::vector<double> x = linalg::solve_direct(sys);
  std::vector<double> coeffs(nb);
  coeffs[0] = u0;
  coeffs[1] = u1;
  std::copy(x.begin(), x.end(), coeffs.begin() + 2);
  return LegendrePolynomial(p, std::move(coeffs));
}

double b0_norm(const JetFn& w, const ScalarFn& b, const ScalarFn& c) {
  const poly::IntervalRule rule = poly::map_rule(poly::gauss_rule(60), 0.0, 1.0);
  double s = 0.0;
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const double x = rule.points[q];
    const Jet v = w(x);
    s += rule.weights[q] * (b(x) * v[1] * v[1] + c(x) * v[0] * v[0]);
  }
  return std::sqrt(s);
}

// ---------------------------------------------------------------- correctors

Corrector corrector(double tau, CorrectorKind kind) {
  if (!(tau > 0.0)) throw std::invalid_argument("corrector: tau must be positive");
  Corrector ch;
  ch.tau = tau;
  ch.kind = kind;
  if (kind == CorrectorKind::Chi0)
    ch.coeffs = {0.0, 0.0, -1.0 / tau, 1.0 / (tau * tau)};
  else
    ch.coeffs = {0.0, 0.0, 3.0 / (tau * tau), -2.0 / (tau * tau * tau)};
  return ch;
}

Jet Corrector::eval(double x) const {
  const auto& a = coeffs;
  return {a[0] + x * (a[1] + x * (a[2] + x * a[3])), a[1] + x * (2.0 * a[2] + 3.0 * x * a[3]), 2.0 * a[2] + 6.0 * x * a[3],
          6.0 * a[3], 0.0};
}

double Corrector::seminorm(int k) const {
  if (k < 0 || k > 3) throw std::invalid_argument("Corrector::seminorm: k must be 0..3");
  // Integrand has degree <= 6: 4 Gauss points are exact.
  const poly::IntervalRule rule = poly::map_rule(poly::gauss_rule(4), 0.0, tau);
  double s = 0.0;
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const double v = eval(rule.points[q])[static_cast<std::size_t>(k)];
    s += rule.weights[q] * v * v;
  }
  return std::sqrt(s);
}

// ---------------------------------------------------------------- special representative

SpecialRepresentative special_representative(const fem1d::ProblemSpec1D& problem, double kappa, int p) {
  if (!problem.exact || !problem.exact->parts)
    throw std::invalid_argument("special_representative: problem '" + problem.name + "' has no decomposition");
  const mesh::SblMesh1D mesh = mesh::build_mesh_1d(kappa, p, problem.eps);
  if (!(kappa * p * problem.eps < 1.0 / 3.0))
    throw std::invalid_argument("special_representative: needs kappa*p*eps < 1/3 (layer elements present)");
  const double tau = mesh.tau;
  const JetFn u = problem.exact->u;
  const LegendrePolynomial usp = project_smooth(problem.exact->parts->smooth, problem.b, problem.c, p);
  const fem1d::DiscreteField1D ip = interpolate_c1(u, mesh, p);

  const Jet dl = usp.eval(tau) - u(tau);
  const Jet dr = usp.eval(1.0 - tau) - u(1.0 - tau);
  const Corrector c0 = corrector(tau, CorrectorKind::Chi0), c1 = corrector(tau, CorrectorKind::Chi1);

  ElementJetFn piecewise = [=](std::size_t j, double x) -> Jet {
    if (j == 1) return usp.eval(x);
    Jet v = ip.jet_on_element(j, x);
    if (j == 0) return v + dl[1] * c0.eval(x) + dl[0] * c1.eval(x);
    // Mirror image: chi(1 - x) with odd derivatives flipped.
    const Jet a = c0.eval(1.0 - x), b = c1.eval(1.0 - x);
    const Jet ma{a[0], -a[1], a[2], -a[3], 0.0}, mb{b[0], -b[1], b[2], -b[3], 0.0};
    return v - dr[1] * ma + dr[0] * mb;
  };

  // Same function in the C1 coefficient representation. Correctors are
  // cubics, so on layer elements they only change nodal data.
  std::vector<double> coeffs = ip.coefficients();
  const fem1d::DofMap1D& dofs = ip.dofs();
  const Jet at_l = usp.eval(tau), at_r = usp.eval(1.0 - tau);
  coeffs[2] = at_l[0];
  coeffs[3] = at_l[1];
  coeffs[4] = at_r[0];
  coeffs[5] = at_r[1];
  // Coarse-element bubbles of u_{S,p}: a_k = int (d^2/dt^2 u_{S,p}) b_k'' dt, exact with p+1 points.
  {
    const double a = mesh.nodes[1], h = mesh.width(1);
    const poly::IntervalRule rule = poly::map_rule(poly::gauss_rule(p + 1), -1.0, 1.0);
    std::vector<double> lp(static_cast<std::size_t>(p) + 1), ldp(lp.size());
    for (int k = 2; k <= p - 2; ++k) coeffs[dofs.global(1, static_cast<std::size_t>(k + 2))] = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double t = rule.points[q];
      const double w2 = 0.25 * h * h * usp.eval(a + 0.5 * h * (t + 1.0))[2];
      poly::legendre_table(p, t, lp, ldp);
      for (int k = 2; k <= p - 2; ++k)
        coeffs[dofs.global(1, static_cast<std::size_t>(k + 2))] +=
            rule.weights[q] * w2 * std::sqrt((2.0 * k + 1.0) / 2.0) * lp[static_cast<std::size_t>(k)];
    }
  }
  return {fem1d::DiscreteField1D(mesh, p, std::move(coeffs)), std::move(piecewise), usp, tau};
}

// ---------------------------------------------------------------- inequalities

InverseRatio check_inverse_inequality(std::span<const double> legendre_coeffs, double a, double b, int k) {
  const int p = static_cast<int>(legendre_coeffs.size()) - 1;
  if (p < 0 || k < 0) throw std::invalid_argument("check_inverse_inequality: bad degree");
  if (k > p) return {0.0, 0.0};
  const double len = b - a;
  const poly::QuadratureRule rule = poly::gauss_rule(p + 1);
  std::vector<double> lp(static_cast<std::size_t>(p) + 1), ldp(lp.size()), lddp(lp.size());
  double s0 = 0.0, sk = 0.0;
  // k-th derivative by repeated differentiation of the Legendre expansion:
  // (2n+1) P_n = P_{n+1}' - P_{n-1}' gives the derivative's coefficients.
  std::vector<double> dk(legendre_coeffs.begin(), legendre_coeffs.end());
  for (int m = 0; m < k; ++m) {
    std::vector<double> d(dk.size(), 0.0);
    for (int n = static_cast<int>(dk.size()) - 1; n >= 1; --n) {
      // derivative of P_n = sum over j = n-1, n-3, ... of (2j+1) P_j
      for (int j = n - 1; j >= 0; j -= 2) d[static_cast<std::size_t>(j)] += (2.0 * j + 1.0) * dk[static_cast<std::size_t>(n)];
    }
    dk = std::move(d);
  }
  for (std::size_t q = 0; q < rule.size(); ++q) {
    poly::legendre_table(p, rule.points[q], lp, ldp, lddp);
    double v = 0.0, vk = 0.0;
    for (std::size_t n = 0; n < lp.size(); ++n) {
      v += legendre_coeffs[n] * lp[n];
      vk += dk[n] * lp[n];
    }
    s0 += rule.weights[q] * v * v;
    sk += rule.weights[q] * vk * vk;
  }
  // Physical: ||q||_0^2 = (len/2) s0, |q|_k^2 = (2/len)^{2k} (len/2) sk.
  const double norm0 = std::sqrt(0.5 * len * s0);
  const double normk = std::pow(2.0 / len, k) * std::sqrt(0.5 * len * sk);
  if (norm0 == 0.0) return {0.0, 0.0};
  double falling = 1.0;
  for (int i = 0; i < k; ++i) falling *= (p - i);
  const double scale = std::pow(len, -k) * norm0;
  return {normk / (std::pow(static_cast<double>(p), 2 * k) * scale), normk / (falling * falling * scale)};
}

InverseSweep inverse_inequality_sweep(int p, int k, int n, std::uint64_t seed, double a, double b) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  InverseSweep out{p, k, 0.0, 0.0};
  std::vector<double> c(static_cast<std::size_t>(p) + 1);
  for (int s = 0; s < n; ++s) {
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = normal(rng) * std::sqrt((2.0 * i + 1.0) / 2.0);
    const InverseRatio r = check_inverse_inequality(c, a, b, k);
    out.max_markov = std::max(out.max_markov, r.markov);
    out.max_literal = std::max(out.max_literal, r.literal);
  }
  return out;
}

ReferenceCheck reference_interval_interp_check(const JetFn& v, int p, double c_v, double k, double h) {
  const mesh::SblMesh1D ref = mesh::mesh_from_nodes({-1.0, 1.0});
  const fem1d::DiscreteField1D iv = interpolate_c1(v, ref, p);
  const fem1d::SobolevParts e = fem1d::sobolev_parts(
      [&](std::size_t j, double x) { return v(x) - iv.jet_on_element(j, x); }, ref, {0}, 0.0);
  return {std::sqrt(e.l2 * e.l2 + e.h1 * e.h1 + e.h2 * e.h2), c_v * std::sqrt(k) * h};
}

LayerTerms scaled_layer_errors(const JetFn& u, const mesh::SblMesh1D& mesh, int p) {
  const fem1d::DiscreteField1D iu = interpolate_c1(u, mesh, p);
  const fem1d::SobolevParts e = fem1d::sobolev_parts(
      [&](std::size_t j, double x) { return u(x) - iu.jet_on_element(j, x); }, mesh, {0}, mesh.eps);
  const double h = mesh.width(0);
  return {e.l2 / h, e.h1, h * e.h2};
}

}  // namespace sblfem::approx1d
