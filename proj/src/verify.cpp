#include "sblfem/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "sblfem/approx1d.hpp"
#include "sblfem/fem1d.hpp"
#include "sblfem/fem2d.hpp"
#include "sblfem/fit.hpp"
#include "sblfem/meshing.hpp"
#include "sblfem/polybasis.hpp"
#include "sblfem/problems.hpp"
#include "sblfem/study.hpp"

namespace sblfem::verify {

namespace {

using approx1d::CorrectorKind;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

Check at_most(std::string name, double value, double bound, std::string detail = {}) {
  return {std::move(name), value <= bound, value, bound, std::move(detail)};
}

Check at_least(std::string name, double value, double bound, std::string detail = {}) {
  return {std::move(name), value >= bound, value, bound, std::move(detail)};
}

Check positive(std::string name, double value, std::string detail = {}) {
  return {std::move(name), value > 0.0, value, 0.0, std::move(detail)};
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi / *lo;
}

const std::vector<double> kEpsDecades{1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
const std::vector<double> kEpsStudy{1e-2, 1e-4, 1e-6, 1e-8};

ElementJetFn difference(const JetFn& u, const fem1d::DiscreteField1D& field) {
  return [&u, &field](std::size_t j, double x) { return u(x) - field.jet_on_element(j, x); };
}

// Polynomial sum c_k P_k(2x - 1) on [0, 1], derivatives 0..2.
JetFn legendre_series(std::vector<double> c) {
  return [c = std::move(c)](double x) {
    const int n = static_cast<int>(c.size()) - 1;
    std::vector<double> p(c.size()), dp(c.size()), ddp(c.size());
    poly::legendre_table(n, 2.0 * x - 1.0, p, dp, ddp);
    Jet out{};
    for (std::size_t k = 0; k < c.size(); ++k) {
      out[0] += c[k] * p[k];
      out[1] += 2.0 * c[k] * dp[k];
      out[2] += 4.0 * c[k] * ddp[k];
    }
    return out;
  };
}

std::vector<double> random_coeffs(std::mt19937_64& rng, int p) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> c(static_cast<std::size_t>(p) + 1);
  for (double& v : c) v = normal(rng);
  return c;
}

// ---------------------------------------------------------------- structural suites

SuiteResult quadrature_suite() {
  SuiteResult s{"QUADRATURE", {}};
  auto moment_error = [](const poly::QuadratureRule& r, int degree) {
    double worst = 0.0;
    for (int d = 0; d <= degree; ++d) {
      double sum = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) sum += r.weights[i] * std::pow(r.points[i], d);
      const double exact = d % 2 ? 0.0 : 2.0 / (d + 1.0);
      worst = std::max(worst, std::abs(sum - exact));
    }
    return worst;
  };
  double gauss = 0.0, lobatto = 0.0;
  for (int n = 1; n <= 32; ++n) gauss = std::max(gauss, moment_error(poly::gauss_rule(n), 2 * n - 1));
  for (int n = 2; n <= 32; ++n) lobatto = std::max(lobatto, moment_error(poly::gauss_lobatto_rule(n), 2 * n - 3));
  s.checks.push_back(at_most("gauss n=1..32 exact to degree 2n-1", gauss, 1e-13));
  s.checks.push_back(at_most("gauss-lobatto n=2..32 exact to degree 2n-3", lobatto, 1e-13));

  double graded = 0.0;
  for (double eps : kEpsDecades) {
    const auto r = poly::graded_rule(0.0, 1.0, eps, 12);
    double sum = 0.0;
    for (std::size_t i = 0; i < r.points.size(); ++i) sum += r.weights[i] * std::exp(-r.points[i] / eps) / eps;
    graded = std::max(graded, std::abs(sum - (1.0 - std::exp(-1.0 / eps))));
  }
  s.checks.push_back(at_most("graded rule integrates exp(-x/eps)/eps, eps = 1e-2..1e-8", graded, 1e-12));
  return s;
}

SuiteResult basis_suite() {
  SuiteResult s{"BASIS", {}};
  // Hermite conditions and bubble double zeros.
  double hermite = 0.0, ortho = 0.0;
  for (int p = 3; p <= 16; ++p) {
    const poly::C1ReferenceBasis basis(p);
    std::vector<Jet> lo(basis.size()), hi(basis.size());
    basis.eval_all(-1.0, lo);
    basis.eval_all(1.0, hi);
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const double want[4] = {i == 0 ? 1.0 : 0.0, i == 1 ? 1.0 : 0.0, i == 2 ? 1.0 : 0.0, i == 3 ? 1.0 : 0.0};
      hermite = std::max({hermite, std::abs(lo[i][0] - want[0]), std::abs(lo[i][1] - want[1]),
                          std::abs(hi[i][0] - want[2]), std::abs(hi[i][1] - want[3])});
    }
    const auto rule = poly::gauss_rule(p + 2);
    std::vector<double> gram(basis.num_bubbles() * basis.num_bubbles(), 0.0);
    std::vector<Jet> v(basis.size());
    for (std::size_t q = 0; q < rule.size(); ++q) {
      basis.eval_all(rule.points[q], v);
      for (std::size_t a = 0; a < basis.num_bubbles(); ++a)
        for (std::size_t b = 0; b < basis.num_bubbles(); ++b)
          gram[a * basis.num_bubbles() + b] += rule.weights[q] * v[a + 4][2] * v[b + 4][2];
    }
    for (std::size_t a = 0; a < basis.num_bubbles(); ++a)
      for (std::size_t b = 0; b < basis.num_bubbles(); ++b)
        ortho = std::max(ortho, std::abs(gram[a * basis.num_bubbles() + b] - (a == b ? 1.0 : 0.0)));
  }
  s.checks.push_back(at_most("C1 basis nodal conditions, p=3..16", hermite, 1e-13));
  s.checks.push_back(at_most("bubbles orthonormal in the H2 seminorm", ortho, 1e-12));

  // Any degree-p polynomial is reproduced by the C1 space.
  std::mt19937_64 rng(7);
  const auto mesh = mesh::mesh_from_nodes({0.0, 0.13, 0.71, 1.0});
  double repro = 0.0;
  for (int p = 3; p <= 16; ++p) {
    const JetFn q = legendre_series(random_coeffs(rng, p));
    const auto iq = approx1d::interpolate_c1(q, mesh, p);
    for (int i = 0; i <= 100; ++i) {
      const double x = i / 100.0;
      const double scale = 1.0 + std::abs(q(x)[0]);
      repro = std::max(repro, std::abs(iq.evaluate(x) - q(x)[0]) / scale);
    }
  }
  s.checks.push_back(at_most("degree-p polynomials reproduced, p=3..16", repro, 1e-10));

  // Gauss-Lobatto Lagrange basis: cardinality and partition of unity.
  double cardinal = 0.0, unity = 0.0;
  for (int p = 1; p <= 12; ++p) {
    const poly::GaussLobattoBasis gl(p);
    std::vector<double> val(gl.size()), der(gl.size());
    for (std::size_t i = 0; i < gl.size(); ++i) {
      gl.eval_all(gl.nodes()[i], val, der);
      for (std::size_t j = 0; j < gl.size(); ++j) cardinal = std::max(cardinal, std::abs(val[j] - (i == j ? 1.0 : 0.0)));
    }
    for (int k = 0; k <= 20; ++k) {
      gl.eval_all(-1.0 + 0.1 * k + 0.0123, val, der);
      double sv = 0.0, sd = 0.0;
      for (std::size_t j = 0; j < gl.size(); ++j) {
        sv += val[j];
        sd += der[j];
      }
      unity = std::max({unity, std::abs(sv - 1.0), std::abs(sd)});
    }
  }
  s.checks.push_back(at_most("Gauss-Lobatto basis cardinal at its nodes, p=1..12", cardinal, 1e-13));
  s.checks.push_back(at_most("Gauss-Lobatto basis partition of unity", unity, 1e-10));
  return s;
}

SuiteResult mesh_suite() {
  SuiteResult s{"MESH", {}};
  const auto m = mesh::build_mesh_1d(1.0, 8, 1e-4);
  double sym = 0.0;
  for (std::size_t i = 0; i < m.nodes.size(); ++i) sym = std::max(sym, std::abs(m.nodes[i] + m.nodes[m.nodes.size() - 1 - i] - 1.0));
  s.checks.push_back(at_most("1D mesh symmetric about 1/2", sym, 1e-15));
  s.checks.push_back(at_most("1D layer width kappa*p*eps", std::abs(m.tau - 8e-4), 1e-18));
  const bool tagged = m.regions.size() == 3 && m.regions[0] == mesh::Region1D::Layer &&
                      m.regions[1] == mesh::Region1D::Coarse && m.regions[2] == mesh::Region1D::Layer;
  s.checks.push_back({"1D regions layer/coarse/layer", tagged, tagged ? 1.0 : 0.0, 1.0, {}});
  const auto wide = mesh::build_mesh_1d(1.0, 8, 0.1);
  const bool coarse = std::all_of(wide.regions.begin(), wide.regions.end(), [](auto r) { return r == mesh::Region1D::Coarse; });
  s.checks.push_back({"1D asymptotic range: three equal coarse elements", coarse && std::abs(wide.tau - 1.0 / 3.0) < 1e-15,
                      wide.tau, 1.0 / 3.0, {}});

  const mesh::DiskGeometry geo{0.5, 8};
  const auto coarse2d = mesh::build_asymptotic_mesh_disk(geo.rho0, geo.n_sectors);
  const auto needles = mesh::build_mesh_2d(geo, 1.0, 4, 1e-2);
  for (const auto* mp : {&coarse2d, &needles}) {
    const std::string tag = mp->needles ? " (needle mesh)" : " (asymptotic mesh)";
    s.checks.push_back(at_most("area equals pi" + tag, std::abs(mesh::mesh_area(*mp) - std::numbers::pi), 1e-8));
    s.checks.push_back(positive("positive Jacobian" + tag, mesh::min_jacobian(*mp)));
    const auto pairing = mesh::check_edge_pairing(*mp);
    s.checks.push_back(at_most("conforming edge pairing" + tag, static_cast<double>(pairing.inconsistent), 0.0,
                               std::to_string(pairing.interior_edges) + " interior, " +
                                   std::to_string(pairing.boundary_edges) + " boundary edges"));
  }

  double thickness = 0.0;
  for (std::size_t e : fem2d::needle_elements(needles)) {
    const auto& map = needles.elements[e].map;
    for (double eta : {0.0, 0.37, 1.0}) {
      const auto a = map.eval(0.0, eta).x, b = map.eval(1.0, eta).x;
      const double dr = std::hypot(a.x, a.y) - std::hypot(b.x, b.y);
      thickness = std::max(thickness, std::abs(dr - geo.rho0 * 4e-2));
    }
  }
  s.checks.push_back(at_most("needle radial thickness rho0*kappa*p*eps", thickness, 1e-14));

  fem2d::Discretization2D disc(needles, 4);
  double radius = 0.0;
  for (std::size_t n = 0; n < disc.dofs.num_nodes(); ++n)
    if (disc.dofs.on_boundary(n)) radius = std::max(radius, std::abs(std::hypot(disc.dofs.coord(n).x, disc.dofs.coord(n).y) - 1.0));
  s.checks.push_back(at_most("boundary nodes on the unit circle", radius, 1e-13));
  s.checks.push_back(at_most("boundary node count n_sectors*p",
                             std::abs(static_cast<double>(disc.dofs.num_boundary()) - 32.0), 0.0));
  const auto g = fem2d::interpolate_gl([](double x, double y) { return std::sin(3.0 * x) + y * y; }, disc, false);
  s.checks.push_back(at_most("shared edges parametrized consistently",
                             fem2d::continuity_defect(disc, fem2d::NodalField2D(&disc.mesh, &disc.dofs, g)), 1e-12));
  return s;
}

SuiteResult interp_suite() {
  SuiteResult s{"INTERP", {}};
  const double eps = 1e-3;
  const int p = 6;
  const auto prob = problems::catalog_1d("LAYERED", eps);
  const JetFn& u = prob.exact->u;
  const auto mesh = mesh::build_mesh_1d(1.0, p, eps);
  const auto iu = approx1d::interpolate_c1(u, mesh, p);

  double nodal = 0.0;
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    const double x = mesh.nodes[i];
    const std::size_t j = std::min(i, mesh.num_elements() - 1);
    const Jet ix = iu.jet_on_element(j, x), ux = u(x);
    nodal = std::max({nodal, std::abs(ix[0] - ux[0]), std::abs(ix[1] - ux[1]) * eps});
  }
  s.checks.push_back(at_most("I_p matches nodal values and eps-scaled slopes", nodal, 1e-13));

  // (u - I_p u)'' is orthogonal to P_{p-2} on every element.
  double ortho = 0.0;
  for (std::size_t j = 0; j < mesh.num_elements(); ++j) {
    const auto rule = fem1d::element_rule(mesh, j, eps, p + 6);
    const double a = mesh.nodes[j], h = mesh.width(j);
    std::vector<double> lp(static_cast<std::size_t>(p) + 1), ldp(lp.size());
    std::vector<double> mom(static_cast<std::size_t>(p) - 1, 0.0);
    double norm = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double x = rule.points[q];
      poly::legendre_table(p, 2.0 * (x - a) / h - 1.0, lp, ldp);
      const double e2 = u(x)[2] - iu.jet_on_element(j, x)[2];
      norm += rule.weights[q] * u(x)[2] * u(x)[2];
      for (int k = 0; k <= p - 2; ++k) mom[static_cast<std::size_t>(k)] += rule.weights[q] * e2 * lp[static_cast<std::size_t>(k)];
    }
    ortho = std::max(ortho, max_abs(mom) / std::sqrt(norm * h));
  }
  s.checks.push_back(at_most("(u - I_p u)'' orthogonal to P_{p-2} per element", ortho, 1e-10));

  const ScalarFn one = [](double) { return 1.0; };
  const JetFn us = prob.exact->parts->smooth;
  const auto usp = approx1d::project_smooth(us, one, one, 8);
  const double ends = std::max(std::abs(usp.eval(0.0)[0] - us(0.0)[0]), std::abs(usp.eval(1.0)[0] - us(1.0)[0]));
  s.checks.push_back(at_most("u_{S,p} interpolates u_S at 0 and 1", ends, 1e-13));
  {
    const auto rule = poly::map_rule(poly::gauss_rule(40), 0.0, 1.0);
    std::vector<Jet> phi(9);
    std::vector<double> r(9, 0.0);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double x = rule.points[q];
      approx1d::LegendrePolynomial::basis(8, x, phi);
      const Jet e = us(x) - usp.eval(x);
      for (std::size_t k = 2; k < 9; ++k) r[k] += rule.weights[q] * (e[1] * phi[k][1] + e[0] * phi[k][0]);
    }
    s.checks.push_back(at_most("u_{S,p} is the B0 projection (orthogonality)", max_abs(r), 1e-13));
  }
  {
    std::mt19937_64 rng(11);
    auto c = random_coeffs(rng, 8);
    const approx1d::LegendrePolynomial q(8, c);
    const auto pq = approx1d::project_smooth(q.as_function(), one, one, 8);
    double d = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) d = std::max(d, std::abs(pq.coefficients()[k] - c[k]));
    s.checks.push_back(at_most("B0 projection reproduces P_p", d, 1e-11));
  }

  // Gauss-Lobatto interpolation in 2D: exact for x + 2y on bilinear elements,
  // constants reproduced by both regular-region projections.
  fem2d::Discretization2D disc(mesh::build_mesh_2d({0.5, 8}, 1.0, 4, 1e-2), 4);
  const auto lin = fem2d::interpolate_gl([](double x, double y) { return x + 2.0 * y; }, disc, false);
  const fem2d::NodalField2D field(&disc.mesh, &disc.dofs, lin);
  double bilinear = 0.0;
  for (std::size_t e = 0; e < disc.mesh.size(); ++e) {
    if (disc.mesh.elements[e].map.kind() != mesh::MapKind::Bilinear) continue;
    for (double xi : {0.1, 0.5, 0.83})
      for (double eta : {0.2, 0.61}) {
        const auto x = disc.mesh.elements[e].map.eval(xi, eta).x;
        const auto v = field.evaluate(e, xi, eta);
        bilinear = std::max({bilinear, std::abs(v.v - (x.x + 2.0 * x.y)), std::abs(v.dx - 1.0), std::abs(v.dy - 2.0)});
      }
  }
  s.checks.push_back(at_most("Q_p interpolant exact for x + 2y on bilinear elements", bilinear, 1e-12));

  const fem2d::Field2Fn constant = [](double, double) { return fem2d::Value2{1.5, 0.0, 0.0}; };
  const auto mask = fem2d::regular_nodes(disc);
  for (auto mode : {fem2d::ProjectionMode::L2, fem2d::ProjectionMode::WeightedH1}) {
    const auto proj = fem2d::project_regular(constant, disc, mode);
    double d = 0.0;
    for (std::size_t n = 0; n < proj.size(); ++n)
      if (mask[n]) d = std::max(d, std::abs(proj[n] - 1.5));
    s.checks.push_back(at_most(mode == fem2d::ProjectionMode::L2 ? "L2 projection reproduces constants"
                                                                 : "weighted H1 projection reproduces constants",
                               d, 1e-11));
  }
  return s;
}

SuiteResult galerkin_suite() {
  SuiteResult s{"GALERKIN", {}};
  struct Case {
    const char* name;
    double eps;
    int p;
  };
  for (const Case& c : {Case{"LAYERED", 1e-4, 8}, Case{"VARCOEF", 1e-3, 6}, Case{"LAYERED", 1.0, 5}}) {
    const auto prob = problems::catalog_1d(c.name, c.eps);
    const auto sol = fem1d::solve_1d(prob, 1.0, c.p);
    s.checks.push_back(at_most(std::string("1D Galerkin orthogonality ") + c.name + " eps=" + fmt(c.eps) + " p=" + std::to_string(c.p),
                               fem1d::galerkin_orthogonality_residual(prob, sol.field), 1e-9));
  }
  {
    const auto prob = problems::catalog_1d("POLY", 1e-2);
    const auto sol = fem1d::solve_1d(prob, 1.0, 4);
    const auto rep = fem1d::norms_1d(difference(prob.exact->u, sol.field), sol.field.mesh(), {prob.eps, prob.b, prob.c});
    s.checks.push_back(at_most("1D POLY solved exactly for p >= 4 (energy error)", rep.energy, 1e-10));
  }
  const auto prob2 = problems::bessel_exact_disk(1e-3, 1.0, 1.0, 1.0);
  fem2d::Discretization2D disc(mesh::build_mesh_2d({0.5, 8}, 1.0, 4, 1e-3), 4);
  const auto sol2 = fem2d::solve_mixed(prob2, disc);
  s.checks.push_back(at_most("2D solve relative residual", sol2.residual, 1e-10));
  s.checks.push_back(at_most("2D Galerkin orthogonality BESSEL eps=1e-3 p=4",
                             fem2d::galerkin_orthogonality_residual(prob2, disc, sol2.field), 1e-8));
  return s;
}

SuiteResult continuity_suite() {
  SuiteResult s{"CONTINUITY", {}};
  const auto prob = problems::catalog_1d("LAYERED", 1e-5);
  const auto sol = fem1d::solve_1d(prob, 1.0, 7);
  const auto& f = sol.field;
  double jump = 0.0;
  for (std::size_t i = 1; i + 1 < f.mesh().nodes.size(); ++i) {
    const double x = f.mesh().nodes[i];
    const Jet l = f.jet_on_element(i - 1, x), r = f.jet_on_element(i, x);
    jump = std::max({jump, std::abs(l[0] - r[0]), std::abs(l[1] - r[1]) * prob.eps});
  }
  s.checks.push_back(at_most("1D discrete solution C1 across nodes", jump, 1e-13));
  const auto bc = std::max({std::abs(f.evaluate(0.0)), std::abs(f.evaluate(1.0)), std::abs(f.evaluate(0.0, 1)),
                            std::abs(f.evaluate(1.0, 1))});
  s.checks.push_back(at_most("1D clamped boundary conditions", bc, 1e-14));

  const auto prob2 = problems::bessel_exact_disk(1e-4, 1.0, 1.0, 1.0);
  fem2d::Discretization2D disc(mesh::build_mesh_2d({0.5, 8}, 1.0, 5, 1e-4), 5);
  const auto sol2 = fem2d::solve_mixed(prob2, disc);
  const double su = max_abs(sol2.field.u.values()), sw = max_abs(sol2.field.w.values());
  s.checks.push_back(at_most("2D u continuous across edges (relative)", fem2d::continuity_defect(disc, sol2.field.u) / su, 1e-11));
  s.checks.push_back(at_most("2D w continuous across edges (relative)", fem2d::continuity_defect(disc, sol2.field.w) / sw, 1e-11));
  double trace = 0.0;
  for (std::size_t n = 0; n < disc.dofs.num_nodes(); ++n)
    if (disc.dofs.on_boundary(n)) trace = std::max(trace, std::abs(sol2.field.u.values()[n]));
  s.checks.push_back(at_most("2D u vanishes on the boundary", trace, 0.0));
  return s;
}

SuiteResult chi_suite(const std::string& name) {
  SuiteResult s{name, {}};
  const std::vector<double> taus{1e-1, 1e-3, 1e-5};
  for (auto kind : {CorrectorKind::Chi0, CorrectorKind::Chi1}) {
    const int i = kind == CorrectorKind::Chi0 ? 0 : 1;
    for (int k = 0; k <= 2; ++k) {
      std::vector<double> ratio;
      for (double tau : taus) ratio.push_back(approx1d::corrector(tau, kind).seminorm(k) / std::pow(tau, 1.5 - k - i));
      s.checks.push_back(at_most("|chi_" + std::to_string(i) + "|_" + std::to_string(k) + " / tau^(3/2-k-i) constant in tau",
                                 spread(ratio) - 1.0, 0.01, "ratio " + fmt(ratio.front())));
    }
    double ends = 0.0;
    for (double tau : taus) {
      const auto c = approx1d::corrector(tau, kind);
      const Jet a = c.eval(0.0), b = c.eval(tau);
      const double want_b0 = i == 1 ? 1.0 : 0.0, want_b1 = i == 0 ? 1.0 : 0.0;
      const double ds = i == 1 ? tau : 1.0;  // chi_1' is O(1/tau)
      ends = std::max({ends, std::abs(a[0]), std::abs(a[1]) * ds, std::abs(b[0] - want_b0), std::abs(b[1] - want_b1) * ds});
    }
    s.checks.push_back(at_most("chi_" + std::to_string(i) + " end conditions at 0 and tau", ends, 1e-12));
  }
  double l2 = 0.0;
  for (double tau : taus) {
    const double want = std::pow(tau, 1.5) / std::sqrt(105.0);
    l2 = std::max(l2, std::abs(approx1d::corrector(tau, CorrectorKind::Chi0).seminorm(0) - want) / want);
  }
  s.checks.push_back(at_most("||chi_0||_0 = tau^(3/2)/sqrt(105) (relative)", l2, 1e-10));
  return s;
}

SuiteResult inverse_suite() {
  SuiteResult s{"INVERSE_INEQ", {}};
  // Markov-type scaling: |q|_k <= C p^{2k} |D|^{-k} ||q||_0 with C uniform in p.
  for (int k = 1; k <= 2; ++k) {
    double worst = 0.0, drift = 0.0;
    for (int p = std::max(k, 2); p <= 12; ++p) {
      const auto a = approx1d::inverse_inequality_sweep(p, k, 200, 1, 0.0, 1.0);
      const auto b = approx1d::inverse_inequality_sweep(p, k, 200, 1, 3.0, 3.25);
      worst = std::max(worst, a.max_markov);
      drift = std::max(drift, std::abs(a.max_markov - b.max_markov) / a.max_markov);
    }
    s.checks.push_back(at_most("k=" + std::to_string(k) + ": sampled Markov ratio bounded over p=2..12", worst, 2.0));
    s.checks.push_back(at_most("k=" + std::to_string(k) + ": ratio independent of the interval", drift, 1e-10));
  }
  // q(x) = x = (P_0 + P_1(2x - 1)) / 2 on (0, 1): |q|_1 / (|D|^{-1} ||q||_0)
  // = sqrt(3) > 1, so the falling-factorial constant cannot be 1.
  const std::vector<double> q{0.5, 0.5};
  const auto r = approx1d::check_inverse_inequality(q, 0.0, 1.0, 1);
  s.checks.push_back(at_most("linear q: literal ratio equals sqrt(3)", std::abs(r.literal - std::sqrt(3.0)), 1e-13));
  return s;
}

// ---------------------------------------------------------------- criteria

study::StudyReport study_1d() {
  auto cfg = study::default_config(1);
  cfg.problem = "LAYERED";
  cfg.eps = kEpsStudy;
  cfg.p_min = 3;
  cfg.p_max = 12;
  return study::run_study(cfg);
}

study::StudyReport study_2d() {
  auto cfg = study::default_config(2);
  cfg.problem = "BESSEL";
  cfg.eps = {1e-2, 1e-4, 1e-6};
  cfg.p_min = 2;
  cfg.p_max = 8;
  return study::run_study(cfg);
}

fit::ExpFit envelope_fit(const study::StudyReport& report, const std::string& norm) {
  std::vector<double> ps, errs;
  for (const auto& [p, v] : study::envelope(report, norm)) {
    ps.push_back(p);
    errs.push_back(v);
  }
  return fit::fit_exponential(ps, errs);
}

void add_failures(SuiteResult& s, const study::StudyReport& report) {
  std::size_t failed = 0;
  for (const auto& r : report.rows) failed += r.error.empty() ? 0 : 1;
  s.checks.push_back(at_most("all study runs succeeded", static_cast<double>(failed), 0.0));
}

SuiteResult criterion_balanced_1d() {
  SuiteResult s{"BALANCED_1D", {}};
  const auto report = study_1d();
  add_failures(s, report);
  const auto f = envelope_fit(report, "balanced");
  s.checks.push_back(at_least("balanced envelope beta", f.beta, 0.4));
  s.checks.push_back(at_least("balanced envelope R^2", f.r2, 0.97));
  const auto env = study::envelope(report, "balanced");
  const double at12 = env.empty() ? std::nan("") : env.back().second;
  s.checks.push_back(at_most("balanced envelope at p=12", at12, 1e-6));
  return s;
}

SuiteResult criterion_c1max_1d() {
  SuiteResult s{"C1MAX_1D", {}};
  const auto report = study_1d();
  add_failures(s, report);
  const auto f = envelope_fit(report, "c1max");
  s.checks.push_back(at_least("C1-max envelope beta", f.beta, 0.4));
  s.checks.push_back(at_least("C1-max envelope R^2", f.r2, 0.95));
  return s;
}

SuiteResult criterion_layer_norms() {
  SuiteResult s{"LAYER_NORMS", {}};
  std::vector<double> energy, balanced;
  double closed = 0.0;
  const ScalarFn one = [](double) { return 1.0; };
  for (double eps : kEpsDecades) {
    const JetFn w = problems::exponential_layer(eps);
    const auto rep = fem1d::norms_1d(element_agnostic(w), mesh::mesh_from_nodes({0.0, 1.0}), {eps, one, one});
    energy.push_back(rep.energy);
    balanced.push_back(rep.balanced);
    // Closed forms with I = (eps/2)(1 - e^{-2/eps}) = int_0^1 e^{-2x/eps} dx.
    const double i = 0.5 * eps * (1.0 - std::exp(-2.0 / eps));
    const double e_ref = std::sqrt(i * (2.0 + eps * eps));
    const double b_ref = std::sqrt(i * (1.0 / eps + 1.0 + eps * eps));
    closed = std::max({closed, std::abs(rep.energy - e_ref) / e_ref, std::abs(rep.balanced - b_ref) / b_ref});
  }
  const double se = fit::fit_power_exponent(kEpsDecades, energy);
  const double sb = fit::fit_power_exponent(kEpsDecades, balanced);
  s.checks.push_back(at_most("energy norm ~ eps^{1/2}: |slope - 0.5|", std::abs(se - 0.5), 0.05, "slope " + fmt(se)));
  s.checks.push_back(at_most("balanced norm ~ eps^0: |slope|", std::abs(sb), 0.05, "slope " + fmt(sb)));
  s.checks.push_back(at_most("quadrature matches closed forms (relative)", closed, 1e-10));
  return s;
}

std::vector<double> scaled_layer_ratios(const ElementJetFn& err, const mesh::SblMesh1D& mesh, double eps) {
  const auto parts = fem1d::sobolev_parts(err, mesh, fem1d::layer_elements(mesh), eps);
  return {parts.l2 * std::pow(eps, -1.5), parts.h1 * std::pow(eps, -0.5), parts.h2 * std::pow(eps, 0.5)};
}

SuiteResult criterion_interp_layer() {
  SuiteResult s{"INTERP_LAYER", {}};
  std::map<int, double> env;
  for (double eps : kEpsStudy) {
    const auto prob = problems::catalog_1d("LAYERED", eps);
    for (int p = 3; p <= 12; ++p) {
      const auto mesh = mesh::build_mesh_1d(1.0, p, eps);
      const auto iu = approx1d::interpolate_c1(prob.exact->u, mesh, p);
      std::vector<std::size_t> all(mesh.num_elements());
      for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
      const auto parts = fem1d::sobolev_parts(difference(prob.exact->u, iu), mesh, all, eps);
      env[p] = std::max(env[p], std::sqrt(eps) * parts.h2);
    }
  }
  std::vector<double> ps, errs;
  for (const auto& [p, v] : env) {
    ps.push_back(p);
    errs.push_back(v);
  }
  const auto f = fit::fit_exponential(ps, errs);
  s.checks.push_back(positive("eps^{1/2}|u - I_p u|_2 envelope beta", f.beta, "R^2 " + fmt(f.r2)));

  std::vector<std::vector<double>> ratios(3);
  for (double eps : kEpsDecades) {
    const auto prob = problems::catalog_1d("LAYERED", eps);
    const auto mesh = mesh::build_mesh_1d(1.0, 8, eps);
    const auto iu = approx1d::interpolate_c1(prob.exact->u, mesh, 8);
    const auto r = scaled_layer_ratios(difference(prob.exact->u, iu), mesh, eps);
    for (int k = 0; k < 3; ++k) ratios[static_cast<std::size_t>(k)].push_back(r[static_cast<std::size_t>(k)]);
  }
  for (int k = 0; k < 3; ++k)
    s.checks.push_back(at_most("layer |u - I_p u|_" + std::to_string(k) + " eps^(k-3/2) spread over eps (p=8)",
                               spread(ratios[static_cast<std::size_t>(k)]), 5.0));
  return s;
}

SuiteResult criterion_best_approx() {
  SuiteResult s{"BEST_APPROX", {}};
  double worst = 0.0;
  std::size_t violations = 0, above_floor = 0, cases = 0;
  std::string where;
  for (const auto& name : problems::catalog_1d_names()) {
    for (double eps : {1.0, 1e-2, 1e-4, 1e-6}) {
      const auto prob = problems::catalog_1d(name, eps);
      const fem1d::EnergyWeights weights{eps, prob.b, prob.c};
      for (int p = 3; p <= 10; ++p) {
        const auto sol = fem1d::solve_1d(prob, 1.0, p);
        const auto iu = approx1d::interpolate_c1(prob.exact->u, sol.field.mesh(), p);
        const double eg = fem1d::norms_1d(difference(prob.exact->u, sol.field), sol.field.mesh(), weights).energy;
        const double ei = fem1d::norms_1d(difference(prob.exact->u, iu), sol.field.mesh(), weights).energy;
        ++cases;
        if (eg > ei * (1.0 + 1e-8)) {
          ++violations;
          // Both errors at rounding level (u in the discrete space) is not a
          // violation of the estimate itself; counted separately.
          if (eg > ei * (1.0 + 1e-8) + 1e-12) ++above_floor;
        }
        const double ratio = ei > 0.0 ? eg / ei : 0.0;
        if (ratio > worst) {
          worst = ratio;
          where = name + " eps=" + fmt(eps) + " p=" + std::to_string(p) + " (" + fmt(eg) + " vs " + fmt(ei) + ")";
        }
      }
    }
  }
  s.checks.push_back(at_most("||u - u_p||_E <= ||u - I_p u||_E (1 + 1e-8) + 1e-12: violations",
                             static_cast<double>(above_floor), 0.0,
                             std::to_string(cases) + " cases; " + std::to_string(violations) +
                                 " without the 1e-12 rounding floor; largest ratio " + fmt(worst) + " at " + where));
  return s;
}

SuiteResult criterion_special_rep() {
  SuiteResult s{"SPECIAL_REP", {}};
  std::vector<std::vector<double>> ratios(3);
  for (double eps : kEpsDecades) {
    const auto prob = problems::catalog_1d("LAYERED", eps);
    const auto rep = approx1d::special_representative(prob, 1.0, 6);
    const auto r = scaled_layer_ratios(difference(prob.exact->u, rep.field), rep.field.mesh(), eps);
    for (int k = 0; k < 3; ++k) ratios[static_cast<std::size_t>(k)].push_back(r[static_cast<std::size_t>(k)]);
  }
  for (int k = 0; k < 3; ++k)
    s.checks.push_back(at_most("layer |u - u^_p|_" + std::to_string(k) + " eps^(k-3/2) spread over eps (p=6)",
                               spread(ratios[static_cast<std::size_t>(k)]), 5.0));

  std::map<int, double> env;
  for (double eps : kEpsStudy) {
    const auto prob = problems::catalog_1d("LAYERED", eps);
    for (int p = 3; p <= 12; ++p) {
      const auto rep = approx1d::special_representative(prob, 1.0, p);
      const auto& mesh = rep.field.mesh();
      const auto parts = fem1d::sobolev_parts(difference(prob.exact->u, rep.field), mesh, fem1d::coarse_elements(mesh), eps);
      env[p] = std::max(env[p], parts.l2);
    }
  }
  std::vector<double> ps, errs;
  for (const auto& [p, v] : env) {
    ps.push_back(p);
    errs.push_back(v);
  }
  const auto f = fit::fit_exponential(ps, errs);
  s.checks.push_back(positive("coarse-region ||u - u^_p||_0 envelope beta", f.beta, "R^2 " + fmt(f.r2)));
  return s;
}

SuiteResult criterion_reference_interp() {
  SuiteResult s{"REFERENCE_INTERP", {}};
  const double h = 1.0;
  std::vector<double> ps, logs;
  std::string detail;
  for (int p = 4; p <= 12; ++p) {
    const double k = p / (2.0 * h);  // h K / p = 1/2
    const JetFn v = [k, h](double t) {
      const double a = -k * h / 2.0;
      const double e = std::exp(a * (1.0 + t));
      return Jet{e, a * e, a * a * e, a * a * a * e, a * a * a * a * e};
    };
    const auto r = approx1d::reference_interval_interp_check(v, p, k, k, h);
    ps.push_back(p);
    logs.push_back(std::log(r.error));
    if (p == 12) detail = "error/(C_v K^{1/2} h) at p=12: " + fmt(r.error / r.bound_scale);
  }
  const auto line = fit::fit_line(ps, logs);
  s.checks.push_back(at_most("slope of ln ||v - I_p v||_2 against p", line.slope, -0.3, detail));
  return s;
}

SuiteResult criterion_balanced_2d() {
  SuiteResult s{"BALANCED_2D", {}};
  const auto report = study_2d();
  add_failures(s, report);
  const auto f = envelope_fit(report, "balanced");
  s.checks.push_back(positive("2D balanced envelope beta", f.beta));
  s.checks.push_back(at_least("2D balanced envelope R^2", f.r2, 0.9));
  return s;
}

SuiteResult criterion_energy_2d() {
  SuiteResult s{"ENERGY_2D", {}};
  const auto report = study_2d();
  add_failures(s, report);
  const auto f = envelope_fit(report, "energy");
  s.checks.push_back(positive("2D energy envelope beta", f.beta, "R^2 " + fmt(f.r2)));
  return s;
}

SuiteResult criterion_structural() {
  SuiteResult s{"STRUCTURAL", {}};
  for (const auto& name : structural_suites()) {
    const auto sub = run_suite(name);
    std::size_t failed = 0;
    for (const auto& c : sub.checks) failed += c.passed ? 0 : 1;
    s.checks.push_back(at_most(name + " failed checks", static_cast<double>(failed), 0.0,
                               std::to_string(sub.checks.size()) + " checks"));
  }
  return s;
}

}  // namespace

bool SuiteResult::passed() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

nlohmann::json to_json(const SuiteResult& suite) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : suite.checks) {
    nlohmann::json j{{"name", c.name}, {"passed", c.passed}, {"bound", c.bound}};
    j["value"] = std::isfinite(c.value) ? nlohmann::json(c.value) : nlohmann::json(nullptr);
    if (!c.detail.empty()) j["detail"] = c.detail;
    checks.push_back(j);
  }
  return {{"suite", suite.name}, {"passed", suite.passed()}, {"checks", checks}};
}

std::vector<std::string> structural_suites() {
  return {"QUADRATURE", "BASIS", "MESH", "INTERP", "GALERKIN", "CONTINUITY", "CHI_BOUNDS", "INVERSE_INEQ"};
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list{
      {1, "BALANCED_1D", "1D balanced-norm error decays exponentially, uniformly in eps"},
      {2, "C1MAX_1D", "1D C1-max error decays exponentially"},
      {3, "LAYER_NORMS", "energy norm of the layer is O(eps^1/2), balanced norm O(1)"},
      {4, "INTERP_LAYER", "C1 interpolant: exponential decay and eps-robust layer scaling"},
      {5, "BEST_APPROX", "Galerkin error below interpolation error in the energy norm"},
      {6, "SPECIAL_REP", "special representative: layer scaling and coarse-region decay"},
      {7, "CORRECTORS", "corrector norms scale as tau^(3/2-k-i)"},
      {8, "REFERENCE_INTERP", "reference-interval interpolation of exp(-K h (1+t)/2)"},
      {9, "BALANCED_2D", "2D balanced-norm error decays exponentially"},
      {10, "ENERGY_2D", "2D energy-norm error decays exponentially"},
      {11, "STRUCTURAL", "all structural suites pass"},
  };
  return list;
}

std::vector<std::string> suite_names() {
  auto names = structural_suites();
  for (const auto& c : criteria()) names.push_back(c.suite);
  return names;
}

SuiteResult run_suite(const std::string& name) {
  if (name == "QUADRATURE") return quadrature_suite();
  if (name == "BASIS") return basis_suite();
  if (name == "MESH") return mesh_suite();
  if (name == "INTERP") return interp_suite();
  if (name == "GALERKIN") return galerkin_suite();
  if (name == "CONTINUITY") return continuity_suite();
  if (name == "CHI_BOUNDS") return chi_suite("CHI_BOUNDS");
  if (name == "INVERSE_INEQ") return inverse_suite();
  if (name == "BALANCED_1D") return criterion_balanced_1d();
  if (name == "C1MAX_1D") return criterion_c1max_1d();
  if (name == "LAYER_NORMS") return criterion_layer_norms();
  if (name == "INTERP_LAYER") return criterion_interp_layer();
  if (name == "BEST_APPROX") return criterion_best_approx();
  if (name == "SPECIAL_REP") return criterion_special_rep();
  if (name == "CORRECTORS") return chi_suite("CORRECTORS");
  if (name == "REFERENCE_INTERP") return criterion_reference_interp();
  if (name == "BALANCED_2D") return criterion_balanced_2d();
  if (name == "ENERGY_2D") return criterion_energy_2d();
  if (name == "STRUCTURAL") return criterion_structural();
  throw std::invalid_argument("unknown verification suite '" + name + "'");
}

std::vector<SuiteResult> run_suites(const std::string& name) {
  if (name != "ALL") return {run_suite(name)};
  std::vector<SuiteResult> out;
  for (const auto& n : structural_suites()) out.push_back(run_suite(n));
  for (const auto& c : criteria()) {
    if (c.suite == "STRUCTURAL") {
      // Reuse the results gathered above instead of recomputing them.
      SuiteResult s{"STRUCTURAL", {}};
      for (std::size_t i = 0; i < structural_suites().size(); ++i) {
        std::size_t failed = 0;
        for (const auto& ch : out[i].checks) failed += ch.passed ? 0 : 1;
        s.checks.push_back(at_most(out[i].name + " failed checks", static_cast<double>(failed), 0.0,
                                   std::to_string(out[i].checks.size()) + " checks"));
      }
      out.push_back(std::move(s));
    } else {
      out.push_back(run_suite(c.suite));
    }
  }
  return out;
}

}  // namespace sblfem::verify
