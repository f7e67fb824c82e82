#include "sblfem/fem1d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sblfem::fem1d {

namespace {

constexpr int kNormPointsPerPiece = 30;
constexpr int kMaxSamplesPerElement = 200;

}  // namespace

void ProblemSpec1D::validate() const {
  if (!(eps > 0.0) || eps > 1.0)
    throw std::invalid_argument("problem '" + name + "': eps must lie in (0, 1], got " + std::to_string(eps));
  if (!b || !c || !f) throw std::invalid_argument("problem '" + name + "': b, c and f are required");
  for (int i = 0; i < 1000; ++i) {
    const double x = i / 999.0;
    if (!(b(x) > 0.0))
      throw std::invalid_argument("problem '" + name + "': b is not positive at x = " + std::to_string(x));
    if (!(c(x) > 0.0))
      throw std::invalid_argument("problem '" + name + "': c is not positive at x = " + std::to_string(x));
  }
}

// ---------------------------------------------------------------- dofs

DofMap1D::DofMap1D(std::size_t n_elements, int p) : n_elements_(n_elements), p_(p) {
  if (p < 3) throw std::invalid_argument("DofMap1D: C1 elements need p >= 3");
  if (n_elements == 0) throw std::invalid_argument("DofMap1D: empty mesh");
  const std::size_t total = 2 * (n_elements + 1) + n_elements * static_cast<std::size_t>(p - 3);
  free_index_.assign(total, -1);
  const std::size_t last = 2 * n_elements;
  for (std::size_t g = 0; g < total; ++g) {
    if (g == 0 || g == 1 || g == last || g == last + 1) continue;
    free_index_[g] = static_cast<long>(n_free_++);
  }
}

std::size_t DofMap1D::global(std::size_t j, std::size_t local) const {
  if (local < 4) return 2 * j + local;
  return 2 * (n_elements_ + 1) + j * static_cast<std::size_t>(p_ - 3) + (local - 4);
}

// ---------------------------------------------------------------- field

namespace {

/// Scale of local basis function i in physical units: slope dofs carry h/2.
double dof_scale(std::size_t i, double h) { return (i == 1 || i == 3) ? 0.5 * h : 1.0; }

}  // namespace

DiscreteField1D::DiscreteField1D(mesh::SblMesh1D mesh, int p, std::vector<double> coeffs)
    : mesh_(std::move(mesh)), p_(p), dofs_(mesh_.num_elements(), p), coeffs_(std::move(coeffs)), basis_(p) {
  if (coeffs_.size() != dofs_.num_total())
    throw std::invalid_argument("DiscreteField1D: coefficient vector has the wrong length");
}

Jet DiscreteField1D::jet_on_element(std::size_t j, double x) const {
  const double a = mesh_.nodes[j], h = mesh_.width(j);
  const double t = 2.0 * (x - a) / h - 1.0;
  std::vector<Jet> phi(basis_.size());
  basis_.eval_all(t, phi);
  const double d1 = 2.0 / h;
  Jet out{};
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double cf = coeffs_[dofs_.global(j, i)] * dof_scale(i, h);
    out[0] += cf * phi[i][0];
    out[1] += cf * phi[i][1] * d1;
    out[2] += cf * phi[i][2] * d1 * d1;
  }
  return out;
}

double DiscreteField1D::evaluate(double x, int k) const {
  if (k < 0 || k > 2) throw std::invalid_argument("DiscreteField1D::evaluate: derivative order must be 0..2");
  return jet_on_element(mesh_.locate(x), x)[static_cast<std::size_t>(k)];
}

ElementJetFn DiscreteField1D::as_function() const {
  return [self = *this](std::size_t j, double x) { return self.jet_on_element(j, x); };
}

// ---------------------------------------------------------------- assembly

poly::IntervalRule element_rule(const mesh::SblMesh1D& mesh, std::size_t j, double eps, int n_per_piece) {
  return poly::graded_rule(mesh.nodes[j], mesh.nodes[j + 1], eps, n_per_piece);
}

AssembledSystem1D assemble_1d(const ProblemSpec1D& problem, const mesh::SblMesh1D& mesh, int p) {
  problem.validate();
  DofMap1D dofs(mesh.num_elements(), p);
  const poly::C1ReferenceBasis basis(p);
  const std::size_t nl = basis.size();
  const double eps2 = problem.eps * problem.eps;

  std::vector<linalg::Triplet> triplets;
  std::vector<double> rhs(dofs.num_free(), 0.0);
  std::vector<Jet> phi(nl);
  std::vector<double> ke(nl * nl), fe(nl);

  for (std::size_t j = 0; j < mesh.num_elements(); ++j) {
    const double a = mesh.nodes[j], h = mesh.width(j);
    const double d1 = 2.0 / h, d2 = d1 * d1;
    std::fill(ke.begin(), ke.end(), 0.0);
    std::fill(fe.begin(), fe.end(), 0.0);
    const poly::IntervalRule rule = element_rule(mesh, j, problem.eps, p + 3);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double x = rule.points[q], wq = rule.weights[q];
      basis.eval_all(2.0 * (x - a) / h - 1.0, phi);
      const double bx = problem.b(x), cx = problem.c(x), fx = problem.f(x);
      for (std::size_t r = 0; r < nl; ++r) {
        const double sr = dof_scale(r, h);
        const double v0 = sr * phi[r][0], v1 = sr * phi[r][1] * d1, v2 = sr * phi[r][2] * d2;
        fe[r] += wq * fx * v0;
        for (std::size_t s = r; s < nl; ++s) {
          const double ss = dof_scale(s, h);
          const double u0 = ss * phi[s][0], u1 = ss * phi[s][1] * d1, u2 = ss * phi[s][2] * d2;
          ke[r * nl + s] += wq * (eps2 * u2 * v2 + bx * u1 * v1 + cx * u0 * v0);
        }
      }
    }
    for (std::size_t r = 0; r < nl; ++r) {
      const long fr = dofs.free_index(dofs.global(j, r));
      if (fr < 0) continue;
      rhs[static_cast<std::size_t>(fr)] += fe[r];
      for (std::size_t s = 0; s < nl; ++s) {
        const long fs = dofs.free_index(dofs.global(j, s));
        if (fs < 0) continue;
        const double v = s >= r ? ke[r * nl + s] : ke[s * nl + r];
        triplets.push_back({static_cast<std::size_t>(fr), static_cast<std::size_t>(fs), v});
      }
    }
  }
  AssembledSystem1D out{{}, dofs};
  out.system.matrix = linalg::CsrMatrix::from_triplets(dofs.num_free(), dofs.num_free(), std::move(triplets));
  out.system.rhs = std::move(rhs);
  out.system.symmetric = true;
  return out;
}

Solution1D solve_on_mesh(const ProblemSpec1D& problem, const mesh::SblMesh1D& mesh, int p) {
  const AssembledSystem1D sys = assemble_1d(problem, mesh, p);
  const std::vector<double> x = linalg::solve_direct(sys.system);
  std::vector<double> coeffs(sys.dofs.num_total(), 0.0);
  for (std::size_t g = 0; g < coeffs.size(); ++g) {
    const long f = sys.dofs.free_index(g);
    if (f >= 0) coeffs[g] = x[static_cast<std::size_t>(f)];
  }
  return {DiscreteField1D(mesh, p, std::move(coeffs)), sys.dofs.num_free()};
}

Solution1D solve_1d(const ProblemSpec1D& problem, double kappa, int p) {
  return solve_on_mesh(problem, mesh::build_mesh_1d(kappa, p, problem.eps), p);
}

// ---------------------------------------------------------------- norms

nlohmann::json to_json(const NormReport& r) {
  return {{"energy", r.energy}, {"balanced", r.balanced}, {"l2", r.l2},       {"h1", r.h1},
          {"h2_seminorm", r.h2_seminorm}, {"max", r.max}, {"c1max", r.c1max},  {"eps", r.eps},
          {"p", r.p},           {"kappa", r.kappa},       {"problem", r.problem}};
}

SobolevParts sobolev_parts(const ElementJetFn& fn, const mesh::SblMesh1D& mesh,
                           const std::vector<std::size_t>& elements, double eps) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  for (std::size_t j : elements) {
    const poly::IntervalRule rule = element_rule(mesh, j, eps, kNormPointsPerPiece);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Jet v = fn(j, rule.points[q]);
      s0 += rule.weights[q] * v[0] * v[0];
      s1 += rule.weights[q] * v[1] * v[1];
      s2 += rule.weights[q] * v[2] * v[2];
    }
  }
  return {std::sqrt(s0), std::sqrt(s1), std::sqrt(s2)};
}

NormReport norms_1d(const ElementJetFn& error, const mesh::SblMesh1D& mesh, const EnergyWeights& w) {
  double l2 = 0.0, h1s = 0.0, h2s = 0.0, bh1 = 0.0, cl2 = 0.0;
  double mx = 0.0, mx1 = 0.0;
  for (std::size_t j = 0; j < mesh.num_elements(); ++j) {
    const poly::IntervalRule rule = element_rule(mesh, j, w.eps, kNormPointsPerPiece);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double x = rule.points[q], wq = rule.weights[q];
      const Jet v = error(j, x);
      l2 += wq * v[0] * v[0];
      h1s += wq * v[1] * v[1];
      h2s += wq * v[2] * v[2];
      bh1 += wq * w.b(x) * v[1] * v[1];
      cl2 += wq * w.c(x) * v[0] * v[0];
    }
    const double a = mesh.nodes[j], h = mesh.width(j);
    for (int i = 0; i < kMaxSamplesPerElement; ++i) {
      // Chebyshev-Lobatto points, endpoints included.
      const double t = -std::cos(std::numbers::pi * i / (kMaxSamplesPerElement - 1));
      const Jet v = error(j, a + 0.5 * h * (t + 1.0));
      mx = std::max(mx, std::abs(v[0]));
      mx1 = std::max(mx1, std::abs(v[1]));
    }
  }
  NormReport r;
  r.l2 = std::sqrt(l2);
  r.h1 = std::sqrt(l2 + h1s);
  r.h2_seminorm = std::sqrt(h2s);
  r.energy = std::sqrt(w.eps * w.eps * h2s + bh1 + cl2);
  r.balanced = std::sqrt(w.eps * h2s + l2 + h1s);
  r.max = mx;
  r.c1max = std::max(mx, mx1);
  r.eps = w.eps;
  return r;
}

std::vector<std::size_t> layer_elements(const mesh::SblMesh1D& mesh) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < mesh.num_elements(); ++j)
    if (mesh.regions[j] == mesh::Region1D::Layer) out.push_back(j);
  return out;
}

std::vector<std::size_t> coarse_elements(const mesh::SblMesh1D& mesh) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < mesh.num_elements(); ++j)
    if (mesh.regions[j] == mesh::Region1D::Coarse) out.push_back(j);
  return out;
}

double galerkin_orthogonality_residual(const ProblemSpec1D& problem, const DiscreteField1D& field) {
  if (!problem.exact) throw std::invalid_argument("galerkin_orthogonality_residual: exact solution required");
  const auto& mesh = field.mesh();
  const int p = field.degree();
  const poly::C1ReferenceBasis basis(p);
  const std::size_t nl = basis.size();
  const DofMap1D& dofs = field.dofs();
  const double eps2 = problem.eps * problem.eps;

  // B(u - u_p, v) and B(v, v) per free dof, and B(u, u).
  std::vector<double> bres(dofs.num_free(), 0.0), bvv(dofs.num_free(), 0.0);
  double buu = 0.0;
  std::vector<Jet> phi(nl);
  for (std::size_t j = 0; j < mesh.num_elements(); ++j) {
    const double a = mesh.nodes[j], h = mesh.width(j);
    const double d1 = 2.0 / h, d2 = d1 * d1;
    const poly::IntervalRule rule = element_rule(mesh, j, problem.eps, kNormPointsPerPiece);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double x = rule.points[q], wq = rule.weights[q];
      const Jet u = problem.exact->u(x);
      const Jet e = u - field.jet_on_element(j, x);
      const double bx = problem.b(x), cx = problem.c(x);
      buu += wq * (eps2 * u[2] * u[2] + bx * u[1] * u[1] + cx * u[0] * u[0]);
      basis.eval_all(2.0 * (x - a) / h - 1.0, phi);
      for (std::size_t r = 0; r < nl; ++r) {
        const long fr = dofs.free_index(dofs.global(j, r));
        if (fr < 0) continue;
        const double sr = dof_scale(r, h);
        const double v0 = sr * phi[r][0], v1 = sr * phi[r][1] * d1, v2 = sr * phi[r][2] * d2;
        bres[static_cast<std::size_t>(fr)] += wq * (eps2 * e[2] * v2 + bx * e[1] * v1 + cx * e[0] * v0);
        bvv[static_cast<std::size_t>(fr)] += wq * (eps2 * v2 * v2 + bx * v1 * v1 + cx * v0 * v0);
      }
    }
  }
  const double unorm = std::sqrt(buu);
  double worst = 0.0;
  for (std::size_t i = 0; i < bres.size(); ++i)
    worst = std::max(worst, std::abs(bres[i]) / (unorm * std::sqrt(bvv[i])));
  return worst;
}

}  // namespace sblfem::fem1d
