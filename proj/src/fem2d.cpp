#include "sblfem/fem2d.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace sblfem::fem2d {

using mesh::MapPoint;
using mesh::Vec2;

namespace {

constexpr int kNormPoints = 20;
constexpr int kMaxSamples = 20;

/// Local (xi, eta) of the point at fraction s along local edge k, traversed
/// in the element's vertex order (e0: v0->v1, e1: v1->v2, e2: v2->v3, e3: v3->v0).
std::pair<double, double> edge_point(int k, double s) {
  switch (k) {
    case 0: return {s, 0.0};
    case 1: return {1.0, s};
    case 2: return {1.0 - s, 1.0};
    default: return {0.0, 1.0 - s};
  }
}

/// Local index pair of the node at traversal position k (0..p) on local edge e.
std::pair<int, int> edge_node(int e, int k, int p) {
  switch (e) {
    case 0: return {k, 0};
    case 1: return {p, k};
    case 2: return {p - k, p};
    default: return {0, p - k};
  }
}

/// Tensor basis values and reference derivatives at (xi, eta) in [0,1]^2.
struct TensorEval {
  std::vector<double> lx, dx, ly, dy;
  explicit TensorEval(std::size_t n) : lx(n), dx(n), ly(n), dy(n) {}

  void at(const poly::GaussLobattoBasis& basis, double xi, double eta) {
    basis.eval_all(2.0 * xi - 1.0, lx, dx);
    basis.eval_all(2.0 * eta - 1.0, ly, dy);
    for (std::size_t i = 0; i < lx.size(); ++i) {
      dx[i] *= 2.0;
      dy[i] *= 2.0;
    }
  }
};

/// Cartesian gradient from reference derivatives.
std::pair<double, double> physical_gradient(const MapPoint& m, double d_xi, double d_eta) {
  const double det = m.det();
  return {(m.dy_deta * d_xi - m.dy_dxi * d_eta) / det, (-m.dx_deta * d_xi + m.dx_dxi * d_eta) / det};
}

}  // namespace

void ProblemSpec2D::validate() const {
  if (!(eps > 0.0) || eps > 1.0)
    throw std::invalid_argument("problem '" + name + "': eps must lie in (0, 1]");
  if (!(b > 0.0) || !(c > 0.0)) throw std::invalid_argument("problem '" + name + "': b and c must be positive");
  if (!f) throw std::invalid_argument("problem '" + name + "': forcing f is required");
}

// ---------------------------------------------------------------- dofs

DofMap2D::DofMap2D(const mesh::SblMesh2D& mesh, int p) : p_(p), basis_(p) {
  if (p < 1) throw std::invalid_argument("DofMap2D: degree must be >= 1");
  for (double t : basis_.nodes()) unit_nodes_.push_back(0.5 * (t + 1.0));
  coords_ = mesh.vertices;
  const std::size_t np1 = static_cast<std::size_t>(p + 1);
  std::map<std::pair<int, int>, std::size_t> edge_base;

  local_.resize(mesh.size());
  for (std::size_t e = 0; e < mesh.size(); ++e) {
    const auto& el = mesh.elements[e];
    auto& loc = local_[e];
    loc.assign(np1 * np1, 0);
    auto set = [&](int i, int j, std::size_t g) { loc[static_cast<std::size_t>(j) * np1 + static_cast<std::size_t>(i)] = g; };
    set(0, 0, static_cast<std::size_t>(el.vertices[0]));
    set(p, 0, static_cast<std::size_t>(el.vertices[1]));
    set(p, p, static_cast<std::size_t>(el.vertices[2]));
    set(0, p, static_cast<std::size_t>(el.vertices[3]));
    for (int k = 0; k < 4; ++k) {
      const int a = el.vertices[k], b = el.vertices[(k + 1) % 4];
      const auto key = std::minmax(a, b);
      auto it = edge_base.find(key);
      const bool fresh = it == edge_base.end();
      if (fresh) it = edge_base.emplace(key, coords_.size()).first;
      if (fresh) coords_.resize(coords_.size() + static_cast<std::size_t>(p - 1));
      for (int t = 1; t < p; ++t) {
        const std::size_t offset = static_cast<std::size_t>(a < b ? t - 1 : p - t - 1);
        const auto [i, j] = edge_node(k, t, p);
        const std::size_t g = it->second + offset;
        set(i, j, g);
        if (fresh) coords_[g] = el.map.eval(unit_nodes_[static_cast<std::size_t>(i)], unit_nodes_[static_cast<std::size_t>(j)]).x;
      }
    }
    for (int j = 1; j < p; ++j)
      for (int i = 1; i < p; ++i) {
        set(i, j, coords_.size());
        coords_.push_back(el.map.eval(unit_nodes_[static_cast<std::size_t>(i)], unit_nodes_[static_cast<std::size_t>(j)]).x);
      }
  }
  boundary_.assign(coords_.size(), 0);
  for (std::size_t e = 0; e < mesh.size(); ++e) {
    const int k = mesh.elements[e].boundary_edge;
    if (k < 0) continue;
    for (int t = 0; t <= p; ++t) {
      const auto [i, j] = edge_node(k, t, p);
      boundary_[node(e, i, j)] = 1;
    }
  }
}

std::size_t DofMap2D::num_boundary() const {
  return static_cast<std::size_t>(std::count(boundary_.begin(), boundary_.end(), char{1}));
}

// ---------------------------------------------------------------- fields

NodalField2D::NodalField2D(const mesh::SblMesh2D* mesh, const DofMap2D* dofs, std::vector<double> values)
    : mesh_(mesh), dofs_(dofs), values_(std::move(values)) {
  if (values_.size() != dofs_->num_nodes()) throw std::invalid_argument("NodalField2D: wrong number of values");
}

Value2 NodalField2D::evaluate(std::size_t e, double xi, double eta) const {
  const std::size_t n = dofs_->basis().size();
  TensorEval tb(n);
  tb.at(dofs_->basis(), xi, eta);
  const auto& nodes = dofs_->element_nodes(e);
  double v = 0.0, d_xi = 0.0, d_eta = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      const double c = values_[nodes[j * n + i]];
      v += c * tb.lx[i] * tb.ly[j];
      d_xi += c * tb.dx[i] * tb.ly[j];
      d_eta += c * tb.lx[i] * tb.dy[j];
    }
  const auto [gx, gy] = physical_gradient(mesh_->elements[e].map.eval(xi, eta), d_xi, d_eta);
  return {v, gx, gy};
}

// ---------------------------------------------------------------- quadrature

ElementQuadrature element_quadrature(const mesh::SblMesh2D& mesh, std::size_t e, double eps, int n) {
  const auto& el = mesh.elements[e];
  poly::IntervalRule rx = poly::map_rule(poly::gauss_rule(n), 0.0, 1.0);
  if (el.map.kind() == mesh::MapKind::PolarSector) {
    const double depth = el.map.params()[1] * (el.map.subrect()[1] - el.map.subrect()[0]);
    rx = poly::graded_rule(0.0, 1.0, eps / depth, n, true, false);
  }
  const poly::IntervalRule ry = poly::map_rule(poly::gauss_rule(n), 0.0, 1.0);
  ElementQuadrature q;
  const std::size_t total = rx.points.size() * ry.points.size();
  q.xi.reserve(total);
  q.eta.reserve(total);
  q.weight.reserve(total);
  q.map.reserve(total);
  for (std::size_t a = 0; a < rx.points.size(); ++a)
    for (std::size_t b = 0; b < ry.points.size(); ++b) {
      const MapPoint m = el.map.eval(rx.points[a], ry.points[b]);
      q.xi.push_back(rx.points[a]);
      q.eta.push_back(ry.points[b]);
      q.weight.push_back(rx.weights[a] * ry.weights[b] * m.det());
      q.map.push_back(m);
    }
  return q;
}

// ---------------------------------------------------------------- assembly

Blocks2D assemble_blocks(const Discretization2D& disc, const Scalar2Fn& f, const std::vector<char>* element_mask) {
  const auto& mesh = disc.mesh;
  const auto& dofs = disc.dofs;
  const int p = dofs.degree();
  const std::size_t n1 = dofs.basis().size();
  const std::size_t nl = n1 * n1;
  const std::size_t nn = dofs.num_nodes();

  std::vector<linalg::Triplet> kt, mt;
  std::vector<double> load(nn, 0.0);
  std::vector<double> ke(nl * nl), me(nl * nl), fe(nl), val(nl), gx(nl), gy(nl);
  TensorEval tb(n1);

  for (std::size_t e = 0; e < mesh.size(); ++e) {
    if (element_mask && !(*element_mask)[e]) continue;
    std::fill(ke.begin(), ke.end(), 0.0);
    std::fill(me.begin(), me.end(), 0.0);
    std::fill(fe.begin(), fe.end(), 0.0);
    // Tensor Gauss, no grading: the basis is polynomial. (p+3)^2 points are exact
    // on bilinear elements; curved maps make the stiffness integrand rational,
    // and two extra points keep that error below the orthogonality tolerance.
    const int extra = mesh.elements[e].map.kind() == mesh::MapKind::Bilinear ? 3 : 5;
    const poly::IntervalRule r = poly::map_rule(poly::gauss_rule(p + extra), 0.0, 1.0);
    for (std::size_t qa = 0; qa < r.points.size(); ++qa)
      for (std::size_t qb = 0; qb < r.points.size(); ++qb) {
        const double xi = r.points[qa], eta = r.points[qb];
        const MapPoint m = mesh.elements[e].map.eval(xi, eta);
        const double w = r.weights[qa] * r.weights[qb] * m.det();
        tb.at(dofs.basis(), xi, eta);
        for (std::size_t j = 0; j < n1; ++j)
          for (std::size_t i = 0; i < n1; ++i) {
            const std::size_t a = j * n1 + i;
            val[a] = tb.lx[i] * tb.ly[j];
            const auto [x, y] = physical_gradient(m, tb.dx[i] * tb.ly[j], tb.lx[i] * tb.dy[j]);
            gx[a] = x;
            gy[a] = y;
          }
        const double fx = f ? f(m.x.x, m.x.y) : 0.0;
        for (std::size_t a = 0; a < nl; ++a) {
          fe[a] += w * fx * val[a];
          for (std::size_t b = a; b < nl; ++b) {
            ke[a * nl + b] += w * (gx[a] * gx[b] + gy[a] * gy[b]);
            me[a * nl + b] += w * val[a] * val[b];
          }
        }
      }
    const auto& nodes = dofs.element_nodes(e);
    for (std::size_t a = 0; a < nl; ++a) {
      load[nodes[a]] += fe[a];
      for (std::size_t b = 0; b < nl; ++b) {
        const std::size_t idx = b >= a ? a * nl + b : b * nl + a;
        kt.push_back({nodes[a], nodes[b], ke[idx]});
        mt.push_back({nodes[a], nodes[b], me[idx]});
      }
    }
  }
  return {linalg::CsrMatrix::from_triplets(nn, nn, std::move(kt)),
          linalg::CsrMatrix::from_triplets(nn, nn, std::move(mt)), std::move(load)};
}

AssembledMixed assemble_mixed(const ProblemSpec2D& problem, const Discretization2D& disc) {
  problem.validate();
  if (disc.dofs.degree() < 2) throw std::invalid_argument("assemble_mixed: degree must be >= 2");
  AssembledMixed out;
  out.blocks = assemble_blocks(disc, problem.f);
  const std::size_t nn = disc.dofs.num_nodes();
  out.u_index.assign(nn, -1);
  for (std::size_t i = 0; i < nn; ++i)
    if (!disc.dofs.on_boundary(i)) out.u_index[i] = static_cast<long>(out.n_u++);
  const std::size_t n = out.n_u + nn;

  const auto& k = out.blocks.stiffness;
  const auto& m = out.blocks.mass;
  std::vector<linalg::Triplet> t;
  std::vector<double> rhs(n, 0.0);
  const double eps = problem.eps;
  // K and M share the sparsity pattern (same element couplings).
  for (std::size_t i = 0; i < nn; ++i) {
    const long ri = out.u_index[i];
    for (std::size_t kk = k.row_ptr()[i]; kk < k.row_ptr()[i + 1]; ++kk) {
      const std::size_t j = k.col_index()[kk];
      const double kij = k.values()[kk];
      const double mij = m.values()[kk];
      const long cj = out.u_index[j];
      if (ri >= 0) {
        const auto row = static_cast<std::size_t>(ri);
        if (cj >= 0) t.push_back({row, static_cast<std::size_t>(cj), problem.b * kij + problem.c * mij});
        t.push_back({row, out.n_u + j, -eps * kij});
      }
      if (cj >= 0) t.push_back({out.n_u + i, static_cast<std::size_t>(cj), eps * kij});
      t.push_back({out.n_u + i, out.n_u + j, mij});
    }
    if (ri >= 0) rhs[static_cast<std::size_t>(ri)] = out.blocks.load[i];
  }
  out.system.matrix = linalg::CsrMatrix::from_triplets(n, n, std::move(t));
  out.system.rhs = std::move(rhs);
  out.system.symmetric = false;
  return out;
}

MixedSolution solve_mixed(const ProblemSpec2D& problem, const Discretization2D& disc) {
  const AssembledMixed sys = assemble_mixed(problem, disc);
  const std::vector<double> x = linalg::solve_direct(sys.system);
  const std::size_t nn = disc.dofs.num_nodes();
  std::vector<double> u(nn, 0.0), w(nn, 0.0);
  for (std::size_t i = 0; i < nn; ++i) {
    if (sys.u_index[i] >= 0) u[i] = x[static_cast<std::size_t>(sys.u_index[i])];
    w[i] = x[sys.n_u + i];
  }
  MixedSolution sol;
  sol.field.u = NodalField2D(&disc.mesh, &disc.dofs, std::move(u));
  sol.field.w = NodalField2D(&disc.mesh, &disc.dofs, std::move(w));
  sol.dofs = sys.system.size();
  sol.residual = linalg::relative_residual(sys.system.matrix, x, sys.system.rhs);
  return sol;
}

// ---------------------------------------------------------------- norms

PairFn error_pair(const ProblemSpec2D& problem, const MixedField& field) {
  if (!problem.exact) throw std::invalid_argument("error_pair: exact solution required");
  const ExactSolution2D ex = *problem.exact;
  return [ex, field](std::size_t e, double xi, double eta, Vec2 x) {
    return PairValue{ex.u(x.x, x.y) - field.u.evaluate(e, xi, eta), ex.w(x.x, x.y) - field.w.evaluate(e, xi, eta)};
  };
}

nlohmann::json to_json(const NormReport2D& r) {
  return {{"energy", r.energy}, {"balanced", r.balanced}, {"l2_u", r.l2_u}, {"grad_u", r.grad_u},
          {"l2_w", r.l2_w},     {"max_u", r.max_u},       {"max_w", r.max_w}, {"c1max", r.c1max}};
}

NormReport2D norms_2d(const PairFn& error, const mesh::SblMesh2D& mesh, double eps, double b, double c,
                      const std::vector<std::size_t>* elements) {
  std::vector<std::size_t> all;
  if (!elements) {
    all.resize(mesh.size());
    for (std::size_t e = 0; e < all.size(); ++e) all[e] = e;
    elements = &all;
  }
  double su = 0.0, sg = 0.0, sw = 0.0, mu = 0.0, mw = 0.0, mg = 0.0;
  for (std::size_t e : *elements) {
    const ElementQuadrature q = element_quadrature(mesh, e, eps, kNormPoints);
    for (std::size_t k = 0; k < q.weight.size(); ++k) {
      const PairValue v = error(e, q.xi[k], q.eta[k], q.map[k].x);
      su += q.weight[k] * v.u.v * v.u.v;
      sg += q.weight[k] * (v.u.dx * v.u.dx + v.u.dy * v.u.dy);
      sw += q.weight[k] * v.w.v * v.w.v;
    }
    for (int i = 0; i < kMaxSamples; ++i)
      for (int j = 0; j < kMaxSamples; ++j) {
        const double xi = i / double(kMaxSamples - 1), eta = j / double(kMaxSamples - 1);
        const PairValue v = error(e, xi, eta, mesh.elements[e].map.eval(xi, eta).x);
        mu = std::max(mu, std::abs(v.u.v));
        mw = std::max(mw, std::abs(v.w.v));
        mg = std::max(mg, std::hypot(v.u.dx, v.u.dy));
      }
  }
  NormReport2D r;
  r.l2_u = std::sqrt(su);
  r.grad_u = std::sqrt(sg);
  r.l2_w = std::sqrt(sw);
  r.energy = std::sqrt(sw + b * sg + c * su);
  r.balanced = std::sqrt(sw / eps + b * sg + c * su);
  r.max_u = mu;
  r.max_w = mw;
  r.c1max = std::max(mu, mg);
  return r;
}

std::vector<std::size_t> needle_elements(const mesh::SblMesh2D& mesh) {
  std::vector<std::size_t> out;
  for (std::size_t e = 0; e < mesh.size(); ++e)
    if (mesh.elements[e].tag == mesh::ElementTag::Needle) out.push_back(e);
  return out;
}

std::vector<std::size_t> regular_elements(const mesh::SblMesh2D& mesh) {
  std::vector<std::size_t> out;
  for (std::size_t e = 0; e < mesh.size(); ++e)
    if (mesh.elements[e].tag != mesh::ElementTag::Needle) out.push_back(e);
  return out;
}

std::vector<std::size_t> inner_elements(const mesh::SblMesh2D& mesh) {
  std::vector<std::size_t> out;
  for (std::size_t e = 0; e < mesh.size(); ++e)
    if (mesh.elements[e].map.kind() != mesh::MapKind::PolarSector) out.push_back(e);
  return out;
}

// ---------------------------------------------------------------- interpolation / projection

std::vector<double> interpolate_gl(const Scalar2Fn& g, const Discretization2D& disc, bool zero_trace) {
  std::vector<double> out(disc.dofs.num_nodes());
  for (std::size_t n = 0; n < out.size(); ++n) {
    const Vec2& x = disc.dofs.coord(n);
    out[n] = (zero_trace && disc.dofs.on_boundary(n)) ? 0.0 : g(x.x, x.y);
  }
  return out;
}

std::vector<char> regular_nodes(const Discretization2D& disc) {
  std::vector<char> mark(disc.dofs.num_nodes(), 0);
  for (std::size_t e : regular_elements(disc.mesh))
    for (std::size_t n : disc.dofs.element_nodes(e)) mark[n] = 1;
  return mark;
}

std::vector<double> project_regular(const Field2Fn& g, const Discretization2D& disc, ProjectionMode mode,
                                    double b, double c) {
  const auto& mesh = disc.mesh;
  const auto& dofs = disc.dofs;
  const int p = dofs.degree();
  const std::vector<char> nodes_in = regular_nodes(disc);
  std::vector<long> index(dofs.num_nodes(), -1);
  std::size_t n = 0;
  for (std::size_t i = 0; i < index.size(); ++i)
    if (nodes_in[i]) index[i] = static_cast<long>(n++);

  const double kw = mode == ProjectionMode::WeightedH1 ? b : 0.0;
  const double mw = mode == ProjectionMode::WeightedH1 ? c : 1.0;
  const std::size_t n1 = dofs.basis().size(), nl = n1 * n1;
  std::vector<linalg::Triplet> t;
  std::vector<double> rhs(n, 0.0), val(nl), gx(nl), gy(nl), ae(nl * nl), fe(nl);
  TensorEval tb(n1);
  for (std::size_t e : regular_elements(mesh)) {
    std::fill(ae.begin(), ae.end(), 0.0);
    std::fill(fe.begin(), fe.end(), 0.0);
    const ElementQuadrature q = element_quadrature(mesh, e, 1.0, p + 4);
    for (std::size_t k = 0; k < q.weight.size(); ++k) {
      tb.at(dofs.basis(), q.xi[k], q.eta[k]);
      for (std::size_t j = 0; j < n1; ++j)
        for (std::size_t i = 0; i < n1; ++i) {
          const std::size_t a = j * n1 + i;
          val[a] = tb.lx[i] * tb.ly[j];
          const auto [x, y] = physical_gradient(q.map[k], tb.dx[i] * tb.ly[j], tb.lx[i] * tb.dy[j]);
          gx[a] = x;
          gy[a] = y;
        }
      const Value2 gv = g(q.map[k].x.x, q.map[k].x.y);
      const double w = q.weight[k];
      for (std::size_t a = 0; a < nl; ++a) {
        fe[a] += w * (mw * gv.v * val[a] + kw * (gv.dx * gx[a] + gv.dy * gy[a]));
        for (std::size_t bb = a; bb < nl; ++bb)
          ae[a * nl + bb] += w * (mw * val[a] * val[bb] + kw * (gx[a] * gx[bb] + gy[a] * gy[bb]));
      }
    }
    const auto& nodes = dofs.element_nodes(e);
    for (std::size_t a = 0; a < nl; ++a) {
      const auto ra = static_cast<std::size_t>(index[nodes[a]]);
      rhs[ra] += fe[a];
      for (std::size_t bb = 0; bb < nl; ++bb) {
        const std::size_t idx = bb >= a ? a * nl + bb : bb * nl + a;
        t.push_back({ra, static_cast<std::size_t>(index[nodes[bb]]), ae[idx]});
      }
    }
  }
  linalg::SparseSystem sys{linalg::CsrMatrix::from_triplets(n, n, std::move(t)), std::move(rhs), true};
  const std::vector<double> x = linalg::solve_direct(sys);
  std::vector<double> out(dofs.num_nodes(), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i)
    if (index[i] >= 0) out[i] = x[static_cast<std::size_t>(index[i])];
  return out;
}

Representatives2D special_representatives_2d(const ProblemSpec2D& problem, const Discretization2D& disc) {
  if (!problem.exact || !problem.exact->parts)
    throw std::invalid_argument("special_representatives_2d: exact decomposition required");
  if (!disc.mesh.needles)
    throw std::invalid_argument("special_representatives_2d: mesh is in the asymptotic range (no needles)");
  const ExactSolution2D& ex = *problem.exact;
  const auto& dofs = disc.dofs;
  const int p = dofs.degree();

  Representatives2D rep;
  rep.w = project_regular(ex.parts->w_smooth, disc, ProjectionMode::L2);
  rep.u = project_regular(ex.parts->u_smooth, disc, ProjectionMode::WeightedH1, problem.b, problem.c);

  auto value = [](const Field2Fn& fn, const Vec2& x) { return fn(x.x, x.y).v; };
  for (std::size_t e : needle_elements(disc.mesh)) {
    for (int j = 0; j <= p; ++j) {
      const std::size_t iface = dofs.node(e, p, j);
      const Vec2& xi_face = dofs.coord(iface);
      const double jump_w = value(ex.w, xi_face) - rep.w[iface];
      const double jump_u = value(ex.u, xi_face) - rep.u[iface];
      for (int i = 0; i < p; ++i) {
        const std::size_t nd = dofs.node(e, i, j);
        const double chi = chi2(dofs.unit_nodes()[static_cast<std::size_t>(i)]);
        const Vec2& x = dofs.coord(nd);
        rep.w[nd] = value(ex.w, x) - chi * jump_w;
        rep.u[nd] = dofs.on_boundary(nd) ? 0.0 : value(ex.u, x) - chi * jump_u;
      }
    }
  }
  return rep;
}

double galerkin_orthogonality_residual(const ProblemSpec2D& problem, const Discretization2D& disc,
                                       const MixedField& field) {
  if (!problem.exact) throw std::invalid_argument("galerkin_orthogonality_residual: exact solution required");
  const auto& mesh = disc.mesh;
  const auto& dofs = disc.dofs;
  const ExactSolution2D& ex = *problem.exact;
  const std::size_t n1 = dofs.basis().size();
  const std::size_t nn = dofs.num_nodes();
  std::vector<double> rpsi(nn, 0.0), spsi(nn, 0.0), rphi(nn, 0.0), sphi(nn, 0.0);
  TensorEval tb(n1);
  const double eps = problem.eps, b = problem.b, c = problem.c;

  for (std::size_t e = 0; e < mesh.size(); ++e) {
    const ElementQuadrature q = element_quadrature(mesh, e, eps, dofs.degree() + 8);
    const auto& nodes = dofs.element_nodes(e);
    for (std::size_t k = 0; k < q.weight.size(); ++k) {
      const Vec2 x = q.map[k].x;
      const Value2 u = ex.u(x.x, x.y), w = ex.w(x.x, x.y);
      const Value2 eu = u - field.u.evaluate(e, q.xi[k], q.eta[k]);
      const Value2 ew = w - field.w.evaluate(e, q.xi[k], q.eta[k]);
      const double fx = problem.f(x.x, x.y);
      tb.at(dofs.basis(), q.xi[k], q.eta[k]);
      const double wq = q.weight[k];
      for (std::size_t j = 0; j < n1; ++j)
        for (std::size_t i = 0; i < n1; ++i) {
          const std::size_t g = nodes[j * n1 + i];
          const double v = tb.lx[i] * tb.ly[j];
          const auto [vx, vy] = physical_gradient(q.map[k], tb.dx[i] * tb.ly[j], tb.lx[i] * tb.dy[j]);
          const double gu = eu.dx * vx + eu.dy * vy, gw = ew.dx * vx + ew.dy * vy;
          rpsi[g] += wq * (b * gu + c * eu.v * v - eps * gw);
          spsi[g] += wq * (std::abs(b * (u.dx * vx + u.dy * vy)) + std::abs(c * u.v * v) +
                           std::abs(eps * (w.dx * vx + w.dy * vy)) + std::abs(fx * v));
          rphi[g] += wq * (eps * gu + ew.v * v);
          sphi[g] += wq * (std::abs(eps * (u.dx * vx + u.dy * vy)) + std::abs(w.v * v));
        }
    }
  }
  double worst = 0.0;
  for (std::size_t g = 0; g < nn; ++g) {
    if (!dofs.on_boundary(g) && spsi[g] > 0.0) worst = std::max(worst, std::abs(rpsi[g]) / spsi[g]);
    if (sphi[g] > 0.0) worst = std::max(worst, std::abs(rphi[g]) / sphi[g]);
  }
  return worst;
}

double continuity_defect(const Discretization2D& disc, const NodalField2D& field, int n) {
  const auto& mesh = disc.mesh;
  std::map<std::pair<int, int>, std::pair<std::size_t, int>> first;
  double worst = 0.0;
  for (std::size_t e = 0; e < mesh.size(); ++e) {
    for (int k = 0; k < 4; ++k) {
      const int a = mesh.elements[e].vertices[k], b = mesh.elements[e].vertices[(k + 1) % 4];
      const auto key = std::minmax(a, b);
      auto it = first.find(key);
      if (it == first.end()) {
        first.emplace(key, std::make_pair(e, k));
        continue;
      }
      const auto [e0, k0] = it->second;
      for (int s = 0; s < n; ++s) {
        const double t = (s + 0.5) / n;
        // The neighbour traverses the shared edge in the opposite direction.
        const auto [x1, y1] = edge_point(k, t);
        const auto [x0, y0] = edge_point(k0, 1.0 - t);
        worst = std::max(worst, std::abs(field.evaluate(e, x1, y1).v - field.evaluate(e0, x0, y0).v));
      }
    }
  }
  return worst;
}

std::string export_samples_csv(const Discretization2D& disc, const MixedField& field, int n) {
  std::ostringstream os;
  os.precision(17);
  os << "element,xi,eta,x,y,u,w\n";
  for (std::size_t e = 0; e < disc.mesh.size(); ++e)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double xi = n > 1 ? i / double(n - 1) : 0.5, eta = n > 1 ? j / double(n - 1) : 0.5;
        const Vec2 x = disc.mesh.elements[e].map.eval(xi, eta).x;
        os << e << ',' << xi << ',' << eta << ',' << x.x << ',' << x.y << ',' << field.u.evaluate(e, xi, eta).v
           << ',' << field.w.evaluate(e, xi, eta).v << '\n';
      }
  return os.str();
}

}  // namespace sblfem::fem2d
