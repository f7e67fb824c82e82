#pragma once

// Mixed C0 discretization of eps^2 Lap^2 u - b Lap u + c u = f on the unit
// disk with u = du/dn = 0 on the boundary. Unknowns (u, w = eps Lap u) in the
// tensor Gauss-Lobatto space Q_p on the SBL disk mesh; test pairs (psi, phi):
//   b<grad u, grad psi> + c<u, psi> - eps<grad w, grad psi> = <f, psi>
//   eps<grad u, grad phi> + <w, phi>                       = 0
// Also the analysis-side constructions: Gauss-Lobatto interpolants, the
// projections on the regular region, chi_2 and the representatives (u~, w~).

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sblfem/linsolve.hpp"
#include "sblfem/meshing.hpp"
#include "sblfem/polybasis.hpp"

namespace sblfem::fem2d {

/// Value and Cartesian gradient.
struct Value2 {
  double v = 0.0;
  double dx = 0.0;
  double dy = 0.0;
};

inline Value2 operator-(Value2 a, Value2 b) { return {a.v - b.v, a.dx - b.dx, a.dy - b.dy}; }
inline Value2 operator+(Value2 a, Value2 b) { return {a.v + b.v, a.dx + b.dx, a.dy + b.dy}; }

using Field2Fn = std::function<Value2(double x, double y)>;
using Scalar2Fn = std::function<double(double x, double y)>;

/// u = u_smooth + u_layer, w = w_smooth + w_layer (the remainder is zero in
/// every catalog entry).
struct Decomposition2D {
  Field2Fn u_smooth;
  Field2Fn u_layer;
  Field2Fn w_smooth;
  Field2Fn w_layer;
};

struct ExactSolution2D {
  Field2Fn u;
  Field2Fn w;  ///< eps * Lap u
  Scalar2Fn laplace_u;
  std::optional<Decomposition2D> parts;
};

struct ProblemSpec2D {
  std::string name;
  double eps = 1.0;
  double b = 1.0;
  double c = 1.0;
  Scalar2Fn f;
  std::optional<ExactSolution2D> exact;

  void validate() const;
};

/// Topological numbering of the Q_p Gauss-Lobatto nodes: mesh vertices, then
/// p-1 nodes per edge (ordered from the lower to the higher vertex id), then
/// (p-1)^2 interior nodes per element. Local node (i, j), i along xi.
class DofMap2D {
 public:
  DofMap2D(const mesh::SblMesh2D& mesh, int p);

  int degree() const { return p_; }
  std::size_t num_nodes() const { return coords_.size(); }
  std::size_t nodes_per_element() const { return static_cast<std::size_t>((p_ + 1) * (p_ + 1)); }

  /// Global node of local node (i, j) on element e.
  std::size_t node(std::size_t e, int i, int j) const { return local_[e][static_cast<std::size_t>(j * (p_ + 1) + i)]; }
  const std::vector<std::size_t>& element_nodes(std::size_t e) const { return local_[e]; }
  const mesh::Vec2& coord(std::size_t n) const { return coords_[n]; }
  bool on_boundary(std::size_t n) const { return boundary_[n] != 0; }
  std::size_t num_boundary() const;

  const poly::GaussLobattoBasis& basis() const { return basis_; }
  /// Gauss-Lobatto nodes mapped to [0, 1].
  const std::vector<double>& unit_nodes() const { return unit_nodes_; }

 private:
  int p_;
  poly::GaussLobattoBasis basis_;
  std::vector<double> unit_nodes_;
  std::vector<std::vector<std::size_t>> local_;
  std::vector<mesh::Vec2> coords_;
  std::vector<char> boundary_;
};

/// Nodal Q_p field (one value per global node).
class NodalField2D {
 public:
  NodalField2D() = default;
  NodalField2D(const mesh::SblMesh2D* mesh, const DofMap2D* dofs, std::vector<double> values);

  const std::vector<double>& values() const { return values_; }
  /// Value and Cartesian gradient at reference point (xi, eta) of element e.
  Value2 evaluate(std::size_t e, double xi, double eta) const;

 private:
  const mesh::SblMesh2D* mesh_ = nullptr;
  const DofMap2D* dofs_ = nullptr;
  std::vector<double> values_;
};

/// Discretization context shared by all fields on one (mesh, p).
struct Discretization2D {
  mesh::SblMesh2D mesh;
  DofMap2D dofs;

  Discretization2D(mesh::SblMesh2D m, int p) : mesh(std::move(m)), dofs(mesh, p) {}
  Discretization2D(const Discretization2D&) = delete;
  Discretization2D& operator=(const Discretization2D&) = delete;
};

/// Global stiffness <grad, grad>, mass <., .> and load <f, .> over all nodes.
struct Blocks2D {
  linalg::CsrMatrix stiffness;
  linalg::CsrMatrix mass;
  std::vector<double> load;
};

Blocks2D assemble_blocks(const Discretization2D& disc, const Scalar2Fn& f,
                         const std::vector<char>* element_mask = nullptr);

struct AssembledMixed {
  linalg::SparseSystem system;
  std::vector<long> u_index;  ///< node -> u unknown, -1 on the boundary
  std::size_t n_u = 0;        ///< u unknowns come first, then one w unknown per node
  Blocks2D blocks;
};

AssembledMixed assemble_mixed(const ProblemSpec2D& problem, const Discretization2D& disc);

struct MixedField {
  NodalField2D u;
  NodalField2D w;
};

struct MixedSolution {
  MixedField field;
  std::size_t dofs = 0;
  double residual = 0.0;  ///< relative algebraic residual of the solve
};

MixedSolution solve_mixed(const ProblemSpec2D& problem, const Discretization2D& disc);

struct PairValue {
  Value2 u;
  Value2 w;
};

/// Error pair at reference point (xi, eta) of element e with physical point x.
using PairFn = std::function<PairValue(std::size_t e, double xi, double eta, mesh::Vec2 x)>;

/// e = exact - discrete, using problem.exact.
PairFn error_pair(const ProblemSpec2D& problem, const MixedField& field);

struct NormReport2D {
  double energy = 0.0;    ///< sqrt(||e_w||^2 + b||grad e_u||^2 + c||e_u||^2)
  double balanced = 0.0;  ///< sqrt(||e_w||^2/eps + b||grad e_u||^2 + c||e_u||^2)
  double l2_u = 0.0;
  double grad_u = 0.0;
  double l2_w = 0.0;
  double max_u = 0.0;
  double max_w = 0.0;
  double c1max = 0.0;     ///< max(max|e_u|, max|grad e_u|)
};

nlohmann::json to_json(const NormReport2D& r);

/// Element quadrature: tensor Gauss with n points per direction; on ring
/// elements the xi direction is graded towards the boundary edge at the
/// boundary-layer scale eps.
struct ElementQuadrature {
  std::vector<double> xi, eta, weight;  ///< weight includes det(J)
  std::vector<mesh::MapPoint> map;
};

ElementQuadrature element_quadrature(const mesh::SblMesh2D& mesh, std::size_t e, double eps, int n);

NormReport2D norms_2d(const PairFn& error, const mesh::SblMesh2D& mesh, double eps, double b, double c,
                      const std::vector<std::size_t>* elements = nullptr);

/// Elements of the boundary-layer region (needles) and of the regular region (all others).
std::vector<std::size_t> needle_elements(const mesh::SblMesh2D& mesh);
std::vector<std::size_t> regular_elements(const mesh::SblMesh2D& mesh);
/// Elements outside the ring of thickness rho0 (inner disk).
std::vector<std::size_t> inner_elements(const mesh::SblMesh2D& mesh);

/// Nodal Gauss-Lobatto interpolant; with zero_trace the boundary nodes are 0.
std::vector<double> interpolate_gl(const Scalar2Fn& g, const Discretization2D& disc, bool zero_trace);

enum class ProjectionMode { L2, WeightedH1 };

/// Projection onto the Q_p space of the regular region (non-needle elements).
/// Returns a full nodal vector; nodes not in the regular region are 0.
std::vector<double> project_regular(const Field2Fn& g, const Discretization2D& disc, ProjectionMode mode,
                                    double b = 1.0, double c = 1.0);

/// Nodes belonging to at least one regular element.
std::vector<char> regular_nodes(const Discretization2D& disc);

/// chi_2 on a needle as a function of the needle's reference xi: linear,
/// 0 on the boundary and 1 on the needle / regular interface.
inline double chi2(double xi) { return xi; }
inline double chi2_derivative() { return 1.0; }

struct Representatives2D {
  std::vector<double> u;  ///< u~ nodal values
  std::vector<double> w;  ///< w~ nodal values
};

/// u~ = I_p u - chi_2 (u - pi2 u_S)|interface in the needles, pi2 u_S elsewhere;
/// w~ likewise with J_p w and pi1 w_S. Requires the needle regime.
Representatives2D special_representatives_2d(const ProblemSpec2D& problem, const Discretization2D& disc);

/// max over test functions of |A_eps((u - u_p, w - w_p), test)| relative to
/// the size of the individual terms.
double galerkin_orthogonality_residual(const ProblemSpec2D& problem, const Discretization2D& disc,
                                       const MixedField& field);

/// Largest mismatch of a nodal field across shared edges, sampled at n points
/// per edge from both sides.
double continuity_defect(const Discretization2D& disc, const NodalField2D& field, int n = 20);

/// Samples of (x, y, u, w) on an n x n grid per element as CSV.
std::string export_samples_csv(const Discretization2D& disc, const MixedField& field, int n);

}  // namespace sblfem::fem2d
