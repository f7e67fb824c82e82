#pragma once

// C1 Galerkin discretization of
//   eps^2 u'''' - (b u')' + c u = f on (0,1),  u = u' = 0 at 0 and 1,
// on the three-element SBL mesh, together with the 1D error norms.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sblfem/function.hpp"
#include "sblfem/linsolve.hpp"
#include "sblfem/meshing.hpp"
#include "sblfem/polybasis.hpp"

namespace sblfem::fem1d {

/// u = smooth + left + right + remainder; each part carries derivatives 0..4.
struct Decomposition1D {
  JetFn smooth;
  JetFn left;
  JetFn right;
  JetFn remainder;
};

struct ExactSolution1D {
  JetFn u;  ///< derivatives 0..4
  std::optional<Decomposition1D> parts;
};

struct ProblemSpec1D {
  std::string name;
  double eps = 1.0;
  ScalarFn b;
  ScalarFn c;
  ScalarFn f;
  std::optional<ExactSolution1D> exact;

  /// eps in (0,1]; b, c bounded below by a positive constant on a 1000-point
  /// grid. Throws std::invalid_argument otherwise.
  void validate() const;
};

/// Global C1 numbering. Node i owns value dof 2i and slope dof 2i+1; the
/// p-3 bubbles of element j follow all nodal dofs. The four dofs at x = 0
/// and x = 1 are clamped and have no free index.
class DofMap1D {
 public:
  DofMap1D(std::size_t n_elements, int p);

  int degree() const { return p_; }
  std::size_t num_elements() const { return n_elements_; }
  std::size_t num_total() const { return free_index_.size(); }
  std::size_t num_free() const { return n_free_; }

  /// Global index of local basis function `local` (C1ReferenceBasis order) on element j.
  std::size_t global(std::size_t j, std::size_t local) const;
  /// Free index of a global dof, or -1 when clamped.
  long free_index(std::size_t global) const { return free_index_[global]; }

 private:
  std::size_t n_elements_;
  int p_;
  std::vector<long> free_index_;
  std::size_t n_free_ = 0;
};

/// Piecewise polynomial in the C1 space; coefficients are in global
/// (total) numbering, slopes in physical units.
class DiscreteField1D {
 public:
  DiscreteField1D() = default;
  DiscreteField1D(mesh::SblMesh1D mesh, int p, std::vector<double> coeffs);

  const mesh::SblMesh1D& mesh() const { return mesh_; }
  int degree() const { return p_; }
  const DofMap1D& dofs() const { return dofs_; }
  const std::vector<double>& coefficients() const { return coeffs_; }

  /// k-th derivative (k <= 2) at x in [0,1]. Throws std::out_of_range outside.
  double evaluate(double x, int k = 0) const;
  /// Derivatives 0..2 using element j's polynomial (one-sided limits at nodes).
  Jet jet_on_element(std::size_t j, double x) const;
  ElementJetFn as_function() const;

 private:
  mesh::SblMesh1D mesh_;
  int p_ = 3;
  DofMap1D dofs_{1, 3};
  std::vector<double> coeffs_;
  poly::C1ReferenceBasis basis_{3};
};

struct AssembledSystem1D {
  linalg::SparseSystem system;
  DofMap1D dofs;
};

/// Per-element quadrature: composite Gauss rule graded towards both element
/// ends with smallest piece eps, n_per_piece points each.
poly::IntervalRule element_rule(const mesh::SblMesh1D& mesh, std::size_t j, double eps, int n_per_piece);

/// Symmetric system for B_eps on the free dofs.
AssembledSystem1D assemble_1d(const ProblemSpec1D& problem, const mesh::SblMesh1D& mesh, int p);

struct Solution1D {
  DiscreteField1D field;
  std::size_t dofs = 0;
};

Solution1D solve_on_mesh(const ProblemSpec1D& problem, const mesh::SblMesh1D& mesh, int p);
Solution1D solve_1d(const ProblemSpec1D& problem, double kappa, int p);

struct NormReport {
  double energy = 0.0;
  double balanced = 0.0;
  double l2 = 0.0;
  double h1 = 0.0;            ///< full H1 norm
  double h2_seminorm = 0.0;
  double max = 0.0;
  double c1max = 0.0;         ///< max(||e||_inf, ||e'||_inf)
  double eps = 0.0;
  int p = 0;
  double kappa = 0.0;
  std::string problem;
};

nlohmann::json to_json(const NormReport& r);

/// Coefficients of the energy norm: ||w||_E^2 = eps^2|w|_2^2 + <b w', w'> + <c w, w>.
struct EnergyWeights {
  double eps = 1.0;
  ScalarFn b;
  ScalarFn c;
};

/// All 1D norms of an element-wise error function (derivatives 0..2 read).
/// Max norms by sampling 200 Chebyshev points per element.
NormReport norms_1d(const ElementJetFn& error, const mesh::SblMesh1D& mesh, const EnergyWeights& w);

/// L2 norm and H1/H2 seminorms over a subset of elements.
struct SobolevParts {
  double l2 = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
};

SobolevParts sobolev_parts(const ElementJetFn& fn, const mesh::SblMesh1D& mesh,
                           const std::vector<std::size_t>& elements, double eps);

/// Element indices of the layer / coarse regions.
std::vector<std::size_t> layer_elements(const mesh::SblMesh1D& mesh);
std::vector<std::size_t> coarse_elements(const mesh::SblMesh1D& mesh);

/// max over free basis functions v of |B_eps(u - u_p, v)| / (||u||_E ||v||_E),
/// with B_eps(u, v) integrated from the exact solution (not from f).
double galerkin_orthogonality_residual(const ProblemSpec1D& problem, const DiscreteField1D& field);

}  // namespace sblfem::fem1d
