#pragma once

// Spectral Boundary Layer meshes: the three-element 1D mesh {0, tau, 1-tau, 1}
// and the curvilinear disk mesh whose boundary elements are split into thin
// "needle" elements of reference thickness kappa*p*eps.

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

namespace sblfem::mesh {

// ---------------------------------------------------------------- 1D

enum class Region1D { Layer, Coarse };

struct SblMesh1D {
  std::vector<double> nodes;       ///< strictly increasing, nodes.front() == 0, nodes.back() == 1
  std::vector<Region1D> regions;   ///< one per element
  double kappa = 0.0;
  double eps = 0.0;
  double tau = 0.0;
  int p = 0;

  std::size_t num_elements() const { return nodes.size() - 1; }
  double width(std::size_t j) const { return nodes[j + 1] - nodes[j]; }
  /// Element containing x; nodes belong to the element on their right except x = 1.
  std::size_t locate(double x) const;
};

/// tau = min(kappa*p*eps, 1/3). When tau == 1/3 the three elements are equal
/// and all tagged Coarse.
SblMesh1D build_mesh_1d(double kappa, int p, double eps);

/// Arbitrary mesh on [0, 1] from its nodes (all elements Coarse).
SblMesh1D mesh_from_nodes(std::vector<double> nodes);

// ---------------------------------------------------------------- 2D

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }

/// Point and Jacobian d(x,y)/d(xi,eta) of an element map.
struct MapPoint {
  Vec2 x;
  double dx_dxi = 0.0, dx_deta = 0.0, dy_dxi = 0.0, dy_deta = 0.0;
  double det() const { return dx_dxi * dy_deta - dx_deta * dy_dxi; }
};

enum class MapKind {
  Bilinear,     ///< params: 4 corners (x0,y0,...,x3,y3) at (0,0),(1,0),(1,1),(0,1)
  PolarSector,  ///< params: r_outer, depth, theta_hi, dtheta: r = r_outer - depth*xi, theta = theta_hi - dtheta*eta
  ArcBlend,     ///< params: P0, P1 (straight side at xi=0), radius, alpha0, alpha1 (arc at xi=1); Gordon-Hall
};

/// Closed-form map of the reference square [0,1]^2, optionally restricted to
/// a sub-rectangle [xi0,xi1] x [eta0,eta1] of its parent's reference square.
class ElementMap {
 public:
  ElementMap() = default;
  ElementMap(MapKind kind, std::vector<double> params);

  MapKind kind() const { return kind_; }
  const std::vector<double>& params() const { return params_; }
  const std::array<double, 4>& subrect() const { return subrect_; }

  /// Composition with the affine map of the reference square onto
  /// [xi0,xi1] x [eta0,eta1] (given in this map's reference coordinates).
  ElementMap restricted(double xi0, double xi1, double eta0, double eta1) const;

  MapPoint eval(double xi, double eta) const;

 private:
  MapPoint eval_parent(double s, double t) const;

  MapKind kind_ = MapKind::Bilinear;
  std::vector<double> params_;
  std::array<double, 4> subrect_{0.0, 1.0, 0.0, 1.0};
};

enum class ElementTag { Needle, RegularSplit, Asymptotic };

std::string to_string(ElementTag tag);
std::string to_string(MapKind kind);

/// Local vertices: v0 = M(0,0), v1 = M(1,0), v2 = M(1,1), v3 = M(0,1).
/// Local edges: e0 = v0->v1 (eta=0), e1 = v1->v2 (xi=1), e2 = v2->v3 (eta=1),
/// e3 = v3->v0 (xi=0).
struct Element2D {
  ElementMap map;
  ElementTag tag = ElementTag::Asymptotic;
  std::array<int, 4> vertices{};
  int boundary_edge = -1;  ///< local edge on the unit circle, or -1
  int parent = -1;         ///< index of the asymptotic element it came from
};

struct DiskGeometry {
  double rho0 = 0.5;
  int n_sectors = 8;
};

struct SblMesh2D {
  std::vector<Element2D> elements;
  std::vector<Vec2> vertices;
  std::size_t n_asymptotic = 0;  ///< N1
  std::size_t n_boundary = 0;    ///< N2
  bool needles = false;
  double split = 0.0;  ///< kappa*p*eps when needles are present
  DiskGeometry geometry;

  std::size_t size() const { return elements.size(); }
};

/// Fixed asymptotic mesh of the unit disk. The outer ring of thickness rho0 is
/// cut into n_sectors polar sectors (boundary elements, numbered first); the
/// inner disk of radius 1 - rho0 holds m x m squares and 4m Gordon-Hall
/// blended quadrilaterals, m = n_sectors / 4. n_sectors must be a multiple of 4.
SblMesh2D build_asymptotic_mesh_disk(double rho0, int n_sectors);

/// Needle split of every boundary element at reference xi = kappa*p*eps. In
/// the asymptotic range (kappa*p*eps >= 1/2) the mesh is returned unchanged.
/// Output order: needles, regular parts, then the interior elements.
SblMesh2D apply_needle_split(const SblMesh2D& asymptotic, double kappa, int p, double eps);

SblMesh2D build_mesh_2d(DiskGeometry geometry, double kappa, int p, double eps);

/// Sum of element areas with an n x n tensor Gauss rule per element.
double mesh_area(const SblMesh2D& mesh, int n = 16);

/// Smallest det(Jacobian) over tensor Gauss points of the given order.
double min_jacobian(const SblMesh2D& mesh, int n = 16);

struct EdgePairingReport {
  std::size_t interior_edges = 0;
  std::size_t boundary_edges = 0;
  std::size_t inconsistent = 0;  ///< edges used other than once-each-way or once on the boundary
  bool ok() const { return inconsistent == 0; }
};

EdgePairingReport check_edge_pairing(const SblMesh2D& mesh);

nlohmann::json to_json(const SblMesh1D& mesh);
nlohmann::json to_json(const SblMesh2D& mesh);

}  // namespace sblfem::mesh
