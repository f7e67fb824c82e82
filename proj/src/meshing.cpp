#include "sblfem/meshing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include "sblfem/polybasis.hpp"

namespace sblfem::mesh {

// ---------------------------------------------------------------- 1D

std::size_t SblMesh1D::locate(double x) const {
  if (x < nodes.front() || x > nodes.back())
    throw std::out_of_range("point " + std::to_string(x) + " outside the mesh");
  const auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
  const auto j = static_cast<std::size_t>(std::distance(nodes.begin(), it));
  return std::min(j == 0 ? 0 : j - 1, num_elements() - 1);
}

SblMesh1D build_mesh_1d(double kappa, int p, double eps) {
  if (!(eps > 0.0) || eps > 1.0)
    throw std::invalid_argument("build_mesh_1d: eps must lie in (0, 1], got " + std::to_string(eps));
  if (!(kappa > 0.0)) throw std::invalid_argument("build_mesh_1d: kappa must be positive");
  if (p < 1) throw std::invalid_argument("build_mesh_1d: p must be >= 1");

  SblMesh1D mesh;
  mesh.kappa = kappa;
  mesh.eps = eps;
  mesh.p = p;
  const double kpe = kappa * p * eps;
  if (kpe < 1.0 / 3.0) {
    mesh.tau = kpe;
    mesh.nodes = {0.0, kpe, 1.0 - kpe, 1.0};
    mesh.regions = {Region1D::Layer, Region1D::Coarse, Region1D::Layer};
  } else {
    mesh.tau = 1.0 / 3.0;
    mesh.nodes = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
    mesh.regions = {Region1D::Coarse, Region1D::Coarse, Region1D::Coarse};
  }
  return mesh;
}

SblMesh1D mesh_from_nodes(std::vector<double> nodes) {
  if (nodes.size() < 2) throw std::invalid_argument("mesh_from_nodes: need at least two nodes");
  for (std::size_t i = 1; i < nodes.size(); ++i)
    if (!(nodes[i] > nodes[i - 1]))
      throw std::invalid_argument("mesh_from_nodes: nodes must be strictly increasing");
  SblMesh1D mesh;
  mesh.regions.assign(nodes.size() - 1, Region1D::Coarse);
  mesh.nodes = std::move(nodes);
  return mesh;
}

// ---------------------------------------------------------------- maps

ElementMap::ElementMap(MapKind kind, std::vector<double> params)
    : kind_(kind), params_(std::move(params)) {
  const std::size_t expected = kind == MapKind::Bilinear ? 8 : kind == MapKind::PolarSector ? 4 : 7;
  if (params_.size() != expected)
    throw std::invalid_argument("ElementMap: wrong parameter count for " + to_string(kind));
}

ElementMap ElementMap::restricted(double xi0, double xi1, double eta0, double eta1) const {
  ElementMap out = *this;
  const double ds = subrect_[1] - subrect_[0], dt = subrect_[3] - subrect_[2];
  out.subrect_ = {subrect_[0] + ds * xi0, subrect_[0] + ds * xi1, subrect_[2] + dt * eta0,
                  subrect_[2] + dt * eta1};
  return out;
}

MapPoint ElementMap::eval(double xi, double eta) const {
  const double ds = subrect_[1] - subrect_[0], dt = subrect_[3] - subrect_[2];
  MapPoint mp = eval_parent(subrect_[0] + ds * xi, subrect_[2] + dt * eta);
  mp.dx_dxi *= ds;
  mp.dy_dxi *= ds;
  mp.dx_deta *= dt;
  mp.dy_deta *= dt;
  return mp;
}

MapPoint ElementMap::eval_parent(double s, double t) const {
  const auto& q = params_;
  MapPoint mp;
  switch (kind_) {
    case MapKind::Bilinear: {
      const Vec2 x0{q[0], q[1]}, x1{q[2], q[3]}, x2{q[4], q[5]}, x3{q[6], q[7]};
      mp.x = (1 - s) * (1 - t) * x0 + s * (1 - t) * x1 + s * t * x2 + (1 - s) * t * x3;
      const Vec2 ds = (1 - t) * (x1 - x0) + t * (x2 - x3);
      const Vec2 dt = (1 - s) * (x3 - x0) + s * (x2 - x1);
      mp.dx_dxi = ds.x;
      mp.dy_dxi = ds.y;
      mp.dx_deta = dt.x;
      mp.dy_deta = dt.y;
      break;
    }
    case MapKind::PolarSector: {
      const double r = q[0] - q[1] * s;
      const double th = q[2] - q[3] * t;
      const double c = std::cos(th), sn = std::sin(th);
      mp.x = {r * c, r * sn};
      mp.dx_dxi = -q[1] * c;
      mp.dy_dxi = -q[1] * sn;
      mp.dx_deta = r * sn * q[3];
      mp.dy_deta = -r * c * q[3];
      break;
    }
    case MapKind::ArcBlend: {
      // Gordon-Hall transfinite interpolation of four edge curves: straight
      // side S (xi=0), circular arc C (xi=1), and straight connectors B, T.
      const Vec2 p0{q[0], q[1]}, p1{q[2], q[3]};
      const double rad = q[4], a0 = q[5], a1 = q[6];
      auto arc = [&](double u) {
        const double a = a0 + (a1 - a0) * u;
        return Vec2{rad * std::cos(a), rad * std::sin(a)};
      };
      auto arc_d = [&](double u) {
        const double a = a0 + (a1 - a0) * u;
        return (a1 - a0) * Vec2{-rad * std::sin(a), rad * std::cos(a)};
      };
      const Vec2 c0 = arc(0.0), c1 = arc(1.0);
      const Vec2 side = p0 + t * (p1 - p0), side_d = p1 - p0;
      const Vec2 arc_t = arc(t), arc_dt = arc_d(t);
      const Vec2 bot = p0 + s * (c0 - p0), bot_d = c0 - p0;
      const Vec2 top = p1 + s * (c1 - p1), top_d = c1 - p1;
      const Vec2 corner = (1 - s) * (1 - t) * p0 + s * (1 - t) * c0 + (1 - s) * t * p1 + s * t * c1;
      mp.x = (1 - s) * side + s * arc_t + (1 - t) * bot + t * top - corner;
      const Vec2 ds = arc_t - side + (1 - t) * bot_d + t * top_d -
                      ((1 - t) * (c0 - p0) + t * (c1 - p1));
      const Vec2 dt = (1 - s) * side_d + s * arc_dt + top - bot -
                      ((1 - s) * (p1 - p0) + s * (c1 - c0));
      mp.dx_dxi = ds.x;
      mp.dy_dxi = ds.y;
      mp.dx_deta = dt.x;
      mp.dy_deta = dt.y;
      break;
    }
  }
  return mp;
}

std::string to_string(ElementTag tag) {
  switch (tag) {
    case ElementTag::Needle: return "NEEDLE";
    case ElementTag::RegularSplit: return "REGULAR_SPLIT";
    case ElementTag::Asymptotic: return "ASYMPTOTIC";
  }
  return "?";
}

std::string to_string(MapKind kind) {
  switch (kind) {
    case MapKind::Bilinear: return "bilinear";
    case MapKind::PolarSector: return "polar_sector";
    case MapKind::ArcBlend: return "arc_blend";
  }
  return "?";
}

// ---------------------------------------------------------------- disk mesh

namespace {

class VertexRegistry {
 public:
  explicit VertexRegistry(std::vector<Vec2>& store) : store_(store) {}

  int id(Vec2 v) {
    for (std::size_t i = 0; i < store_.size(); ++i)
      if (std::hypot(store_[i].x - v.x, store_[i].y - v.y) < 1e-9) return static_cast<int>(i);
    store_.push_back(v);
    return static_cast<int>(store_.size() - 1);
  }

 private:
  std::vector<Vec2>& store_;
};

Element2D make_element(ElementMap map, VertexRegistry& reg) {
  Element2D e;
  e.map = std::move(map);
  const std::array<std::pair<double, double>, 4> corners{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  for (std::size_t k = 0; k < 4; ++k)
    e.vertices[k] = reg.id(e.map.eval(corners[k].first, corners[k].second).x);
  return e;
}

Vec2 rotate(Vec2 v, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

}  // namespace

SblMesh2D build_asymptotic_mesh_disk(double rho0, int n_sectors) {
  if (!(rho0 > 0.0) || !(rho0 < 1.0))
    throw std::invalid_argument("build_asymptotic_mesh_disk: rho0 must lie in (0, 1)");
  if (n_sectors < 4 || n_sectors % 4 != 0)
    throw std::invalid_argument("build_asymptotic_mesh_disk: n_sectors must be a positive multiple of 4");

  using std::numbers::pi;
  SblMesh2D mesh;
  mesh.geometry = {rho0, n_sectors};
  VertexRegistry reg(mesh.vertices);

  const int m = n_sectors / 4;
  const double r_in = 1.0 - rho0;
  const double half = 0.5 * r_in;
  const double dtheta = 2.0 * pi / n_sectors;

  for (int j = 0; j < n_sectors; ++j) {
    const double theta_hi = -pi / 4 + dtheta * (j + 1);
    Element2D e = make_element(ElementMap(MapKind::PolarSector, {1.0, rho0, theta_hi, dtheta}), reg);
    e.boundary_edge = 3;
    e.parent = j;
    mesh.elements.push_back(e);
  }
  for (int k = 0; k < 4; ++k) {
    const double rot = k * pi / 2;
    const Vec2 p0 = rotate({half, -half}, rot), p1 = rotate({half, half}, rot);
    const ElementMap patch(MapKind::ArcBlend,
                           {p0.x, p0.y, p1.x, p1.y, r_in, -pi / 4 + rot, pi / 4 + rot});
    for (int l = 0; l < m; ++l) {
      Element2D e = make_element(patch.restricted(0.0, 1.0, double(l) / m, double(l + 1) / m), reg);
      e.parent = static_cast<int>(mesh.elements.size());
      mesh.elements.push_back(e);
    }
  }
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      const double x0 = -half + 2 * half * i / m, x1 = -half + 2 * half * (i + 1) / m;
      const double y0 = -half + 2 * half * j / m, y1 = -half + 2 * half * (j + 1) / m;
      Element2D e = make_element(ElementMap(MapKind::Bilinear, {x0, y0, x1, y0, x1, y1, x0, y1}), reg);
      e.parent = static_cast<int>(mesh.elements.size());
      mesh.elements.push_back(e);
    }
  }
  mesh.n_asymptotic = mesh.elements.size();
  mesh.n_boundary = static_cast<std::size_t>(n_sectors);
  return mesh;
}

SblMesh2D apply_needle_split(const SblMesh2D& asymptotic, double kappa, int p, double eps) {
  const double split = kappa * p * eps;
  if (split >= 0.5) return asymptotic;

  SblMesh2D mesh;
  mesh.geometry = asymptotic.geometry;
  mesh.vertices = asymptotic.vertices;
  mesh.n_asymptotic = asymptotic.n_asymptotic;
  mesh.n_boundary = asymptotic.n_boundary;
  mesh.needles = true;
  mesh.split = split;

  // One new vertex per split lateral edge, shared by the neighbours on both sides.
  std::map<std::pair<int, int>, int> split_vertex;
  auto vertex_on = [&](const Element2D& e, int a, int b, double eta) {
    const std::pair<int, int> key = std::minmax(e.vertices[a], e.vertices[b]);
    auto it = split_vertex.find(key);
    if (it != split_vertex.end()) return it->second;
    mesh.vertices.push_back(e.map.eval(split, eta).x);
    const int id = static_cast<int>(mesh.vertices.size() - 1);
    split_vertex.emplace(key, id);
    return id;
  };

  std::vector<Element2D> needles, regulars;
  for (std::size_t i = 0; i < asymptotic.n_boundary; ++i) {
    const Element2D& parent = asymptotic.elements[i];
    const int bottom = vertex_on(parent, 0, 1, 0.0);
    const int top = vertex_on(parent, 3, 2, 1.0);

    Element2D needle;
    needle.map = parent.map.restricted(0.0, split, 0.0, 1.0);
    needle.tag = ElementTag::Needle;
    needle.vertices = {parent.vertices[0], bottom, top, parent.vertices[3]};
    needle.boundary_edge = parent.boundary_edge;
    needle.parent = static_cast<int>(i);
    needles.push_back(needle);

    Element2D regular;
    regular.map = parent.map.restricted(split, 1.0, 0.0, 1.0);
    regular.tag = ElementTag::RegularSplit;
    regular.vertices = {bottom, parent.vertices[1], parent.vertices[2], top};
    regular.parent = static_cast<int>(i);
    regulars.push_back(regular);
  }
  mesh.elements = std::move(needles);
  mesh.elements.insert(mesh.elements.end(), regulars.begin(), regulars.end());
  mesh.elements.insert(mesh.elements.end(),
                       asymptotic.elements.begin() + static_cast<std::ptrdiff_t>(asymptotic.n_boundary),
                       asymptotic.elements.end());
  return mesh;
}

SblMesh2D build_mesh_2d(DiskGeometry geometry, double kappa, int p, double eps) {
  if (!(eps > 0.0) || eps > 1.0) throw std::invalid_argument("build_mesh_2d: eps must lie in (0, 1]");
  if (!(kappa > 0.0)) throw std::invalid_argument("build_mesh_2d: kappa must be positive");
  return apply_needle_split(build_asymptotic_mesh_disk(geometry.rho0, geometry.n_sectors), kappa, p, eps);
}

double mesh_area(const SblMesh2D& mesh, int n) {
  const poly::IntervalRule q = poly::map_rule(poly::gauss_rule(n), 0.0, 1.0);
  double area = 0.0;
  for (const auto& e : mesh.elements)
    for (std::size_t i = 0; i < q.points.size(); ++i)
      for (std::size_t j = 0; j < q.points.size(); ++j)
        area += q.weights[i] * q.weights[j] * e.map.eval(q.points[i], q.points[j]).det();
  return area;
}

double min_jacobian(const SblMesh2D& mesh, int n) {
  const poly::IntervalRule q = poly::map_rule(poly::gauss_rule(n), 0.0, 1.0);
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& e : mesh.elements)
    for (double xi : q.points)
      for (double eta : q.points) lo = std::min(lo, e.map.eval(xi, eta).det());
  return lo;
}

EdgePairingReport check_edge_pairing(const SblMesh2D& mesh) {
  // (min, max) -> (uses min->max, uses max->min, boundary flags)
  struct Uses {
    int forward = 0, backward = 0, boundary = 0;
  };
  std::map<std::pair<int, int>, Uses> edges;
  for (const auto& e : mesh.elements) {
    for (int k = 0; k < 4; ++k) {
      const int a = e.vertices[k], b = e.vertices[(k + 1) % 4];
      auto& u = edges[std::minmax(a, b)];
      (a < b ? u.forward : u.backward) += 1;
      if (e.boundary_edge == k) u.boundary += 1;
    }
  }
  EdgePairingReport report;
  for (const auto& [key, u] : edges) {
    if (u.forward == 1 && u.backward == 1 && u.boundary == 0) {
      ++report.interior_edges;
    } else if (u.forward + u.backward == 1 && u.boundary == 1) {
      ++report.boundary_edges;
    } else {
      ++report.inconsistent;
    }
  }
  return report;
}

nlohmann::json to_json(const SblMesh1D& mesh) {
  nlohmann::json j;
  j["nodes"] = mesh.nodes;
  j["tau"] = mesh.tau;
  j["kappa"] = mesh.kappa;
  j["eps"] = mesh.eps;
  j["p"] = mesh.p;
  auto& regions = j["regions"] = nlohmann::json::array();
  for (auto r : mesh.regions) regions.push_back(r == Region1D::Layer ? "LAYER" : "COARSE");
  return j;
}

nlohmann::json to_json(const SblMesh2D& mesh) {
  nlohmann::json j;
  j["geometry"] = {{"domain", "unit_disk"},
                   {"rho0", mesh.geometry.rho0},
                   {"n_sectors", mesh.geometry.n_sectors}};
  j["n_asymptotic"] = mesh.n_asymptotic;
  j["n_boundary"] = mesh.n_boundary;
  j["needles"] = mesh.needles;
  j["split"] = mesh.split;
  auto& verts = j["vertices"] = nlohmann::json::array();
  for (const auto& v : mesh.vertices) verts.push_back({v.x, v.y});
  auto& elems = j["elements"] = nlohmann::json::array();
  for (const auto& e : mesh.elements) {
    elems.push_back({{"tag", to_string(e.tag)},
                     {"map", {{"kind", to_string(e.map.kind())},
                              {"params", e.map.params()},
                              {"subrect", e.map.subrect()}}},
                     {"vertices", e.vertices},
                     {"boundary_edge", e.boundary_edge},
                     {"parent", e.parent}});
  }
  return j;
}

}  // namespace sblfem::mesh
