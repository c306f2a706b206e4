#include "cstress/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cstress/quadrature.hpp"

namespace cstress {

namespace {

constexpr double kPi = std::numbers::pi;

const char* const kFaceNames[6] = {"x0", "x1", "y0", "y1", "z0", "z1"};

int box_points(int order) { return order / 2 + 1; }
// The sphere integrands carry the normal x / R, so the angular rules get a
// few degrees of headroom over the box rules.
int polar_points(int order) { return order / 2 + 3; }
int azimuth_points(int order) { return order + 5; }
int radial_points(int order) { return order / 2 + 3; }

SurfacePatch make_face(int face, const Vec3& ext, int order) {
  const auto axis = static_cast<std::size_t>(face / 2);
  const bool upper = face % 2 == 1;
  SurfacePatch p;
  p.name = kFaceNames[face];
  p.shape = PatchShape::kFlat;
  p.flat_normal = (upper ? 1.0 : -1.0) * Vec3::unit(axis);
  p.lo = Vec3{0.0, 0.0, 0.0};
  p.hi = ext;
  if (upper) p.lo[axis] = ext[axis];
  else p.hi[axis] = 0.0;

  const std::size_t s_axis = (axis + 1) % 3;
  const std::size_t t_axis = (axis + 2) % 3;
  const Rule1D rs = gauss_legendre(box_points(order), 0.0, ext[s_axis]);
  const Rule1D rt = gauss_legendre(box_points(order), 0.0, ext[t_axis]);
  for (std::size_t i = 0; i < rs.nodes.size(); ++i)
    for (std::size_t j = 0; j < rt.nodes.size(); ++j) {
      SurfaceNode q;
      q.x[axis] = upper ? ext[axis] : 0.0;
      q.x[s_axis] = rs.nodes[i];
      q.x[t_axis] = rt.nodes[j];
      q.n = p.flat_normal;
      q.w = rs.weights[i] * rt.weights[j];
      p.nodes.push_back(q);
    }
  p.area = ext[s_axis] * ext[t_axis];
  return p;
}

Vec3 sphere_point(double r, double theta, double phi) {
  return {r * std::sin(theta) * std::cos(phi), r * std::sin(theta) * std::sin(phi),
          r * std::cos(theta)};
}

SurfacePatch make_band(const std::string& name, double radius, double theta_min, double theta_max,
                       int order) {
  SurfacePatch p;
  p.name = name;
  p.shape = PatchShape::kSpherical;
  p.radius = radius;
  p.theta_min = theta_min;
  p.theta_max = theta_max;
  // Gauss in cos(theta), uniform in phi.
  const Rule1D rt = gauss_legendre(polar_points(order), std::cos(theta_max), std::cos(theta_min));
  const Rule1D rp = uniform_periodic(azimuth_points(order));
  for (std::size_t i = 0; i < rt.nodes.size(); ++i) {
    const double theta = std::acos(std::clamp(rt.nodes[i], -1.0, 1.0));
    for (std::size_t j = 0; j < rp.nodes.size(); ++j) {
      SurfaceNode q;
      q.x = sphere_point(radius, theta, rp.nodes[j]);
      q.n = (1.0 / radius) * q.x;
      q.w = radius * radius * rt.weights[i] * rp.weights[j];
      p.nodes.push_back(q);
    }
  }
  p.area = 2.0 * kPi * radius * radius * (std::cos(theta_min) - std::cos(theta_max));
  return p;
}

void add_box_edges(DomainGeometry& d, int order) {
  const Vec3& ext = d.spec.extents;
  // An edge runs along `axis`; the two other coordinates sit at 0 or the extent.
  for (std::size_t axis = 0; axis < 3; ++axis) {
    const std::size_t a1 = (axis + 1) % 3;
    const std::size_t a2 = (axis + 2) % 3;
    const Rule1D r = gauss_legendre(box_points(order), 0.0, ext[axis]);
    for (int s1 = 0; s1 < 2; ++s1)
      for (int s2 = 0; s2 < 2; ++s2) {
        const std::size_t f1 = 2 * a1 + static_cast<std::size_t>(s1);
        const std::size_t f2 = 2 * a2 + static_cast<std::size_t>(s2);
        EdgeCurve e;
        e.name = d.patches[f1].name + "|" + d.patches[f2].name;
        e.patches = {f1, f2};
        e.geometric = true;
        e.length = ext[axis];
        // The outward co-normal of one face at the shared edge is the
        // outward normal of the other face.
        const Vec3 nu1 = d.patches[f2].flat_normal;
        const Vec3 nu2 = d.patches[f1].flat_normal;
        for (std::size_t i = 0; i < r.nodes.size(); ++i) {
          EdgeNode q;
          q.x[axis] = r.nodes[i];
          q.x[a1] = s1 ? ext[a1] : 0.0;
          q.x[a2] = s2 ? ext[a2] : 0.0;
          q.w = r.weights[i];
          q.conormal = {nu1, nu2};
          e.nodes.push_back(q);
        }
        d.edges.push_back(std::move(e));
      }
  }
}

void add_cap_edge(DomainGeometry& d, double theta, int order) {
  EdgeCurve e;
  e.name = "cap|rest";
  e.patches = {d.patch_index("cap"), d.patch_index("rest")};
  e.geometric = false;
  const double R = d.spec.radius;
  e.length = 2.0 * kPi * R * std::sin(theta);
  const Rule1D rp = uniform_periodic(azimuth_points(order));
  for (std::size_t j = 0; j < rp.nodes.size(); ++j) {
    const double phi = rp.nodes[j];
    EdgeNode q;
    q.x = sphere_point(R, theta, phi);
    q.w = R * std::sin(theta) * rp.weights[j];
    const Vec3 e_theta{std::cos(theta) * std::cos(phi), std::cos(theta) * std::sin(phi),
                       -std::sin(theta)};
    q.conormal = {e_theta, -e_theta};
    e.nodes.push_back(q);
  }
  d.edges.push_back(std::move(e));
}

double parse_cap(const std::string& name) {
  const std::string value = name.substr(4);
  std::size_t used = 0;
  double theta = 0.0;
  try {
    theta = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size())
    throw std::invalid_argument("malformed cap partition '" + name + "'");
  return theta;
}

}  // namespace

SurfaceFrame SurfacePatch::frame(const Vec3& x, NormalExtension ext) const {
  if (shape == PatchShape::kFlat) return {flat_normal, Mat3{}};
  if (ext == NormalExtension::kLinear) return {(1.0 / radius) * x, (1.0 / radius) * Mat3::identity()};
  const double r = norm(x);
  const Vec3 n = (1.0 / r) * x;
  return {n, (1.0 / r) * (Mat3::identity() - outer(n, n))};
}

bool SurfacePatch::contains(const Vec3& x, double tol) const {
  if (shape == PatchShape::kFlat) {
    for (std::size_t k = 0; k < 3; ++k)
      if (x[k] < lo[k] - tol || x[k] > hi[k] + tol) return false;
    return true;
  }
  const double r = norm(x);
  if (std::abs(r - radius) > tol * std::max(1.0, radius)) return false;
  const double theta = std::acos(std::clamp(x[2] / r, -1.0, 1.0));
  return theta >= theta_min - tol && theta <= theta_max + tol;
}

std::size_t DomainGeometry::patch_index(const std::string& name) const {
  for (std::size_t i = 0; i < patches.size(); ++i)
    if (patches[i].name == name) return i;
  throw std::invalid_argument("unknown patch '" + name + "'");
}

std::vector<std::size_t> DomainGeometry::all_patches() const {
  std::vector<std::size_t> r(patches.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = i;
  return r;
}

std::vector<std::size_t> DomainGeometry::neumann_patches() const {
  std::vector<std::size_t> r;
  for (std::size_t i = 0; i < patches.size(); ++i)
    if (!patches[i].dirichlet) r.push_back(i);
  return r;
}

std::vector<std::size_t> DomainGeometry::dirichlet_patches() const {
  std::vector<std::size_t> r;
  for (std::size_t i = 0; i < patches.size(); ++i)
    if (patches[i].dirichlet) r.push_back(i);
  return r;
}

std::vector<std::size_t> DomainGeometry::dirichlet_boundary_edges() const {
  std::vector<std::size_t> r;
  for (std::size_t i = 0; i < edges.size(); ++i)
    if (patches[edges[i].patches[0]].dirichlet != patches[edges[i].patches[1]].dirichlet)
      r.push_back(i);
  return r;
}

double DomainGeometry::surface_area() const {
  double a = 0.0;
  for (const auto& p : patches) a += p.area;
  return a;
}

DomainGeometry make_domain(const DomainSpec& spec) {
  const int order = spec.quadrature_order;
  if (order < 1) throw std::invalid_argument("quadrature order must be positive");
  if (spec.field_degree < 0 || spec.field_degree > kMaxDegree)
    throw std::invalid_argument("field degree outside [0, " + std::to_string(kMaxDegree) + "]");
  if (spec.field_degree > 0 && order < required_quadrature_order(spec.field_degree))
    throw std::invalid_argument("quadrature order " + std::to_string(order) +
                                " too low for fields of degree " +
                                std::to_string(spec.field_degree) + " (need " +
                                std::to_string(required_quadrature_order(spec.field_degree)) + ")");

  DomainGeometry d;
  d.kind = spec.kind;
  d.spec = spec;

  if (spec.kind == DomainKind::kBox) {
    const Vec3& ext = spec.extents;
    if (!(ext[0] > 0.0 && ext[1] > 0.0 && ext[2] > 0.0))
      throw std::invalid_argument("box extents must be positive");
    for (int f = 0; f < 6; ++f) d.patches.push_back(make_face(f, ext, order));
    add_box_edges(d, order);

    const Rule1D rx = gauss_legendre(box_points(order), 0.0, ext[0]);
    const Rule1D ry = gauss_legendre(box_points(order), 0.0, ext[1]);
    const Rule1D rz = gauss_legendre(box_points(order), 0.0, ext[2]);
    for (std::size_t i = 0; i < rx.nodes.size(); ++i)
      for (std::size_t j = 0; j < ry.nodes.size(); ++j)
        for (std::size_t k = 0; k < rz.nodes.size(); ++k)
          d.volume_nodes.push_back({{rx.nodes[i], ry.nodes[j], rz.nodes[k]},
                                    rx.weights[i] * ry.weights[j] * rz.weights[k]});
    d.volume = ext[0] * ext[1] * ext[2];

    for (const auto& name : spec.dirichlet) d.patches[d.patch_index(name)].dirichlet = true;
    return d;
  }

  const double R = spec.radius;
  if (!(R > 0.0)) throw std::invalid_argument("ball radius must be positive");

  std::optional<double> cap = spec.cap_angle;
  bool cap_dirichlet = false;
  bool sphere_dirichlet = false;
  for (const auto& name : spec.dirichlet) {
    if (name.rfind("cap:", 0) == 0) {
      cap = parse_cap(name);
      cap_dirichlet = true;
    } else if (name == "sphere" || name == "rest") {
      sphere_dirichlet = true;
    } else {
      throw std::invalid_argument("unknown ball patch '" + name + "'");
    }
  }

  if (cap) {
    if (!(*cap > 0.0 && *cap < kPi)) throw std::invalid_argument("cap angle must lie in (0, pi)");
    d.patches.push_back(make_band("cap", R, 0.0, *cap, order));
    d.patches.push_back(make_band("rest", R, *cap, kPi, order));
    d.patches[0].dirichlet = cap_dirichlet;
    d.patches[1].dirichlet = sphere_dirichlet;
    add_cap_edge(d, *cap, order);
  } else {
    d.patches.push_back(make_band("sphere", R, 0.0, kPi, order));
    d.patches[0].dirichlet = sphere_dirichlet;
  }

  const SurfacePatch unit = make_band("unit", 1.0, 0.0, kPi, order);
  const Rule1D rr = gauss_legendre(radial_points(order), 0.0, R);
  for (std::size_t i = 0; i < rr.nodes.size(); ++i) {
    const double r = rr.nodes[i];
    for (const auto& s : unit.nodes) d.volume_nodes.push_back({r * s.x, rr.weights[i] * r * r * s.w});
  }
  d.volume = 4.0 / 3.0 * kPi * R * R * R;
  return d;
}

Vec3 surface_gradient(const SurfacePatch& patch, const Vec3& x, const Vec3& ambient_gradient) {
  if (!patch.contains(x)) throw std::invalid_argument("surface_gradient: point not on patch " + patch.name);
  return patch.frame(x).projector() * ambient_gradient;
}

Vec3 surface_gradient(const SurfacePatch& patch, const Vec3& x, const PolyScalar& phi) {
  return surface_gradient(patch, x, grad(phi).evaluate(x));
}

}  // namespace cstress
