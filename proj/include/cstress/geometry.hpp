#pragma once

// Box and ball domains: boundary patches, edge curves, normals and
// quadrature rules.
//
// The box occupies [0, a] x [0, b] x [0, c]; its faces are named
// x0, x1, y0, y1, z0, z1. The ball is centred at the origin. Without a
// partition its boundary is one patch named "sphere"; a polar cap of
// half-angle theta splits it into "cap" and "rest" joined by a circle edge.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "cstress/poly.hpp"
#include "cstress/tensor.hpp"

namespace cstress {

enum class DomainKind { kBox, kBall };
enum class PatchShape { kFlat, kSpherical };

/// How the unit normal of a patch is continued off the surface. Only its
/// tangential derivatives are meaningful; kLinear exists so that results can be
/// checked for independence of the extension.
enum class NormalExtension {
  kCanonical,  // constant on flat faces, x / |x| on the sphere
  kLinear,     // constant on flat faces, x / R on the sphere
};

/// Normal and its ambient gradient (grad n)_ab = dn_a / dx_b at a point.
struct SurfaceFrame {
  Vec3 normal;
  Mat3 normal_gradient;
  Mat3 projector() const { return Mat3::identity() - outer(normal, normal); }
};

struct SurfaceNode {
  Vec3 x;
  Vec3 n;
  double w = 0.0;
};

struct VolumeNode {
  Vec3 x;
  double w = 0.0;
};

class SurfacePatch {
 public:
  std::string name;
  PatchShape shape = PatchShape::kFlat;
  bool dirichlet = false;
  double area = 0.0;
  std::vector<SurfaceNode> nodes;

  // kFlat: plane normal . x = offset, bounded by [lo, hi] in the box.
  Vec3 flat_normal;
  Vec3 lo;
  Vec3 hi;

  // kSpherical: polar-angle band [theta_min, theta_max] of the sphere.
  double radius = 0.0;
  double theta_min = 0.0;
  double theta_max = 0.0;

  SurfaceFrame frame(const Vec3& x, NormalExtension ext = NormalExtension::kCanonical) const;
  Vec3 normal(const Vec3& x) const { return frame(x).normal; }
  bool contains(const Vec3& x, double tol = 1e-9) const;
};

struct EdgeNode {
  Vec3 x;
  double w = 0.0;
  /// In-surface outward co-normal of each adjacent patch (side 0 = "+").
  std::array<Vec3, 2> conormal;
};

struct EdgeCurve {
  std::string name;
  std::array<std::size_t, 2> patches{};
  /// true for box edges where the normal jumps; false for partition
  /// circles on the smooth sphere.
  bool geometric = true;
  double length = 0.0;
  std::vector<EdgeNode> nodes;
};

struct DomainSpec {
  DomainKind kind = DomainKind::kBox;
  Vec3 extents{1.0, 1.0, 1.0};
  double radius = 1.0;
  /// Polynomial degree integrated exactly by the box rules.
  int quadrature_order = 8;
  /// Degree of the displacement fields the caller intends to use; 0 skips
  /// the check.
  int field_degree = 0;
  /// Patch names assigned to the Dirichlet part. On the ball "cap:<theta>"
  /// (radians) creates a Dirichlet polar cap.
  std::vector<std::string> dirichlet;
  /// Partition-only cap (both sides Neumann).
  std::optional<double> cap_angle;
};

/// Minimum quadrature order for displacement fields of the given degree.
constexpr int required_quadrature_order(int field_degree) { return 2 * field_degree + 2; }

class DomainGeometry {
 public:
  DomainKind kind = DomainKind::kBox;
  DomainSpec spec;
  std::vector<SurfacePatch> patches;
  std::vector<EdgeCurve> edges;
  std::vector<VolumeNode> volume_nodes;
  double volume = 0.0;

  bool smooth_boundary() const { return kind == DomainKind::kBall; }
  std::size_t patch_index(const std::string& name) const;
  std::vector<std::size_t> all_patches() const;
  std::vector<std::size_t> neumann_patches() const;
  std::vector<std::size_t> dirichlet_patches() const;
  /// Edges with exactly one Dirichlet side (the boundary of the Dirichlet part).
  std::vector<std::size_t> dirichlet_boundary_edges() const;
  double surface_area() const;
};

/// Throws std::invalid_argument for malformed specs and when the quadrature
/// order is below required_quadrature_order(field_degree).
DomainGeometry make_domain(const DomainSpec& spec);

template <class F>
auto integrate_volume(const DomainGeometry& d, F&& f) {
  using R = std::decay_t<std::invoke_result_t<F, const Vec3&>>;
  R acc{};
  for (const auto& q : d.volume_nodes) acc += q.w * f(q.x);
  return acc;
}

template <class F>
auto integrate_surface(const DomainGeometry& d, std::span<const std::size_t> patch_set, F&& f) {
  using R = std::decay_t<std::invoke_result_t<F, const SurfacePatch&, const SurfaceNode&>>;
  R acc{};
  for (std::size_t pi : patch_set) {
    const SurfacePatch& patch = d.patches.at(pi);
    for (const auto& q : patch.nodes) acc += q.w * f(patch, q);
  }
  return acc;
}

template <class F>
auto integrate_surface(const DomainGeometry& d, F&& f) {
  const auto all = d.all_patches();
  return integrate_surface(d, std::span<const std::size_t>(all), std::forward<F>(f));
}

template <class F>
auto integrate_edge(const DomainGeometry& d, std::span<const std::size_t> edge_set, F&& f) {
  using R = std::decay_t<std::invoke_result_t<F, const EdgeCurve&, const EdgeNode&>>;
  R acc{};
  for (std::size_t ei : edge_set) {
    const EdgeCurve& edge = d.edges.at(ei);
    for (const auto& q : edge.nodes) acc += q.w * f(edge, q);
  }
  return acc;
}

/// P . g for the ambient gradient g of an extension of a surface scalar.
/// Throws std::invalid_argument if x is not on the patch.
Vec3 surface_gradient(const SurfacePatch& patch, const Vec3& x, const Vec3& ambient_gradient);
Vec3 surface_gradient(const SurfacePatch& patch, const Vec3& x, const PolyScalar& phi);

}  // namespace cstress
