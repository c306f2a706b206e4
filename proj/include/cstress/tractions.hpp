#pragma once

// Pointwise boundary quantities of the couple stress model, for both the
// classical Mindlin-Tiersten traction set and the corrected set.
//
// With P = 1 - n (x) n, w = P m n and phi = <n, sym(m) n>:
//
//   classical force      t_mt   = tau n - 1/2 n x grad(phi)
//   classical moment     g_mt   = P m n
//   missing term         M      = -1/2 grad[anti(w) P] : P
//   corrected force      t_corr = t_mt + M
//   corrected moment     g_corr = P anti(w) n  (= w x n)
//   edge jump            pi     = anti(w+) nu+ + anti(w-) nu-
//
// Each side of an edge uses its own outward co-normal nu, so for two
// coplanar sides nu- = -nu+ and pi reduces to (anti(w+) - anti(w-)) nu+.
// The classical curvature term also leaves a line contribution
// phi (n x nu) per side at geometric edges; it is reported separately.

#include <array>
#include <string>
#include <vector>

#include "cstress/constitutive.hpp"
#include "cstress/geometry.hpp"

namespace cstress {

enum class TractionFlavor { kMindlinTiersten, kCorrected };
std::string to_string(TractionFlavor f);

/// All boundary quantities at one point, sharing one couple stress evaluation.
struct BoundaryTractions {
  Vec3 normal;
  Vec3 traction_mt;
  Vec3 moment_mt;
  Vec3 missing;
  Vec3 traction_corrected;
  Vec3 moment_corrected;
  double normal_couple = 0.0;  // phi = <n, sym(m) n>
};

BoundaryTractions boundary_tractions(const StressState& state, const SurfacePatch& patch,
                                     const Vec3& x,
                                     NormalExtension ext = NormalExtension::kCanonical);

Vec3 traction_mt(const StressState& state, const SurfacePatch& patch, const Vec3& x);
Vec3 moment_mt(const StressState& state, const SurfacePatch& patch, const Vec3& x);
Vec3 missing_term(const StressState& state, const SurfacePatch& patch, const Vec3& x,
                  NormalExtension ext = NormalExtension::kCanonical);
Vec3 traction_corrected(const StressState& state, const SurfacePatch& patch, const Vec3& x);
Vec3 moment_corrected(const StressState& state, const SurfacePatch& patch, const Vec3& x);

// Convenience overloads building the stress state from (params, u).
Vec3 traction_mt(const MaterialParams& p, const PolyVector& u, const SurfacePatch& patch, const Vec3& x);
Vec3 moment_mt(const MaterialParams& p, const PolyVector& u, const SurfacePatch& patch, const Vec3& x);
Vec3 missing_term(const MaterialParams& p, const PolyVector& u, const SurfacePatch& patch, const Vec3& x);
Vec3 traction_corrected(const MaterialParams& p, const PolyVector& u, const SurfacePatch& patch,
                        const Vec3& x);
Vec3 moment_corrected(const MaterialParams& p, const PolyVector& u, const SurfacePatch& patch,
                      const Vec3& x);

struct EdgeJump {
  /// anti(P m n) nu evaluated with each side's own frame.
  std::array<Vec3, 2> side;
  Vec3 jump;
  /// phi (n x nu) per side, the line remainder of the classical curvature term.
  std::array<Vec3, 2> curvature_side;
  Vec3 curvature_jump;
  /// jump + curvature_jump = sum over sides of anti(m n) nu.
  Vec3 line_traction;
};

/// Throws std::invalid_argument if the edge references unregistered patches.
EdgeJump edge_jump(const StressState& state, const DomainGeometry& domain, const EdgeCurve& edge,
                   const EdgeNode& node);
EdgeJump edge_jump(const MaterialParams& p, const PolyVector& u, const DomainGeometry& domain,
                   const EdgeCurve& edge, const EdgeNode& node);

struct TractionSample {
  std::string patch;
  Vec3 point;
  Vec3 normal;
  Vec3 t;
  Vec3 g;
  TractionFlavor flavor = TractionFlavor::kCorrected;
};

/// Tractions at every quadrature node of the given patches, one sample per
/// node and flavor.
std::vector<TractionSample> sample_tractions(const StressState& state, const DomainGeometry& domain,
                                             std::span<const std::size_t> patch_set);

}  // namespace cstress
