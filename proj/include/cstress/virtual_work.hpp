#pragma once

// Virtual-power bookkeeping for the couple stress model.
//
// For any displacement u and variation du the closed identity
//
//   I + D = S_total
//
// holds, where I = int <sigma, grad du> + 1/2 <m, grad curl du> dV is the
// internal work, D = int <Div tau, du> dV and S_total is the boundary work of
// one of the traction sets below taken over the whole boundary:
//
//   corrected : int <t_corr, du> + 1/2 <g_corr, P grad du n> dS
//               + edges 1/2 <pi + curvature remainder, du> ds
//   classical : int <t_mt, du> + 1/2 <g_mt, P curl du> dS
//
// The classical set only closes on smooth boundaries; on the box the edge
// remainder of its curvature term is missing.

#include <optional>
#include <string>
#include <vector>

#include "cstress/constitutive.hpp"
#include "cstress/geometry.hpp"
#include "cstress/tractions.hpp"

namespace cstress {

/// Weight of the moment pairings against P curl du and P grad du n.
inline constexpr double kMomentPairingWeight = 0.5;
/// Weight of edge line tractions against du.
inline constexpr double kEdgePairingWeight = 0.5;

double internal_work(const StressState& state, const PolyVector& du, const DomainGeometry& domain);
double internal_work(const MaterialParams& p, const PolyVector& u, const PolyVector& du,
                     const DomainGeometry& domain);
/// Total energy int W(u) dV.
double total_energy(const MaterialParams& p, const PolyVector& u, const DomainGeometry& domain);
/// int <Div tau(u), du> dV
double divergence_work(const StressState& state, const PolyVector& du, const DomainGeometry& domain);

/// Boundary work contributions over a set of patches. Edge terms are counted
/// for every edge side whose patch belongs to the set.
struct SurfaceWorkTerms {
  double traction_mt = 0.0;       // int <t_mt, du>
  double missing = 0.0;           // int <M, du>
  double moment_mt = 0.0;         // 1/2 int <g_mt, P curl du>
  double moment_corrected = 0.0;  // 1/2 int <g_corr, P grad du n>
  double edge_jump = 0.0;         // 1/2 int <pi, du> over edges
  double edge_curvature = 0.0;    // 1/2 int phi <n x nu, du> over edges

  double corrected() const {
    return traction_mt + missing + moment_corrected + edge_jump + edge_curvature;
  }
  double mt() const { return traction_mt + moment_mt; }
  /// Classical force traction with the corrected moment pairing, no edges and
  /// no missing term.
  double mt_corrected_style() const { return traction_mt + moment_corrected; }
  double edges() const { return edge_jump + edge_curvature; }

  SurfaceWorkTerms& operator+=(const SurfaceWorkTerms& o);
};

SurfaceWorkTerms surface_work_terms(const StressState& state, const PolyVector& du,
                                    const DomainGeometry& domain,
                                    std::span<const std::size_t> patch_set);

/// Classical surface work over the Neumann part. Closure claims are only
/// meaningful when domain.smooth_boundary().
double surface_work_mt(const MaterialParams& p, const PolyVector& u, const PolyVector& du,
                       const DomainGeometry& domain);
/// Corrected surface work over the Neumann part, edges included.
double surface_work_corrected(const MaterialParams& p, const PolyVector& u, const PolyVector& du,
                              const DomainGeometry& domain);

struct PatchWork {
  std::string patch;
  bool dirichlet = false;
  SurfaceWorkTerms terms;
};

struct BalanceReport {
  double internal = 0.0;
  double divergence = 0.0;  // int <Div tau, du>
  double body_force = 0.0;  // int <f, du>
  double equilibrium = 0.0; // int <Div tau + f, du>
  bool manufactured_force = true;

  std::vector<PatchWork> patches;
  SurfaceWorkTerms neumann;
  SurfaceWorkTerms dirichlet;
  SurfaceWorkTerms total;

  double closed = 0.0;               // internal + divergence
  double residual_corrected = 0.0;   // |closed - total.corrected()|
  double residual_mt = 0.0;          // |closed - total.mt()|
  double discrepancy = 0.0;          // closed - total.mt_corrected_style()
  double missing_plus_edges = 0.0;   // total.missing + total.edges()
  double accounting_error = 0.0;     // |discrepancy - missing_plus_edges|
  double scale = 1.0;                // max(1, |internal|)
  bool mt_closure_applicable = false;

  int quadrature_order = 0;
  std::size_t volume_nodes = 0;
  std::size_t surface_nodes = 0;
  std::size_t edge_nodes = 0;
  /// Change of the residuals when the quadrature order is raised by 4.
  std::optional<double> residual_corrected_quadrature_delta;
  std::optional<double> residual_mt_quadrature_delta;

  double relative_residual_corrected() const { return residual_corrected / scale; }
  double relative_residual_mt() const { return residual_mt / scale; }
};

/// f defaults to the manufactured body force -Div tau(u).
BalanceReport balance_report(const MaterialParams& p, const PolyVector& u, const PolyVector& du,
                             const DomainGeometry& domain,
                             const std::optional<PolyVector>& f = std::nullopt,
                             bool estimate_quadrature_error = false);

/// Tangent-plane relation between the two ways of prescribing the second
/// geometric condition: P curl u = L (P grad u n) + offset, where offset only
/// depends on tangential derivatives of u.
struct TangentMap {
  Vec3 normal;
  std::array<Vec3, 2> tangent_basis;
  std::array<std::array<double, 2>, 2> map{};
  Vec3 offset;
  double condition_number = 0.0;
  bool invertible = false;
  /// Adding c n (x) n to grad u changes neither P grad u n nor P curl u.
  bool normal_normal_independent = false;
  /// |P curl u - (L (P grad u n) + offset)|
  double reconstruction_error = 0.0;
  /// 3 displacement components + rank(L).
  int independent_conditions = 0;
};

TangentMap geometric_bc_equivalence(const SurfacePatch& patch, const Vec3& x, const Mat3& grad_u);

/// curl u from grad u: anti(curl u) = grad u - grad u^T.
Vec3 curl_from_gradient(const Mat3& grad_u);

}  // namespace cstress
