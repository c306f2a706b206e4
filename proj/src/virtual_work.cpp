#include "cstress/virtual_work.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cstress {

namespace {

struct VariationFields {
  explicit VariationFields(const PolyVector& du)
      : value(du), grad(grad_vector(du)), curl(curl_vector(du)) {}
  PolyVector value;
  PolyMatrix grad;
  PolyVector curl;
};

SurfaceWorkTerms patch_terms(const StressState& state, const VariationFields& var,
                             const DomainGeometry& domain, std::size_t patch_index) {
  const SurfacePatch& patch = domain.patches[patch_index];
  SurfaceWorkTerms t;
  for (const auto& q : patch.nodes) {
    const BoundaryTractions bt = boundary_tractions(state, patch, q.x);
    const Vec3 du = var.value.evaluate(q.x);
    const Mat3 P = tangential_projector(bt.normal);
    const Vec3 curl_du = P * var.curl.evaluate(q.x);
    const Vec3 dn_du = P * (var.grad.evaluate(q.x) * bt.normal);
    t.traction_mt += q.w * dot(bt.traction_mt, du);
    t.missing += q.w * dot(bt.missing, du);
    t.moment_mt += q.w * kMomentPairingWeight * dot(bt.moment_mt, curl_du);
    t.moment_corrected += q.w * kMomentPairingWeight * dot(bt.moment_corrected, dn_du);
  }
  for (const auto& edge : domain.edges) {
    for (std::size_t side = 0; side < 2; ++side) {
      if (edge.patches[side] != patch_index) continue;
      for (const auto& q : edge.nodes) {
        const EdgeJump ej = edge_jump(state, domain, edge, q);
        const Vec3 du = var.value.evaluate(q.x);
        t.edge_jump += q.w * kEdgePairingWeight * dot(ej.side[side], du);
        t.edge_curvature += q.w * kEdgePairingWeight * dot(ej.curvature_side[side], du);
      }
    }
  }
  return t;
}

}  // namespace

SurfaceWorkTerms& SurfaceWorkTerms::operator+=(const SurfaceWorkTerms& o) {
  traction_mt += o.traction_mt;
  missing += o.missing;
  moment_mt += o.moment_mt;
  moment_corrected += o.moment_corrected;
  edge_jump += o.edge_jump;
  edge_curvature += o.edge_curvature;
  return *this;
}

double internal_work(const StressState& state, const PolyVector& du, const DomainGeometry& domain) {
  const PolyMatrix grad_du = grad_vector(du);
  const PolyMatrix grad_curl_du = grad_vector(curl_vector(du));
  return integrate_volume(domain, [&](const Vec3& x) {
    return inner(state.sigma().evaluate(x), grad_du.evaluate(x)) +
           kCurvaturePairing * inner(state.couple().evaluate(x), grad_curl_du.evaluate(x));
  });
}

double internal_work(const MaterialParams& p, const PolyVector& u, const PolyVector& du,
                     const DomainGeometry& domain) {
  return internal_work(StressState(p, u), du, domain);
}

double total_energy(const MaterialParams& p, const PolyVector& u, const DomainGeometry& domain) {
  const PolyMatrix g = grad_vector(u);
  const PolyMatrix k = grad_vector(curl_vector(u));
  return integrate_volume(domain,
                          [&](const Vec3& x) { return energy_density(p, g.evaluate(x), k.evaluate(x)); });
}

double divergence_work(const StressState& state, const PolyVector& du, const DomainGeometry& domain) {
  return integrate_volume(domain, [&](const Vec3& x) {
    return dot(state.div_tau().evaluate(x), du.evaluate(x));
  });
}

SurfaceWorkTerms surface_work_terms(const StressState& state, const PolyVector& du,
                                    const DomainGeometry& domain,
                                    std::span<const std::size_t> patch_set) {
  const VariationFields var(du);
  SurfaceWorkTerms t;
  for (std::size_t pi : patch_set) t += patch_terms(state, var, domain, pi);
  return t;
}

double surface_work_mt(const MaterialParams& p, const PolyVector& u, const PolyVector& du,
                       const DomainGeometry& domain) {
  const auto neumann = domain.neumann_patches();
  return surface_work_terms(StressState(p, u), du, domain, neumann).mt();
}

double surface_work_corrected(const MaterialParams& p, const PolyVector& u, const PolyVector& du,
                              const DomainGeometry& domain) {
  const auto neumann = domain.neumann_patches();
  return surface_work_terms(StressState(p, u), du, domain, neumann).corrected();
}

BalanceReport balance_report(const MaterialParams& p, const PolyVector& u, const PolyVector& du,
                             const DomainGeometry& domain, const std::optional<PolyVector>& f,
                             bool estimate_quadrature_error) {
  const StressState state(p, u);
  const VariationFields var(du);

  BalanceReport r;
  r.internal = internal_work(state, du, domain);
  r.divergence = divergence_work(state, du, domain);
  r.manufactured_force = !f.has_value();
  if (f) {
    r.body_force = integrate_volume(domain, [&](const Vec3& x) {
      return dot(f->evaluate(x), du.evaluate(x));
    });
  } else {
    r.body_force = -r.divergence;
  }
  r.equilibrium = r.divergence + r.body_force;

  for (std::size_t pi = 0; pi < domain.patches.size(); ++pi) {
    PatchWork pw{domain.patches[pi].name, domain.patches[pi].dirichlet,
                 patch_terms(state, var, domain, pi)};
    (pw.dirichlet ? r.dirichlet : r.neumann) += pw.terms;
    r.total += pw.terms;
    r.patches.push_back(std::move(pw));
  }

  r.closed = r.internal + r.divergence;
  r.residual_corrected = std::abs(r.closed - r.total.corrected());
  r.residual_mt = std::abs(r.closed - r.total.mt());
  r.discrepancy = r.closed - r.total.mt_corrected_style();
  r.missing_plus_edges = r.total.missing + r.total.edges();
  r.accounting_error = std::abs(r.discrepancy - r.missing_plus_edges);
  r.scale = std::max(1.0, std::abs(r.internal));
  r.mt_closure_applicable = domain.smooth_boundary();

  r.quadrature_order = domain.spec.quadrature_order;
  r.volume_nodes = domain.volume_nodes.size();
  for (const auto& patch : domain.patches) r.surface_nodes += patch.nodes.size();
  for (const auto& edge : domain.edges) r.edge_nodes += edge.nodes.size();

  if (estimate_quadrature_error) {
    DomainSpec refined = domain.spec;
    refined.quadrature_order += 4;
    const BalanceReport fine = balance_report(p, u, du, make_domain(refined), f, false);
    r.residual_corrected_quadrature_delta = std::abs(fine.residual_corrected - r.residual_corrected);
    r.residual_mt_quadrature_delta = std::abs(fine.residual_mt - r.residual_mt);
  }
  return r;
}

Vec3 curl_from_gradient(const Mat3& g) {
  return {g(2, 1) - g(1, 2), g(0, 2) - g(2, 0), g(1, 0) - g(0, 1)};
}

TangentMap geometric_bc_equivalence(const SurfacePatch& patch, const Vec3& x, const Mat3& grad_u) {
  TangentMap tm;
  const Vec3 n = patch.frame(x).normal;
  const Mat3 P = tangential_projector(n);
  tm.normal = n;

  std::size_t k = 0;
  for (std::size_t i = 1; i < 3; ++i)
    if (std::abs(n[i]) < std::abs(n[k])) k = i;
  Vec3 t1 = P * Vec3::unit(k);
  t1 *= 1.0 / norm(t1);
  const Vec3 t2 = cross(n, t1);
  tm.tangent_basis = {t1, t2};

  // grad u = G_t + d (x) n with G_t = grad u P carried by u on the surface.
  const Mat3 tangential = grad_u * P;
  tm.offset = P * curl_from_gradient(tangential);
  for (std::size_t c = 0; c < 2; ++c) {
    const Vec3 response = P * curl_from_gradient(outer(tm.tangent_basis[c], n));
    tm.map[0][c] = dot(response, t1);
    tm.map[1][c] = dot(response, t2);
  }

  // Singular values of the 2x2 map.
  const double a = tm.map[0][0], b = tm.map[0][1], c = tm.map[1][0], d = tm.map[1][1];
  const double s1 = a * a + b * b + c * c + d * d;
  const double det = a * d - b * c;
  const double disc = std::sqrt(std::max(0.0, s1 * s1 - 4.0 * det * det));
  const double smax = std::sqrt(0.5 * (s1 + disc));
  const double smin = std::sqrt(std::max(0.0, 0.5 * (s1 - disc)));
  tm.invertible = smin > 1e-12 * std::max(1.0, smax);
  tm.condition_number = tm.invertible ? smax / smin : INFINITY;
  tm.independent_conditions = 3 + (smax > 1e-12 ? 1 : 0) + (tm.invertible ? 1 : 0);

  const Vec3 dn = P * (grad_u * n);
  const Vec3 coords{dot(dn, t1), dot(dn, t2), 0.0};
  const Vec3 predicted = tm.offset + (tm.map[0][0] * coords[0] + tm.map[0][1] * coords[1]) * t1 +
                         (tm.map[1][0] * coords[0] + tm.map[1][1] * coords[1]) * t2;
  const Vec3 actual = P * curl_from_gradient(grad_u);
  tm.reconstruction_error = norm(actual - predicted);

  const Mat3 perturbed = grad_u + outer(n, n);
  const double scale = std::max(1.0, frobenius(grad_u));
  const double d_dn = norm(P * (perturbed * n) - dn);
  const double d_curl = norm(P * curl_from_gradient(perturbed) - actual);
  tm.normal_normal_independent = d_dn <= 1e-12 * scale && d_curl <= 1e-12 * scale;
  return tm;
}

}  // namespace cstress
