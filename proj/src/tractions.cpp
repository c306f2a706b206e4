#include "cstress/tractions.hpp"

#include <stdexcept>

namespace cstress {

namespace {

struct LocalStress {
  Mat3 couple;
  Ten3 grad_couple;
  Mat3 tau;
};

LocalStress local_stress(const StressState& s, const Vec3& x) {
  return {s.couple().evaluate(x), s.grad_couple().evaluate(x), s.tau().evaluate(x)};
}

// d/dx_k (n_a m_ab n_b) with (grad n)_ak = G(a, k).
Vec3 normal_couple_gradient(const SurfaceFrame& f, const Mat3& m, const Ten3& dm) {
  const Vec3& n = f.normal;
  const Mat3& G = f.normal_gradient;
  const Vec3 mn = m * n;
  const Vec3 mtn = transpose(m) * n;
  Vec3 g = transpose(G) * mn + transpose(G) * mtn;
  for (std::size_t k = 0; k < 3; ++k) {
    double s = 0.0;
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = 0; b < 3; ++b) s += n[a] * dm(a, b, k) * n[b];
    g[k] += s;
  }
  return g;
}

// -1/2 grad[anti(P m n) P] : P, with every factor differentiated through the
// frame's normal extension.
Vec3 missing_from(const SurfaceFrame& f, const Mat3& m, const Ten3& dm) {
  const Vec3& n = f.normal;
  const Mat3& G = f.normal_gradient;
  const Mat3 P = f.projector();
  const Vec3 mn = m * n;
  const Vec3 w = P * mn;

  // dP_ab/dx_k = -(G_ak n_b + n_a G_bk)
  Ten3 dP;
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b)
      for (std::size_t k = 0; k < 3; ++k) dP(a, b, k) = -(G(a, k) * n[b] + n[a] * G(b, k));

  // dw_a/dx_k = dP_ab,k (m n)_b + P_ab (m_bc,k n_c + m_bc G_ck)
  Mat3 dw;
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t k = 0; k < 3; ++k) {
      double s = 0.0;
      for (std::size_t b = 0; b < 3; ++b) {
        double dmn = 0.0;
        for (std::size_t c = 0; c < 3; ++c) dmn += dm(b, c, k) * n[c] + m(b, c) * G(c, k);
        s += dP(a, b, k) * mn[b] + P(a, b) * dmn;
      }
      dw(a, k) = s;
    }

  // A = anti(w) P;  dA_ij/dx_k = anti(dw_k)_ia P_aj + anti(w)_ia dP_aj,k
  const Mat3 aw = anti(w);
  Ten3 dA;
  for (std::size_t k = 0; k < 3; ++k) {
    const Mat3 adw = anti(column(dw, k));
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        double s = 0.0;
        for (std::size_t a = 0; a < 3; ++a) s += adw(i, a) * P(a, j) + aw(i, a) * dP(a, j, k);
        dA(i, j, k) = s;
      }
  }
  return -0.5 * double_contract(dA, P);
}

const SurfacePatch& side_patch(const DomainGeometry& d, const EdgeCurve& e, std::size_t side) {
  const std::size_t idx = e.patches[side];
  if (idx >= d.patches.size())
    throw std::invalid_argument("edge " + e.name + " references an unregistered patch");
  return d.patches[idx];
}

}  // namespace

std::string to_string(TractionFlavor f) {
  return f == TractionFlavor::kCorrected ? "corrected" : "mt";
}

BoundaryTractions boundary_tractions(const StressState& state, const SurfacePatch& patch,
                                     const Vec3& x, NormalExtension ext) {
  const SurfaceFrame f = patch.frame(x, ext);
  const LocalStress ls = local_stress(state, x);
  const Vec3& n = f.normal;
  const Mat3 P = f.projector();

  BoundaryTractions bt;
  bt.normal = n;
  const Mat3 msym = sym(ls.couple);
  bt.normal_couple = dot(n, msym * n);
  const Vec3 dphi = surface_gradient(patch, x, normal_couple_gradient(f, ls.couple, ls.grad_couple));
  bt.traction_mt = ls.tau * n - 0.5 * cross(n, dphi);
  const Vec3 w = P * (ls.couple * n);
  bt.moment_mt = w;
  bt.missing = missing_from(f, ls.couple, ls.grad_couple);
  bt.traction_corrected = bt.traction_mt + bt.missing;
  bt.moment_corrected = P * (anti(w) * n);
  return bt;
}

Vec3 traction_mt(const StressState& s, const SurfacePatch& patch, const Vec3& x) {
  return boundary_tractions(s, patch, x).traction_mt;
}
Vec3 moment_mt(const StressState& s, const SurfacePatch& patch, const Vec3& x) {
  return boundary_tractions(s, patch, x).moment_mt;
}
Vec3 missing_term(const StressState& s, const SurfacePatch& patch, const Vec3& x, NormalExtension ext) {
  return boundary_tractions(s, patch, x, ext).missing;
}
Vec3 traction_corrected(const StressState& s, const SurfacePatch& patch, const Vec3& x) {
  return boundary_tractions(s, patch, x).traction_corrected;
}
Vec3 moment_corrected(const StressState& s, const SurfacePatch& patch, const Vec3& x) {
  return boundary_tractions(s, patch, x).moment_corrected;
}

Vec3 traction_mt(const MaterialParams& p, const PolyVector& u, const SurfacePatch& patch, const Vec3& x) {
  return traction_mt(StressState(p, u), patch, x);
}
Vec3 moment_mt(const MaterialParams& p, const PolyVector& u, const SurfacePatch& patch, const Vec3& x) {
  return moment_mt(StressState(p, u), patch, x);
}
Vec3 missing_term(const MaterialParams& p, const PolyVector& u, const SurfacePatch& patch, const Vec3& x) {
  return missing_term(StressState(p, u), patch, x);
}
Vec3 traction_corrected(const MaterialParams& p, const PolyVector& u, const SurfacePatch& patch,
                        const Vec3& x) {
  return traction_corrected(StressState(p, u), patch, x);
}
Vec3 moment_corrected(const MaterialParams& p, const PolyVector& u, const SurfacePatch& patch,
                      const Vec3& x) {
  return moment_corrected(StressState(p, u), patch, x);
}

EdgeJump edge_jump(const StressState& state, const DomainGeometry& domain, const EdgeCurve& edge,
                   const EdgeNode& node) {
  const Mat3 m = state.couple().evaluate(node.x);
  EdgeJump ej;
  for (std::size_t s = 0; s < 2; ++s) {
    const SurfacePatch& patch = side_patch(domain, edge, s);
    const Vec3 n = patch.frame(node.x).normal;
    const Vec3& nu = node.conormal[s];
    const Vec3 mn = m * n;
    const Vec3 w = tangential_projector(n) * mn;
    ej.side[s] = anti(w) * nu;
    ej.curvature_side[s] = dot(n, mn) * cross(n, nu);
  }
  ej.jump = ej.side[0] + ej.side[1];
  ej.curvature_jump = ej.curvature_side[0] + ej.curvature_side[1];
  ej.line_traction = ej.jump + ej.curvature_jump;
  return ej;
}

EdgeJump edge_jump(const MaterialParams& p, const PolyVector& u, const DomainGeometry& domain,
                   const EdgeCurve& edge, const EdgeNode& node) {
  return edge_jump(StressState(p, u), domain, edge, node);
}

std::vector<TractionSample> sample_tractions(const StressState& state, const DomainGeometry& domain,
                                             std::span<const std::size_t> patch_set) {
  std::vector<TractionSample> out;
  for (std::size_t pi : patch_set) {
    const SurfacePatch& patch = domain.patches.at(pi);
    for (const auto& q : patch.nodes) {
      const BoundaryTractions bt = boundary_tractions(state, patch, q.x);
      out.push_back({patch.name, q.x, bt.normal, bt.traction_mt, bt.moment_mt,
                     TractionFlavor::kMindlinTiersten});
      out.push_back({patch.name, q.x, bt.normal, bt.traction_corrected, bt.moment_corrected,
                     TractionFlavor::kCorrected});
    }
  }
  return out;
}

}  // namespace cstress
