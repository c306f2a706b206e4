#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cstress/geometry.hpp"
#include "cstress/poly_parse.hpp"
#include "cstress/tractions.hpp"
#include "support.hpp"

using namespace cstress;
using testing_support::central_difference;

namespace {

// Independent pointwise model: stresses from the pointwise constitutive maps,
// every further derivative by central differences.
struct Oracle {
  MaterialParams p;
  PolyVector u;
  PolyMatrix grad_u = grad_vector(u);
  PolyMatrix grad_curl = grad_vector(curl_vector(u));
  const SurfacePatch* patch;

  Oracle(MaterialParams p_, PolyVector u_, const SurfacePatch& s) : p(p_), u(std::move(u_)), patch(&s) {}

  Vec3 normal(const Vec3& x) const {
    return patch->shape == PatchShape::kFlat ? patch->flat_normal : (1.0 / norm(x)) * x;
  }
  Mat3 m(const Vec3& x) const { return couple_stress(p, grad_curl.evaluate(x)); }
  Mat3 sigma(const Vec3& x) const { return cauchy_stress(p, grad_u.evaluate(x)); }
  Vec3 div_m(const Vec3& x) const {
    Vec3 d;
    for (std::size_t j = 0; j < 3; ++j) {
      const Mat3 dm = central_difference([&](const Vec3& y) { return m(y); }, x, j, 1e-4);
      for (std::size_t i = 0; i < 3; ++i) d[i] += dm(i, j);
    }
    return d;
  }
  Mat3 tau(const Vec3& x) const { return sigma(x) - 0.5 * anti(div_m(x)); }
  Vec3 w(const Vec3& x) const {
    const Vec3 n = normal(x);
    return tangential_projector(n) * (m(x) * n);
  }
  double phi(const Vec3& x) const {
    const Vec3 n = normal(x);
    return dot(n, sym(m(x)) * n);
  }
  Vec3 missing(const Vec3& x) const {
    const Mat3 P = tangential_projector(normal(x));
    const auto W = [&](const Vec3& y) { return anti(w(y)) * tangential_projector(normal(y)); };
    Vec3 out;
    for (std::size_t k = 0; k < 3; ++k) {
      const Mat3 dW = central_difference(W, x, k, 1e-4);
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) out[i] += -0.5 * dW(i, j) * P(k, j);
    }
    return out;
  }
  Vec3 t_mt(const Vec3& x) const {
    Vec3 gphi;
    for (std::size_t k = 0; k < 3; ++k) gphi[k] = central_difference([&](const Vec3& y) { return phi(y); }, x, k, 1e-4);
    const Vec3 n = normal(x);
    return tau(x) * n - 0.5 * cross(n, gphi);
  }
};

DomainGeometry unit_box() { return make_domain(DomainSpec{}); }

DomainGeometry ball(double R, std::optional<double> cap = std::nullopt) {
  DomainSpec s;
  s.kind = DomainKind::kBall;
  s.radius = R;
  s.cap_angle = cap;
  return make_domain(s);
}

const EdgeCurve& edge_named(const DomainGeometry& d, const std::string& name) {
  for (const auto& e : d.edges)
    if (e.name == name) return e;
  throw std::runtime_error("no edge " + name);
}

const MaterialParams kMat{1.3, 0.7, 1.0, 0.25};

}  // namespace

TEST(MissingTerm, HandValueOnFlatFace) {
  // u = (x y^2, 0, 0): curl u = (0, 0, -2xy), on x = 1 the in-plane vector w
  // is (0, 0, -(a1 + a2) y) and M = -(a1 + a2)/2 e1.
  const DomainGeometry d = unit_box();
  const SurfacePatch& x1 = d.patches[d.patch_index("x1")];
  const PolyVector u = parse_vector("[x*y^2, 0, 0]");
  for (const auto& q : x1.nodes) {
    const Vec3 M = missing_term(kMat, u, x1, q.x);
    EXPECT_NEAR(norm(M), 0.625, 1e-12);
    EXPECT_NEAR(std::abs(M[0]), 0.625, 1e-12);
  }
}

TEST(MissingTerm, MatchesFiniteDifferenceOracleOnBoxFaces) {
  std::mt19937_64 rng(3);
  const DomainGeometry d = unit_box();
  for (int trial = 0; trial < 5; ++trial) {
    const PolyVector u = random_vector(rng, 4);
    const StressState st(kMat, u);
    for (const auto& patch : d.patches) {
      const Oracle o(kMat, u, patch);
      for (std::size_t k = 0; k < patch.nodes.size(); k += 7) {
        const Vec3 x = patch.nodes[k].x;
        EXPECT_LT(max_abs(missing_term(st, patch, x) - o.missing(x)), 1e-7) << patch.name;
      }
    }
  }
}

TEST(MissingTerm, IsNormalOnFlatFaces) {
  std::mt19937_64 rng(4);
  const DomainGeometry d = unit_box();
  const StressState st(kMat, random_vector(rng, 4));
  for (const auto& patch : d.patches)
    for (const auto& q : patch.nodes) {
      const Vec3 M = missing_term(st, patch, q.x);
      EXPECT_LT(norm(tangential_projector(patch.flat_normal) * M), 1e-12);
    }
}

TEST(MissingTerm, MatchesFiniteDifferenceOracleOnSphere) {
  std::mt19937_64 rng(5);
  const DomainGeometry d = ball(1.4);
  const SurfacePatch& s = d.patches[0];
  for (int trial = 0; trial < 3; ++trial) {
    const PolyVector u = random_vector(rng, 3);
    const StressState st(kMat, u);
    const Oracle o(kMat, u, s);
    for (std::size_t k = 0; k < s.nodes.size(); k += 11) {
      const Vec3 x = s.nodes[k].x;
      EXPECT_LT(max_abs(missing_term(st, s, x) - o.missing(x)), 1e-6);
    }
  }
}

TEST(MissingTerm, IndependentOfNormalExtension) {
  std::mt19937_64 rng(6);
  const DomainGeometry d = ball(0.8);
  const SurfacePatch& s = d.patches[0];
  const StressState st(kMat, random_vector(rng, 4));
  for (const auto& q : s.nodes) {
    const Vec3 a = missing_term(st, s, q.x, NormalExtension::kCanonical);
    const Vec3 b = missing_term(st, s, q.x, NormalExtension::kLinear);
    EXPECT_LT(max_abs(a - b), 1e-8);
  }
}

TEST(MissingTerm, LinearInDisplacement) {
  std::mt19937_64 rng(7);
  const DomainGeometry d = ball(1.0);
  const SurfacePatch& s = d.patches[0];
  const PolyVector u1 = random_vector(rng, 3), u2 = random_vector(rng, 3);
  const Vec3 x = s.nodes[5].x;
  const Vec3 lhs = missing_term(kMat, u1 + 2.0 * u2, s, x);
  const Vec3 rhs = missing_term(kMat, u1, s, x) + 2.0 * missing_term(kMat, u2, s, x);
  EXPECT_LT(max_abs(lhs - rhs), 1e-12);
}

TEST(ClassicalTraction, MatchesOracle) {
  std::mt19937_64 rng(8);
  const DomainGeometry box = unit_box();
  const DomainGeometry sph = ball(1.2);
  const PolyVector u = random_vector(rng, 3);
  const StressState st(kMat, u);
  for (const auto* d : {&box, &sph})
    for (const auto& patch : d->patches) {
      const Oracle o(kMat, u, patch);
      for (std::size_t k = 0; k < patch.nodes.size(); k += 9) {
        const Vec3 x = patch.nodes[k].x;
        EXPECT_LT(max_abs(traction_mt(st, patch, x) - o.t_mt(x)), 1e-6) << patch.name;
        EXPECT_LT(max_abs(moment_mt(st, patch, x) - o.w(x)), 1e-12) << patch.name;
      }
    }
}

TEST(ClassicalTraction, CoupleComponentExample) {
  // u = (0, 0, x^2 y): curl u = (x^2, -2xy, 0); grad curl has entries
  // (0,0)=2x, (1,0)=-2y, (1,1)=-2x. With a1 = 1, a2 = 0 the couple stress is
  // sym of that; on z = 1 the moment P m n vanishes.
  const DomainGeometry d = unit_box();
  const SurfacePatch& z1 = d.patches[d.patch_index("z1")];
  const MaterialParams p{1, 0, 1, 0};
  const PolyVector u = parse_vector("[0, 0, x^2*y]");
  const Vec3 x{0.5, 0.25, 1.0};
  const Mat3 m = couple_stress(p, grad_vector(curl_vector(u)).evaluate(x));
  EXPECT_NEAR(m(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(m(0, 1), -0.25, 1e-15);
  EXPECT_NEAR(m(1, 1), -1.0, 1e-15);
  EXPECT_LT(max_abs(moment_mt(p, u, z1, x)), 1e-15);
  // on x = 1 the moment is the tangential part of the first column
  const SurfacePatch& x1 = d.patches[d.patch_index("x1")];
  const Vec3 y{1.0, 0.25, 0.5};
  const Vec3 g = moment_mt(p, u, x1, y);
  EXPECT_NEAR(g[0], 0.0, 1e-15);
  EXPECT_NEAR(g[1], -0.25, 1e-15);
  EXPECT_NEAR(g[2], 0.0, 1e-15);
}

TEST(CorrectedTraction, SumsClassicalAndMissing) {
  std::mt19937_64 rng(9);
  const DomainGeometry d = ball(1.0);
  const SurfacePatch& s = d.patches[0];
  const StressState st(kMat, random_vector(rng, 4));
  for (std::size_t k = 0; k < s.nodes.size(); k += 13) {
    const Vec3 x = s.nodes[k].x;
    const BoundaryTractions bt = boundary_tractions(st, s, x);
    EXPECT_LT(max_abs(bt.traction_corrected - bt.traction_mt - bt.missing), 1e-14);
    EXPECT_LT(max_abs(bt.traction_corrected - traction_corrected(st, s, x)), 1e-14);
  }
}

TEST(CorrectedMoment, IsTheClassicalMomentRotatedInThePlane) {
  std::mt19937_64 rng(10);
  const DomainGeometry d = unit_box();
  const StressState st(kMat, random_vector(rng, 3));
  for (const auto& patch : d.patches)
    for (const auto& q : patch.nodes) {
      const Vec3 g = moment_mt(st, patch, q.x);
      const Vec3 gc = moment_corrected(st, patch, q.x);
      const Vec3 n = patch.flat_normal;
      EXPECT_LT(max_abs(gc - cross(g, n)), 1e-14);
      EXPECT_NEAR(dot(gc, n), 0.0, 1e-14);
      EXPECT_NEAR(dot(gc, g), 0.0, 1e-12);
      EXPECT_NEAR(norm(gc), norm(g), 1e-12);
    }
}

TEST(Tractions, RigidMotionIsTractionFree) {
  const PolyVector u = parse_vector("[1 + 2*y - 3*z, -2*x + z, 3*x - y - 4]");
  const DomainGeometry box = unit_box();
  const DomainGeometry sph = ball(1.0);
  for (const auto* d : {&box, &sph})
    for (const auto& patch : d->patches)
      for (const auto& q : patch.nodes) {
        const BoundaryTractions bt = boundary_tractions(StressState(kMat, u), patch, q.x);
        EXPECT_LT(max_abs(bt.traction_mt) + max_abs(bt.traction_corrected) + max_abs(bt.missing) +
                      max_abs(bt.moment_mt) + max_abs(bt.moment_corrected),
                  1e-13);
      }
}

TEST(Tractions, AffineFieldGivesCauchyTraction) {
  std::mt19937_64 rng(11);
  const PolyVector u = random_vector(rng, 1);
  const DomainGeometry d = ball(1.0);
  const StressState st(kMat, u);
  const Mat3 s = cauchy_stress(kMat, grad_vector(u).evaluate({0, 0, 0}));
  for (const auto& q : d.patches[0].nodes) {
    EXPECT_LT(max_abs(traction_corrected(st, d.patches[0], q.x) - s * q.n), 1e-13);
    EXPECT_LT(max_abs(traction_mt(st, d.patches[0], q.x) - s * q.n), 1e-13);
  }
}

TEST(EdgeJump, PerSideValuesMatchOracle) {
  std::mt19937_64 rng(12);
  const DomainGeometry d = unit_box();
  const PolyVector u = random_vector(rng, 3);
  const StressState st(kMat, u);
  for (const std::string name : {"x1|y1", "y0|z1", "z1|x0"}) {
    const EdgeCurve& e = edge_named(d, name);
    for (const auto& q : e.nodes) {
      const EdgeJump ej = edge_jump(st, d, e, q);
      Vec3 sum;
      for (std::size_t s = 0; s < 2; ++s) {
        const SurfacePatch& p = d.patches[e.patches[s]];
        const Oracle o(kMat, u, p);
        const Vec3 nu = q.conormal[s];
        EXPECT_LT(max_abs(ej.side[s] - cross(o.w(q.x), nu)), 1e-10);
        EXPECT_LT(max_abs(ej.curvature_side[s] - o.phi(q.x) * cross(p.flat_normal, nu)), 1e-10);
        sum += anti(o.m(q.x) * p.flat_normal) * nu;
      }
      EXPECT_LT(max_abs(ej.jump - ej.side[0] - ej.side[1]), 1e-14);
      EXPECT_LT(max_abs(ej.line_traction - sum), 1e-10);
    }
  }
}

TEST(EdgeJump, NonzeroOnVerticalEdgeExample) {
  const DomainGeometry d = unit_box();
  const PolyVector u = parse_vector("[y^3, 0, 0]");
  const EdgeCurve& e = edge_named(d, "x1|y1");
  double largest = 0.0;
  for (const auto& q : e.nodes) largest = std::max(largest, norm(edge_jump(kMat, u, d, e, q).jump));
  EXPECT_GT(largest, 1e-3);
}

TEST(EdgeJump, VanishesAcrossSmoothCapBoundary) {
  std::mt19937_64 rng(13);
  const DomainGeometry d = ball(1.5, 0.9);
  const StressState st(kMat, random_vector(rng, 4));
  double side = 0.0;
  for (const auto& q : d.edges[0].nodes) {
    const EdgeJump ej = edge_jump(st, d, d.edges[0], q);
    EXPECT_LT(max_abs(ej.jump), 1e-12);
    EXPECT_LT(max_abs(ej.curvature_jump), 1e-12);
    side = std::max(side, max_abs(ej.side[0]));
  }
  EXPECT_GT(side, 1e-3);  // the sides themselves do not vanish
}

TEST(EdgeJump, RejectsUnregisteredPatches) {
  const DomainGeometry d = unit_box();
  EdgeCurve bogus = d.edges[0];
  bogus.patches = {0, 42};
  EXPECT_THROW(edge_jump(kMat, parse_vector("[x, 0, 0]"), d, bogus, bogus.nodes[0]), std::invalid_argument);
}

TEST(SampleTractions, OneSamplePerNodeAndFlavor) {
  const DomainGeometry d = unit_box();
  const StressState st(kMat, parse_vector("[y^3, 0, 0]"));
  const std::vector<std::size_t> set{d.patch_index("z1"), d.patch_index("x0")};
  const auto samples = sample_tractions(st, d, set);
  EXPECT_EQ(samples.size(), 2 * (d.patches[set[0]].nodes.size() + d.patches[set[1]].nodes.size()));
  for (const auto& s : samples) {
    const SurfacePatch& p = d.patches[d.patch_index(s.patch)];
    const Vec3 expected = s.flavor == TractionFlavor::kCorrected ? traction_corrected(st, p, s.point)
                                                                 : traction_mt(st, p, s.point);
    EXPECT_LT(max_abs(s.t - expected), 1e-14);
  }
}
