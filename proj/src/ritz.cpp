#include "cstress/ritz.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace cstress {

namespace {

struct MonomialJet {
  PolyScalar value;
  PolyVector gradient;
  PolyMatrix hessian;
};

std::vector<MonomialJet> monomial_jets(const BasisSpec& basis) {
  std::vector<MonomialJet> jets;
  for (std::size_t m = 0; m < monomial_count(basis.degree); ++m) {
    MonomialJet j;
    j.value = basis.scalar(m);
    j.gradient = grad(j.value);
    j.hessian = grad_vector(j.gradient);
    jets.push_back(std::move(j));
  }
  return jets;
}

struct LocalBasis {
  std::vector<double> value;
  std::vector<Vec3> gradient;
  std::vector<Mat3> hessian;
};

LocalBasis evaluate_jets(const std::vector<MonomialJet>& jets, const Vec3& x) {
  LocalBasis lb;
  lb.value.reserve(jets.size());
  for (const auto& j : jets) {
    lb.value.push_back(j.value.evaluate(x));
    lb.gradient.push_back(j.gradient.evaluate(x));
    lb.hessian.push_back(j.hessian.evaluate(x));
  }
  return lb;
}

// Basis function i = 3 m + k is e_k s_m.
Mat3 basis_gradient(const LocalBasis& lb, std::size_t i) {
  Mat3 G;
  const std::size_t k = i % 3, m = i / 3;
  for (std::size_t j = 0; j < 3; ++j) G(k, j) = lb.gradient[m][j];
  return G;
}

Vec3 basis_curl(const LocalBasis& lb, std::size_t i) {
  return cross(lb.gradient[i / 3], Vec3::unit(i % 3));
}

// (grad curl e_k s)_il = eps_ijk s_,jl
Mat3 basis_grad_curl(const LocalBasis& lb, std::size_t i) {
  const std::size_t k = i % 3, m = i / 3;
  Mat3 K;
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t l = 0; l < 3; ++l) {
      double s = 0.0;
      for (std::size_t j = 0; j < 3; ++j) s += levi_civita(a, j, k) * lb.hessian[m](j, l);
      K(a, l) = s;
    }
  return K;
}

std::array<Vec3, 2> tangent_basis(const Vec3& n) {
  std::size_t k = 0;
  for (std::size_t i = 1; i < 3; ++i)
    if (std::abs(n[i]) < std::abs(n[k])) k = i;
  Vec3 t1 = tangential_projector(n) * Vec3::unit(k);
  t1 *= 1.0 / norm(t1);
  return {t1, cross(n, t1)};
}

}  // namespace

PolyScalar BasisSpec::scalar(std::size_t m) const {
  const Exponent e = exponent_of(m);
  PolyScalar r = PolyScalar::constant(1.0);
  const int pw[3] = {e.x, e.y, e.z};
  for (int k = 0; k < 3; ++k) {
    const PolyScalar xi = (1.0 / scale) * PolyScalar::coordinate(k) -
                          PolyScalar::constant(center[static_cast<std::size_t>(k)] / scale);
    for (int p = 0; p < pw[k]; ++p) r = r * xi;
  }
  return r;
}

PolyVector BasisSpec::function(std::size_t i) const {
  PolyVector v;
  v[i % 3] = scalar(i / 3);
  return v;
}

PolyVector BasisSpec::combine(const Eigen::VectorXd& c) const {
  PolyVector v;
  for (std::size_t m = 0; m < monomial_count(degree); ++m) {
    const PolyScalar s = scalar(m);
    for (std::size_t k = 0; k < 3; ++k) {
      const double ck = c(static_cast<Eigen::Index>(3 * m + k));
      if (ck != 0.0) v[k] += ck * s;
    }
  }
  return v;
}

BasisSpec make_basis(int degree, const DomainGeometry& domain) {
  if (degree < 1 || degree > kMaxDegree / 2)
    throw std::invalid_argument("basis degree must lie in [1, " + std::to_string(kMaxDegree / 2) + "]");
  BasisSpec b;
  b.degree = degree;
  if (domain.kind == DomainKind::kBox) {
    const Vec3& e = domain.spec.extents;
    b.center = 0.5 * e;
    b.scale = 0.5 * std::max({e[0], e[1], e[2]});
  } else {
    b.center = Vec3{};
    b.scale = domain.spec.radius;
  }
  return b;
}

TractionLoads manufactured_loads(const StressState& exact, const DomainGeometry& domain,
                                 TractionFlavor flavor) {
  TractionLoads loads;
  const PolyVector f = -exact.div_tau();
  if (f.max_abs_coefficient() > 0.0) loads.body_force = f;
  const StressState* s = &exact;
  const DomainGeometry* d = &domain;
  if (flavor == TractionFlavor::kCorrected) {
    loads.traction = [s](const SurfacePatch& p, const Vec3& x) { return traction_corrected(*s, p, x); };
  } else {
    loads.traction = [s](const SurfacePatch& p, const Vec3& x) { return traction_mt(*s, p, x); };
  }
  loads.moment = [s](const SurfacePatch& p, const Vec3& x) { return moment_corrected(*s, p, x); };
  loads.edge = [s, d](const EdgeCurve& e, std::size_t side, const EdgeNode& q) {
    const EdgeJump ej = edge_jump(*s, *d, e, q);
    return ej.side[side] + ej.curvature_side[side];
  };
  return loads;
}

QuadraticForm assemble(const MaterialParams& params, const BasisSpec& basis,
                       const DomainGeometry& domain, const TractionLoads& loads) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  const auto jets = monomial_jets(basis);
  QuadraticForm form;
  form.basis = basis;
  form.stiffness = Eigen::MatrixXd::Zero(n, n);
  form.load = Eigen::VectorXd::Zero(n);

  std::vector<Mat3> G(static_cast<std::size_t>(n)), K(static_cast<std::size_t>(n));
  std::vector<Mat3> S(static_cast<std::size_t>(n)), C(static_cast<std::size_t>(n));
  for (const auto& q : domain.volume_nodes) {
    const LocalBasis lb = evaluate_jets(jets, q.x);
    for (std::size_t a = 0; a < G.size(); ++a) {
      G[a] = basis_gradient(lb, a);
      K[a] = basis_grad_curl(lb, a);
      S[a] = cauchy_stress(params, G[a]);
      C[a] = couple_stress(params, K[a]);
    }
    for (std::size_t a = 0; a < G.size(); ++a)
      for (std::size_t b = 0; b < G.size(); ++b)
        form.stiffness(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) +=
            q.w * (inner(S[a], G[b]) + kCurvaturePairing * inner(C[a], K[b]));
    if (loads.body_force) {
      const Vec3 f = loads.body_force->evaluate(q.x);
      for (std::size_t a = 0; a < G.size(); ++a)
        form.load(static_cast<Eigen::Index>(a)) += q.w * f[a % 3] * lb.value[a / 3];
    }
  }

  for (std::size_t pi : domain.neumann_patches()) {
    const SurfacePatch& patch = domain.patches[pi];
    for (const auto& q : patch.nodes) {
      const LocalBasis lb = evaluate_jets(jets, q.x);
      const Vec3 t = loads.traction ? loads.traction(patch, q.x) : Vec3{};
      const Vec3 g = loads.moment ? loads.moment(patch, q.x) : Vec3{};
      const Vec3 pg = tangential_projector(q.n) * g;
      for (Eigen::Index a = 0; a < n; ++a) {
        const auto k = static_cast<std::size_t>(a) % 3, m = static_cast<std::size_t>(a) / 3;
        const double dnds = dot(lb.gradient[m], q.n);
        form.load(a) += q.w * (t[k] * lb.value[m] + 0.5 * pg[k] * dnds);
      }
    }
  }

  if (loads.edge) {
    for (const auto& edge : domain.edges)
      for (std::size_t side = 0; side < 2; ++side) {
        if (domain.patches[edge.patches[side]].dirichlet) continue;
        for (const auto& q : edge.nodes) {
          const Vec3 pi = loads.edge(edge, side, q);
          const LocalBasis lb = evaluate_jets(jets, q.x);
          for (Eigen::Index a = 0; a < n; ++a) {
            const auto k = static_cast<std::size_t>(a) % 3, m = static_cast<std::size_t>(a) / 3;
            form.load(a) += q.w * 0.5 * pi[k] * lb.value[m];
          }
        }
      }
  }

  form.max_asymmetry = (form.stiffness - form.stiffness.transpose()).cwiseAbs().maxCoeff();
  form.stiffness = 0.5 * (form.stiffness + form.stiffness.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(form.stiffness, Eigen::EigenvaluesOnly);
  form.min_eigenvalue = eig.eigenvalues().minCoeff();
  form.max_eigenvalue = eig.eigenvalues().maxCoeff();
  if (form.min_eigenvalue < -1e-10 * std::max(1.0, std::abs(form.max_eigenvalue)))
    throw std::domain_error("energy form is indefinite (min eigenvalue " +
                            std::to_string(form.min_eigenvalue) + "); check material parameters");
  return form;
}

void ConstraintSet::append(const ConstraintSet& o) {
  if (o.rows.rows() == 0) return;
  if (rows.rows() == 0) {
    *this = o;
    return;
  }
  Eigen::MatrixXd r(rows.rows() + o.rows.rows(), rows.cols());
  r << rows, o.rows;
  Eigen::VectorXd b(rhs.size() + o.rhs.size());
  b << rhs, o.rhs;
  rows = std::move(r);
  rhs = std::move(b);
}

Eigen::MatrixXd pointwise_constraint_rows(const BasisSpec& basis, const SurfacePatch& patch,
                                          const Vec3& x) {
  const auto jets = monomial_jets(basis);
  const LocalBasis lb = evaluate_jets(jets, x);
  const Mat3 P = tangential_projector(patch.frame(x).normal);
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(6, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    const auto i = static_cast<std::size_t>(a);
    r(static_cast<Eigen::Index>(i % 3), a) = lb.value[i / 3];
    const Vec3 pc = P * basis_curl(lb, i);
    for (Eigen::Index c = 0; c < 3; ++c) r(3 + c, a) = pc[static_cast<std::size_t>(c)];
  }
  return r;
}

ConstraintSet geometric_constraints(const BasisSpec& basis, const DomainGeometry& domain,
                                    const PolyVector& u0) {
  const auto jets = monomial_jets(basis);
  const PolyVector curl0 = curl_vector(u0);
  const auto n = static_cast<Eigen::Index>(basis.size());
  std::vector<Eigen::RowVectorXd> rows;
  std::vector<double> rhs;
  for (std::size_t pi : domain.dirichlet_patches()) {
    const SurfacePatch& patch = domain.patches[pi];
    for (const auto& q : patch.nodes) {
      const LocalBasis lb = evaluate_jets(jets, q.x);
      const auto tb = tangent_basis(q.n);
      const Vec3 value0 = u0.evaluate(q.x);
      const Vec3 c0 = curl0.evaluate(q.x);
      for (std::size_t k = 0; k < 3; ++k) {
        Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(n);
        for (std::size_t m = 0; m < jets.size(); ++m)
          r(static_cast<Eigen::Index>(3 * m + k)) = lb.value[m];
        rows.push_back(std::move(r));
        rhs.push_back(value0[k]);
      }
      for (const Vec3& t : tb) {
        Eigen::RowVectorXd r(n);
        for (Eigen::Index a = 0; a < n; ++a) r(a) = dot(t, basis_curl(lb, static_cast<std::size_t>(a)));
        rows.push_back(std::move(r));
        rhs.push_back(dot(t, c0));
      }
    }
  }
  ConstraintSet cs;
  cs.rows.resize(static_cast<Eigen::Index>(rows.size()), n);
  cs.rhs.resize(static_cast<Eigen::Index>(rhs.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    cs.rows.row(static_cast<Eigen::Index>(i)) = rows[i];
    cs.rhs(static_cast<Eigen::Index>(i)) = rhs[i];
  }
  return cs;
}

ConstraintSet gauge_constraints(const BasisSpec& basis, const DomainGeometry& domain) {
  const auto jets = monomial_jets(basis);
  const auto n = static_cast<Eigen::Index>(basis.size());
  ConstraintSet cs;
  cs.rows = Eigen::MatrixXd::Zero(6, n);
  cs.rhs = Eigen::VectorXd::Zero(6);
  for (const auto& q : domain.volume_nodes) {
    const LocalBasis lb = evaluate_jets(jets, q.x);
    for (Eigen::Index a = 0; a < n; ++a) {
      const auto i = static_cast<std::size_t>(a);
      cs.rows(static_cast<Eigen::Index>(i % 3), a) += q.w * lb.value[i / 3];
      const Vec3 c = basis_curl(lb, i);
      for (Eigen::Index r = 0; r < 3; ++r) cs.rows(3 + r, a) += q.w * c[static_cast<std::size_t>(r)];
    }
  }
  return cs;
}

double potential(const QuadraticForm& form, const Eigen::VectorXd& c) {
  return 0.5 * c.dot(form.stiffness * c) - form.load.dot(c);
}

ConstraintBasis constraint_basis(const ConstraintSet& constraints, Eigen::Index n,
                                 double rank_tolerance) {
  ConstraintBasis cb;
  cb.particular = Eigen::VectorXd::Zero(n);
  if (constraints.rows.rows() == 0) {
    cb.null_space = Eigen::MatrixXd::Identity(n, n);
    return cb;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(constraints.rows, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = rank_tolerance * (sv.size() > 0 ? sv(0) : 0.0);
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++cb.rank;
  const Eigen::VectorXd proj = svd.matrixU().leftCols(cb.rank).transpose() * constraints.rhs;
  cb.particular = svd.matrixV().leftCols(cb.rank) * proj.cwiseQuotient(sv.head(cb.rank));
  cb.null_space = svd.matrixV().rightCols(n - cb.rank);
  return cb;
}

SolveReport solve_equilibrium(const QuadraticForm& form, const ConstraintSet& constraints,
                              const SolveOptions& options) {
  const Eigen::Index n = form.stiffness.rows();
  const ConstraintBasis cb = constraint_basis(constraints, n, options.rank_tolerance);
  const Eigen::MatrixXd& Z = cb.null_space;
  const Eigen::VectorXd& particular = cb.particular;
  const int rank = cb.rank;

  SolveReport rep;
  rep.constraint_rank = rank;
  rep.free_dimension = static_cast<int>(Z.cols());

  Eigen::VectorXd c = particular;
  if (Z.cols() > 0) {
    const Eigen::MatrixXd H = Z.transpose() * form.stiffness * Z;
    const Eigen::VectorXd g = Z.transpose() * (form.load - form.stiffness * particular);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd& ev = eig.eigenvalues();
    const double lmax = ev.cwiseAbs().maxCoeff();
    int kernel = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
      if (ev(i) <= options.kernel_tolerance * lmax) ++kernel;
    if (kernel > 0)
      throw SingularSystemError("singular system: " + std::to_string(kernel) +
                                    "-dimensional kernel; add geometric constraints or a gauge",
                                kernel);
    rep.condition_estimate = lmax / ev.minCoeff();
    if (rep.condition_estimate > options.max_condition)
      throw SingularSystemError("reduced system too ill-conditioned (condition estimate " +
                                    std::to_string(rep.condition_estimate) + ")",
                                0);
    const Eigen::VectorXd y = H.ldlt().solve(g);
    c += Z * y;
    const Eigen::VectorXd r = Z.transpose() * (form.stiffness * c - form.load);
    const double denom = (Z.transpose() * form.stiffness * c).norm() + (Z.transpose() * form.load).norm();
    rep.optimality_residual = denom > 0.0 ? r.norm() / denom : r.norm();
  } else {
    rep.condition_estimate = 1.0;
  }

  rep.coefficients = c;
  rep.solution = form.basis.combine(c);
  rep.strain_energy = 0.5 * c.dot(form.stiffness * c);
  rep.energy = potential(form, c);
  rep.constraint_residual =
      constraints.rows.rows() > 0 ? (constraints.rows * c - constraints.rhs).cwiseAbs().maxCoeff() : 0.0;
  return rep;
}

PatchTestResult patch_test(const MaterialParams& params, const DomainGeometry& domain, const Mat3& A,
                           int basis_degree, double tolerance) {
  if (max_abs(A - transpose(A)) > 1e-14 * std::max(1.0, max_abs(A)))
    throw std::invalid_argument("patch_test: A must be symmetric");
  const PolyVector exact = A * PolyVector::position();
  const StressState state(params, exact);
  const BasisSpec basis = make_basis(basis_degree, domain);
  const QuadraticForm form =
      assemble(params, basis, domain, manufactured_loads(state, domain, TractionFlavor::kCorrected));

  PatchTestResult res;
  res.solve = solve_equilibrium(form, gauge_constraints(basis, domain));
  const PolyVector& uh = res.solve.solution;

  // Remove the best-fitting rigid motion a + w x x from u_h - u*.
  const auto nq = static_cast<Eigen::Index>(domain.volume_nodes.size());
  Eigen::MatrixXd R(3 * nq, 6);
  Eigen::VectorXd e(3 * nq);
  for (Eigen::Index q = 0; q < nq; ++q) {
    const Vec3& x = domain.volume_nodes[static_cast<std::size_t>(q)].x;
    const Vec3 d = uh.evaluate(x) - A * x;
    for (Eigen::Index k = 0; k < 3; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      for (Eigen::Index j = 0; j < 3; ++j) R(3 * q + k, j) = k == j ? 1.0 : 0.0;
      for (Eigen::Index j = 0; j < 3; ++j)
        R(3 * q + k, 3 + j) = cross(Vec3::unit(static_cast<std::size_t>(j)), x)[ku];
      e(3 * q + k) = d[ku];
    }
  }
  const Eigen::VectorXd rigid = R.colPivHouseholderQr().solve(e);
  res.displacement_error = (e - R * rigid).cwiseAbs().maxCoeff();

  const StressState hs(params, uh);
  const Mat3 sigma = cauchy_stress(params, A);
  for (const auto& patch : domain.patches)
    for (const auto& q : patch.nodes) {
      const BoundaryTractions bt = boundary_tractions(hs, patch, q.x);
      res.traction_error = std::max(res.traction_error, norm(bt.traction_corrected - sigma * q.n));
      res.missing_max = std::max(res.missing_max, norm(bt.missing));
    }
  const double stress_scale = std::max(1.0, frobenius(sigma));
  res.pass = res.displacement_error < tolerance && res.traction_error < tolerance * stress_scale &&
             res.missing_max < tolerance * stress_scale;
  return res;
}

}  // namespace cstress
