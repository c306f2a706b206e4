#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>

#include "cstress/poly_parse.hpp"
#include "cstress/ritz.hpp"
#include "cstress/virtual_work.hpp"
#include "support.hpp"

using namespace cstress;

namespace {

const MaterialParams kMat{1.3, 0.7, 1.1, 0.4};

DomainGeometry box(std::vector<std::string> dirichlet = {}, Vec3 ext = {1, 1, 1}) {
  DomainSpec s;
  s.extents = ext;
  s.dirichlet = std::move(dirichlet);
  return make_domain(s);
}

double max_error(const PolyVector& a, const PolyVector& b, const DomainGeometry& d) {
  double e = 0.0;
  for (const auto& q : d.volume_nodes) e = std::max(e, max_abs(a.evaluate(q.x) - b.evaluate(q.x)));
  return e;
}

Eigen::VectorXd sorted_eigenvalues(const Eigen::MatrixXd& K) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(K, Eigen::EigenvaluesOnly).eigenvalues();
}

}  // namespace

TEST(Basis, FunctionsAndCombination) {
  const DomainGeometry d = box({}, {2, 1, 1});
  const BasisSpec b = make_basis(2, d);
  EXPECT_EQ(b.size(), 30u);
  EXPECT_DOUBLE_EQ(b.scale, 1.0);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(b.size()));
  c(4) = 2.0;  // monomial 1, component 1
  const PolyVector v = b.combine(c);
  EXPECT_LT(max_error(v, 2.0 * b.function(4), d), 1e-15);
  EXPECT_THROW(make_basis(0, d), std::invalid_argument);
  EXPECT_THROW(make_basis(5, d), std::invalid_argument);
}

TEST(Assemble, StiffnessMatchesDirectIntegration) {
  const DomainGeometry d = box({}, {1, 0.5, 2});
  const MaterialParams p{1, 0, 1, 1};
  const BasisSpec b = make_basis(2, d);
  const QuadraticForm f = assemble(p, b, d, {});
  for (std::size_t i = 0; i < b.size(); i += 5)
    for (std::size_t j = 0; j < b.size(); j += 3) {
      const double direct = internal_work(p, b.function(i), b.function(j), d);
      EXPECT_NEAR(f.stiffness(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), direct, 1e-12);
    }
  EXPECT_LT(f.max_asymmetry, 1e-13);
  EXPECT_EQ(f.load.norm(), 0.0);
}

TEST(Assemble, RigidKernelHasDimensionSix) {
  const DomainGeometry d = box();
  const QuadraticForm f = assemble(kMat, make_basis(2, d), d, {});
  const Eigen::VectorXd ev = sorted_eigenvalues(f.stiffness);
  const double top = ev.maxCoeff();
  int kernel = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) kernel += std::abs(ev(i)) < 1e-10 * top ? 1 : 0;
  EXPECT_EQ(kernel, 6);
  EXPECT_GT(ev(6), 1e-8 * top);
}

TEST(Assemble, IndefiniteMaterialIsRejected) {
  const DomainGeometry d = box();
  EXPECT_THROW(assemble(MaterialParams{-1, 0, 1, 1}, make_basis(1, d), d, {}), std::domain_error);
  EXPECT_THROW(assemble(MaterialParams{1, 0, -1, 1}, make_basis(2, d), d, {}), std::domain_error);
}

TEST(Assemble, ExactFieldSatisfiesTheDiscreteEquations) {
  // With corrected data on every face, a(u*, v) = l(v) for every v, so
  // K c* = F. The classical data leaves a residual.
  std::mt19937_64 rng(1);
  const DomainGeometry d = box({}, {1, 2, 1});
  const BasisSpec b = make_basis(3, d);
  const PolyVector u = random_vector(rng, 3);
  const StressState st(kMat, u);
  // coefficients of u in the scaled basis by least squares at the volume nodes
  const auto nq = static_cast<Eigen::Index>(d.volume_nodes.size());
  const auto n = static_cast<Eigen::Index>(b.size());
  Eigen::MatrixXd V(3 * nq, n);
  Eigen::VectorXd y(3 * nq);
  for (Eigen::Index q = 0; q < nq; ++q) {
    const Vec3& x = d.volume_nodes[static_cast<std::size_t>(q)].x;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Vec3 v = b.function(static_cast<std::size_t>(i)).evaluate(x);
      for (Eigen::Index k = 0; k < 3; ++k) V(3 * q + k, i) = v[static_cast<std::size_t>(k)];
    }
    const Vec3 ux = u.evaluate(x);
    for (Eigen::Index k = 0; k < 3; ++k) y(3 * q + k) = ux[static_cast<std::size_t>(k)];
  }
  const Eigen::VectorXd c = V.colPivHouseholderQr().solve(y);
  const QuadraticForm corr = assemble(kMat, b, d, manufactured_loads(st, d, TractionFlavor::kCorrected));
  const QuadraticForm mt = assemble(kMat, b, d, manufactured_loads(st, d, TractionFlavor::kMindlinTiersten));
  const double scale = corr.load.norm();
  EXPECT_LT((corr.stiffness * c - corr.load).norm(), 1e-10 * scale);
  EXPECT_GT((mt.stiffness * c - mt.load).norm(), 1e-4 * scale);
}

TEST(Constraints, PointwiseRowsHaveRankFive) {
  const DomainGeometry d = box();
  const BasisSpec b = make_basis(3, d);
  for (const auto& patch : d.patches) {
    const Eigen::MatrixXd R = pointwise_constraint_rows(b, patch, patch.nodes[3].x);
    ASSERT_EQ(R.rows(), 6);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(R);
    svd.setThreshold(1e-12);
    EXPECT_EQ(svd.rank(), 5) << patch.name;
  }
}

TEST(Constraints, NullSpaceIsFeasible) {
  std::mt19937_64 rng(2);
  const DomainGeometry d = box({"z0"});
  const BasisSpec b = make_basis(2, d);
  const ConstraintSet cs = geometric_constraints(b, d, random_vector(rng, 2));
  const ConstraintBasis cb = constraint_basis(cs, static_cast<Eigen::Index>(b.size()));
  EXPECT_GT(cb.rank, 0);
  EXPECT_EQ(cb.null_space.cols(), static_cast<Eigen::Index>(b.size()) - cb.rank);
  EXPECT_LT((cs.rows * cb.null_space).norm(), 1e-10);
  const Eigen::MatrixXd I = cb.null_space.transpose() * cb.null_space;
  EXPECT_LT((I - Eigen::MatrixXd::Identity(I.rows(), I.cols())).norm(), 1e-12);
}

TEST(Solve, PureTractionWithoutGaugeIsSingular) {
  const DomainGeometry d = box();
  const QuadraticForm f = assemble(kMat, make_basis(2, d), d, {});
  try {
    solve_equilibrium(f, ConstraintSet{});
    FAIL() << "expected SingularSystemError";
  } catch (const SingularSystemError& e) {
    EXPECT_EQ(e.kernel_dimension(), 6);
  }
  const BasisSpec b = make_basis(2, d);
  EXPECT_NO_THROW(solve_equilibrium(f, gauge_constraints(b, d)));
}

TEST(Solve, ClampedUnloadedBodyStaysAtRest) {
  const DomainGeometry d = box({"z0"});
  const BasisSpec b = make_basis(2, d);
  const QuadraticForm f = assemble(kMat, b, d, {});
  const SolveReport r = solve_equilibrium(f, geometric_constraints(b, d, PolyVector{}));
  EXPECT_LT(r.coefficients.cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(r.energy, 0.0, 1e-20);
}

TEST(Solve, RecoversManufacturedSolution) {
  std::mt19937_64 rng(3);
  const DomainGeometry d = box({"z0"}, {1, 1.5, 1});
  const BasisSpec b = make_basis(3, d);
  const PolyVector u = random_vector(rng, 3);
  const StressState st(kMat, u);
  const QuadraticForm f = assemble(kMat, b, d, manufactured_loads(st, d, TractionFlavor::kCorrected));
  const SolveReport r = solve_equilibrium(f, geometric_constraints(b, d, u));
  EXPECT_LT(max_error(r.solution, u, d), 1e-7);
  EXPECT_LT(r.constraint_residual, 1e-9);
  EXPECT_LT(r.optimality_residual, 1e-9);
  EXPECT_NEAR(r.strain_energy, total_energy(kMat, u, d), 1e-8 * std::max(1.0, r.strain_energy));
}

TEST(Solve, ClassicalTractionDataMissesTheSolution) {
  std::mt19937_64 rng(3);
  const DomainGeometry d = box({"z0"}, {1, 1.5, 1});
  const BasisSpec b = make_basis(3, d);
  const PolyVector u = random_vector(rng, 3);
  const StressState st(kMat, u);
  const QuadraticForm f = assemble(kMat, b, d, manufactured_loads(st, d, TractionFlavor::kMindlinTiersten));
  const SolveReport r = solve_equilibrium(f, geometric_constraints(b, d, u));
  EXPECT_GT(max_error(r.solution, u, d), 1e-6);
  EXPECT_LT(r.optimality_residual, 1e-9);
}

TEST(Solve, SolutionMinimisesThePotential) {
  std::mt19937_64 rng(4);
  const DomainGeometry d = box({"x0"});
  const BasisSpec b = make_basis(2, d);
  const StressState st(kMat, random_vector(rng, 3));
  const QuadraticForm f = assemble(kMat, b, d, manufactured_loads(st, d, TractionFlavor::kCorrected));
  const ConstraintSet cs = geometric_constraints(b, d, random_vector(rng, 2));
  const SolveReport r = solve_equilibrium(f, cs);
  const ConstraintBasis cb = constraint_basis(cs, static_cast<Eigen::Index>(b.size()));
  const double base = potential(f, r.coefficients);
  EXPECT_NEAR(base, r.energy, 1e-10 * std::max(1.0, std::abs(base)));
  std::normal_distribution<double> g;
  for (int k = 0; k < 50; ++k) {
    Eigen::VectorXd z(cb.null_space.cols());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = g(rng);
    const Eigen::VectorXd c = r.coefficients + 1e-2 * cb.null_space * z;
    EXPECT_LT((cs.rows * c - cs.rhs).norm(), 1e-9);
    EXPECT_GE(potential(f, c), base - 1e-12 * std::max(1.0, std::abs(base)));
  }
}

TEST(Solve, CapClampedBall) {
  std::mt19937_64 rng(5);
  DomainSpec s;
  s.kind = DomainKind::kBall;
  s.dirichlet = {"cap:1.0"};
  const DomainGeometry d = make_domain(s);
  const BasisSpec b = make_basis(2, d);
  const PolyVector u = random_vector(rng, 2);
  const QuadraticForm f =
      assemble(kMat, b, d, manufactured_loads(StressState(kMat, u), d, TractionFlavor::kCorrected));
  const SolveReport r = solve_equilibrium(f, geometric_constraints(b, d, u));
  EXPECT_LT(max_error(r.solution, u, d), 1e-7);
}

TEST(PatchTest, ConstantStrainStates) {
  const DomainGeometry d = box({}, {2, 1, 1});
  Mat3 shear;
  shear(0, 1) = shear(1, 0) = 1.0;
  for (const Mat3& A : {Mat3::identity(), Mat3{}, shear}) {
    const PatchTestResult r = patch_test(kMat, d, A);
    EXPECT_TRUE(r.pass);
    EXPECT_LT(r.displacement_error, 1e-9);
    EXPECT_LT(r.traction_error, 1e-9);
    EXPECT_LT(r.missing_max, 1e-9);
  }
}

TEST(PatchTest, RandomSymmetricStrainOnBall) {
  std::mt19937_64 rng(6);
  DomainSpec s;
  s.kind = DomainKind::kBall;
  const DomainGeometry d = make_domain(s);
  const Mat3 B = testing_support::random_mat(rng);
  EXPECT_TRUE(patch_test(kMat, d, sym(B)).pass);
}

TEST(PatchTest, RejectsNonSymmetricStrain) {
  Mat3 A;
  A(0, 1) = 1.0;
  EXPECT_THROW(patch_test(kMat, box(), A), std::invalid_argument);
}
