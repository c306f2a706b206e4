#pragma once

// Ritz energy minimisation on polynomial trial spaces.
//
// Total potential
//   Pi(v) = 1/2 a(v, v) - l(v),
//   a(u, v) = int <sigma(u), grad v> + 1/2 <m(u), grad curl v> dV,
//   l(v) = int <f, v> dV + sum_Neumann int <t, v> + 1/2 <g, P grad v n> dS
//        + sum_edges 1/2 int <pi, v> ds,
// minimised subject to the geometric conditions u = u0 and
// P curl u = P curl u0 on the Dirichlet patches, imposed by collocation at the
// boundary quadrature nodes.

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include "cstress/constitutive.hpp"
#include "cstress/geometry.hpp"
#include "cstress/tractions.hpp"

namespace cstress {

class SingularSystemError : public std::runtime_error {
 public:
  SingularSystemError(const std::string& what, int kernel_dimension)
      : std::runtime_error(what), kernel_dimension_(kernel_dimension) {}
  int kernel_dimension() const { return kernel_dimension_; }

 private:
  int kernel_dimension_;
};

/// Vector monomial basis in centred, scaled coordinates (x - center) / scale.
/// Function index i = 3 * m + k is monomial m in component k.
struct BasisSpec {
  int degree = 1;
  Vec3 center;
  double scale = 1.0;

  std::size_t size() const { return 3 * monomial_count(degree); }
  PolyScalar scalar(std::size_t m) const;
  PolyVector function(std::size_t i) const;
  PolyVector combine(const Eigen::VectorXd& coefficients) const;
};

BasisSpec make_basis(int degree, const DomainGeometry& domain);

struct TractionLoads {
  std::optional<PolyVector> body_force;
  /// Force traction on Neumann patches, paired with v.
  std::function<Vec3(const SurfacePatch&, const Vec3&)> traction;
  /// Moment data paired (weight 1/2) with P grad v n.
  std::function<Vec3(const SurfacePatch&, const Vec3&)> moment;
  /// Line traction of one edge side, paired (weight 1/2) with v.
  std::function<Vec3(const EdgeCurve&, std::size_t side, const EdgeNode&)> edge;
};

/// Loads reproducing the exact field's own boundary data. kCorrected uses
/// t_corr; kMindlinTiersten feeds t_mt (no missing term) and keeps the rest.
TractionLoads manufactured_loads(const StressState& exact, const DomainGeometry& domain,
                                 TractionFlavor flavor);

struct QuadraticForm {
  BasisSpec basis;
  Eigen::MatrixXd stiffness;
  Eigen::VectorXd load;
  double max_asymmetry = 0.0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
};

/// Throws std::domain_error when the energy form is indefinite.
QuadraticForm assemble(const MaterialParams& params, const BasisSpec& basis,
                       const DomainGeometry& domain, const TractionLoads& loads);

/// Linear equality constraints rows * c = rhs.
struct ConstraintSet {
  Eigen::MatrixXd rows;
  Eigen::VectorXd rhs;
  void append(const ConstraintSet& other);
};

/// u = u0 and P curl u = P curl u0 (two tangent components) at every node of
/// every Dirichlet patch.
ConstraintSet geometric_constraints(const BasisSpec& basis, const DomainGeometry& domain,
                                    const PolyVector& u0);
/// Mean displacement and mean rotation fixed to zero.
ConstraintSet gauge_constraints(const BasisSpec& basis, const DomainGeometry& domain);
/// The six rows (u, then P curl u in ambient components) at one boundary point.
Eigen::MatrixXd pointwise_constraint_rows(const BasisSpec& basis, const SurfacePatch& patch,
                                          const Vec3& x);

struct SolveOptions {
  double rank_tolerance = 1e-10;     // relative to the largest singular value
  double kernel_tolerance = 1e-10;   // relative to the largest eigenvalue
  double max_condition = 1e13;
};

struct SolveReport {
  Eigen::VectorXd coefficients;
  PolyVector solution;
  double energy = 0.0;          // total potential Pi
  double strain_energy = 0.0;   // 1/2 a(u, u)
  double constraint_residual = 0.0;
  double optimality_residual = 0.0;  // relative
  double condition_estimate = 0.0;
  int constraint_rank = 0;
  int free_dimension = 0;
};

struct ConstraintBasis {
  Eigen::VectorXd particular;  // minimum-norm solution of rows * c = rhs
  Eigen::MatrixXd null_space;  // orthonormal columns spanning the feasible directions
  int rank = 0;
};

/// Threshold-rank SVD of the constraint rows.
ConstraintBasis constraint_basis(const ConstraintSet& constraints, Eigen::Index n,
                                 double rank_tolerance = 1e-10);

/// Null-space solution of the constrained minimisation. Throws
/// SingularSystemError when the reduced form has a kernel or its condition
/// estimate exceeds the limit.
SolveReport solve_equilibrium(const QuadraticForm& form, const ConstraintSet& constraints,
                              const SolveOptions& options = {});

/// Total potential of an arbitrary coefficient vector.
double potential(const QuadraticForm& form, const Eigen::VectorXd& c);

struct PatchTestResult {
  bool pass = false;
  double displacement_error = 0.0;  // max over volume nodes, modulo rigid motion
  double traction_error = 0.0;      // max |t_corr(u_h) - sigma n| over boundary nodes
  double missing_max = 0.0;         // max |M(u_h)| over boundary nodes
  SolveReport solve;
};

/// Pure-Neumann constant-stress test with u* = A x. Throws
/// std::invalid_argument unless A is symmetric.
PatchTestResult patch_test(const MaterialParams& params, const DomainGeometry& domain, const Mat3& A,
                           int basis_degree = 2, double tolerance = 1e-9);

}  // namespace cstress
