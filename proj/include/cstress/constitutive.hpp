#pragma once

// Linear isotropic couple stress material: energies, stresses and the
// equilibrium residual.
//
//   W       = mu |sym grad u|^2 + lambda/2 tr(sym grad u)^2
//           + alpha1/4 |sym grad curl u|^2 + alpha2/4 |skw grad curl u|^2
//   sigma   = 2 mu sym grad u + lambda tr(grad u) 1
//   m       = alpha1 sym(grad curl u) + alpha2 skw(grad curl u)
//   tau     = sigma - 1/2 anti(Div m)
//   r       = Div tau + f
//
// The first variation of W in direction du is
//   <sigma, grad du> + 1/2 <m, grad curl du>.

#include "cstress/poly.hpp"
#include "cstress/tensor.hpp"

namespace cstress {

struct MaterialParams {
  double mu = 1.0;
  double lambda = 0.0;
  double alpha1 = 1.0;
  double alpha2 = 1.0;

  /// Throws std::invalid_argument naming the violated condition.
  void validate() const;
};

/// Weight of the couple stress in the internal virtual-work density.
inline constexpr double kCurvaturePairing = 0.5;

// Pointwise constitutive maps.
Mat3 cauchy_stress(const MaterialParams& p, const Mat3& grad_u);
Mat3 couple_stress(const MaterialParams& p, const Mat3& grad_curl_u);
double energy_density(const MaterialParams& p, const Mat3& grad_u, const Mat3& grad_curl_u);

// Field versions.
PolyMatrix cauchy_stress(const MaterialParams& p, const PolyVector& u);
PolyMatrix couple_stress(const MaterialParams& p, const PolyVector& u);
PolyMatrix total_force_stress(const MaterialParams& p, const PolyVector& u);
PolyScalar energy_density(const MaterialParams& p, const PolyVector& u);
PolyVector el_residual(const MaterialParams& p, const PolyVector& u, const PolyVector& f);
/// Body force that makes u an exact equilibrium state: f = -Div tau(u).
PolyVector manufactured_body_force(const MaterialParams& p, const PolyVector& u);

/// Every field derived from one displacement, computed once and shared by
/// the traction and virtual-work evaluators.
class StressState {
 public:
  StressState(const MaterialParams& params, const PolyVector& u);

  const MaterialParams& params() const { return params_; }
  const PolyVector& displacement() const { return u_; }
  const PolyMatrix& grad_u() const { return grad_u_; }
  const PolyVector& curl_u() const { return curl_u_; }
  const PolyMatrix& grad_curl_u() const { return grad_curl_u_; }
  const PolyMatrix& sigma() const { return sigma_; }
  const PolyMatrix& couple() const { return couple_; }
  const PolyTen3& grad_couple() const { return grad_couple_; }
  const PolyVector& div_couple() const { return div_couple_; }
  const PolyMatrix& tau() const { return tau_; }
  const PolyVector& div_tau() const { return div_tau_; }

 private:
  MaterialParams params_;
  PolyVector u_;
  PolyMatrix grad_u_;
  PolyVector curl_u_;
  PolyMatrix grad_curl_u_;
  PolyMatrix sigma_;
  PolyMatrix couple_;
  PolyTen3 grad_couple_;
  PolyVector div_couple_;
  PolyMatrix tau_;
  PolyVector div_tau_;
};

}  // namespace cstress
