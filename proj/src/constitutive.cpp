#include "cstress/constitutive.hpp"

#include <cmath>
#include <stdexcept>

namespace cstress {

void MaterialParams::validate() const {
  if (!std::isfinite(mu) || !std::isfinite(lambda) || !std::isfinite(alpha1) ||
      !std::isfinite(alpha2))
    throw std::invalid_argument("material parameters must be finite");
  if (!(mu > 0.0)) throw std::invalid_argument("material: mu must be > 0");
  if (!(3.0 * lambda + 2.0 * mu > 0.0))
    throw std::invalid_argument("material: 3*lambda + 2*mu must be > 0");
  if (alpha1 < 0.0 || alpha2 < 0.0)
    throw std::invalid_argument("material: alpha1 and alpha2 must be >= 0");
  if (!(alpha1 + alpha2 > 0.0)) throw std::invalid_argument("material: alpha1 + alpha2 must be > 0");
}

Mat3 cauchy_stress(const MaterialParams& p, const Mat3& grad_u) {
  return 2.0 * p.mu * sym(grad_u) + (p.lambda * trace(grad_u)) * Mat3::identity();
}

Mat3 couple_stress(const MaterialParams& p, const Mat3& grad_curl_u) {
  return p.alpha1 * sym(grad_curl_u) + p.alpha2 * skw(grad_curl_u);
}

double energy_density(const MaterialParams& p, const Mat3& grad_u, const Mat3& grad_curl_u) {
  const Mat3 e = sym(grad_u);
  const double tr = trace(e);
  const Mat3 ks = sym(grad_curl_u);
  const Mat3 kw = skw(grad_curl_u);
  return p.mu * inner(e, e) + 0.5 * p.lambda * tr * tr + 0.25 * p.alpha1 * inner(ks, ks) +
         0.25 * p.alpha2 * inner(kw, kw);
}

PolyMatrix cauchy_stress(const MaterialParams& p, const PolyVector& u) {
  const PolyMatrix g = grad_vector(u);
  return 2.0 * p.mu * sym(g) + scaled_identity(p.lambda * trace(g));
}

PolyMatrix couple_stress(const MaterialParams& p, const PolyVector& u) {
  const PolyMatrix k = grad_vector(curl_vector(u));
  return p.alpha1 * sym(k) + p.alpha2 * skw(k);
}

PolyMatrix total_force_stress(const MaterialParams& p, const PolyVector& u) {
  PolyMatrix tau = cauchy_stress(p, u);
  tau -= 0.5 * anti(div_matrix(couple_stress(p, u)));
  return tau;
}

PolyScalar energy_density(const MaterialParams& p, const PolyVector& u) {
  const PolyMatrix e = sym(grad_vector(u));
  const PolyScalar tr = trace(e);
  const PolyMatrix k = grad_vector(curl_vector(u));
  const PolyMatrix ks = sym(k);
  const PolyMatrix kw = skw(k);
  return p.mu * inner(e, e) + 0.5 * p.lambda * (tr * tr) + 0.25 * p.alpha1 * inner(ks, ks) +
         0.25 * p.alpha2 * inner(kw, kw);
}

PolyVector el_residual(const MaterialParams& p, const PolyVector& u, const PolyVector& f) {
  return div_matrix(total_force_stress(p, u)) + f;
}

PolyVector manufactured_body_force(const MaterialParams& p, const PolyVector& u) {
  return -div_matrix(total_force_stress(p, u));
}

StressState::StressState(const MaterialParams& params, const PolyVector& u)
    : params_(params), u_(u) {
  grad_u_ = grad_vector(u_);
  curl_u_ = curl_vector(u_);
  grad_curl_u_ = grad_vector(curl_u_);
  sigma_ = 2.0 * params_.mu * sym(grad_u_) + scaled_identity(params_.lambda * trace(grad_u_));
  couple_ = params_.alpha1 * sym(grad_curl_u_) + params_.alpha2 * skw(grad_curl_u_);
  grad_couple_ = grad_matrix(couple_);
  div_couple_ = div_matrix(couple_);
  tau_ = sigma_ - 0.5 * anti(div_couple_);
  div_tau_ = div_matrix(tau_);
}

}  // namespace cstress
