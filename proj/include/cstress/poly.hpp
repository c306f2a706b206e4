#pragma once

// Trivariate polynomial fields with exact differentiation.
//
// Coefficients are stored densely over all exponent triples (a, b, c) with
// a + b + c <= kMaxDegree, in graded order. Any operation whose result would
// exceed the degree cap throws std::domain_error.

#include <array>
#include <cstddef>
#include <random>
#include <string>

#include "cstress/tensor.hpp"

namespace cstress {

inline constexpr int kMaxDegree = 8;
inline constexpr std::size_t kNumMonomials = 165;  // C(kMaxDegree + 3, 3)

struct Exponent {
  int x = 0;
  int y = 0;
  int z = 0;
  constexpr int degree() const { return x + y + z; }
};

/// Number of monomials of total degree <= d.
constexpr std::size_t monomial_count(int d) {
  return d < 0 ? 0 : static_cast<std::size_t>((d + 1) * (d + 2) * (d + 3) / 6);
}

Exponent exponent_of(std::size_t index);
std::size_t index_of(Exponent e);

class PolyScalar {
 public:
  PolyScalar() = default;

  static PolyScalar constant(double value);
  static PolyScalar monomial(Exponent e, double coefficient = 1.0);
  /// x, y or z for axis 0, 1, 2.
  static PolyScalar coordinate(int axis);

  double coefficient(Exponent e) const;
  void set_coefficient(Exponent e, double value);
  double coefficient_at(std::size_t index) const { return c_[index]; }

  /// Highest degree with a nonzero coefficient, -1 for the zero polynomial.
  int degree() const;
  double evaluate(const Vec3& p) const;
  PolyScalar derivative(int axis) const;

  double max_abs_coefficient() const;
  bool is_zero(double tol = 0.0) const { return max_abs_coefficient() <= tol; }

  PolyScalar& operator+=(const PolyScalar& o);
  PolyScalar& operator-=(const PolyScalar& o);
  PolyScalar& operator*=(double s);

  friend PolyScalar operator*(const PolyScalar& a, const PolyScalar& b);

 private:
  void prune();

  std::array<double, kNumMonomials> c_{};
  int bound_ = -1;  // no nonzero coefficient above this degree
};

inline PolyScalar operator+(PolyScalar a, const PolyScalar& b) { return a += b; }
inline PolyScalar operator-(PolyScalar a, const PolyScalar& b) { return a -= b; }
inline PolyScalar operator-(PolyScalar a) { return a *= -1.0; }
inline PolyScalar operator*(double s, PolyScalar a) { return a *= s; }
inline PolyScalar operator*(PolyScalar a, double s) { return a *= s; }

struct PolyVector {
  std::array<PolyScalar, 3> c;

  PolyScalar& operator[](std::size_t i) { return c[i]; }
  const PolyScalar& operator[](std::size_t i) const { return c[i]; }

  Vec3 evaluate(const Vec3& p) const;
  int degree() const;
  double max_abs_coefficient() const;

  PolyVector& operator+=(const PolyVector& o);
  PolyVector& operator-=(const PolyVector& o);
  PolyVector& operator*=(double s);

  /// The identity map x -> x.
  static PolyVector position();
  static PolyVector constant(const Vec3& v);
};

inline PolyVector operator+(PolyVector a, const PolyVector& b) { return a += b; }
inline PolyVector operator-(PolyVector a, const PolyVector& b) { return a -= b; }
inline PolyVector operator-(PolyVector a) { return a *= -1.0; }
inline PolyVector operator*(double s, PolyVector a) { return a *= s; }

struct PolyMatrix {
  std::array<PolyScalar, 9> c;

  PolyScalar& operator()(std::size_t i, std::size_t j) { return c[3 * i + j]; }
  const PolyScalar& operator()(std::size_t i, std::size_t j) const { return c[3 * i + j]; }

  Mat3 evaluate(const Vec3& p) const;
  int degree() const;
  double max_abs_coefficient() const;

  PolyMatrix& operator+=(const PolyMatrix& o);
  PolyMatrix& operator-=(const PolyMatrix& o);
  PolyMatrix& operator*=(double s);

  static PolyMatrix constant(const Mat3& m);
};

inline PolyMatrix operator+(PolyMatrix a, const PolyMatrix& b) { return a += b; }
inline PolyMatrix operator-(PolyMatrix a, const PolyMatrix& b) { return a -= b; }
inline PolyMatrix operator*(double s, PolyMatrix a) { return a *= s; }

/// Order-3 field with (T)_ijk, k fastest.
struct PolyTen3 {
  std::array<PolyScalar, 27> c;

  PolyScalar& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return c[9 * i + 3 * j + k];
  }
  const PolyScalar& operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return c[9 * i + 3 * j + k];
  }

  Ten3 evaluate(const Vec3& p) const;
  double max_abs_coefficient() const;
};

// Differential operators. Conventions: (grad v)_ik = v_i,k;
// (curl v)_i = eps_ijk v_k,j; (Div A)_i = A_ij,j; (grad A)_ijk = A_ij,k.
PolyVector grad(const PolyScalar& f);
PolyMatrix grad_vector(const PolyVector& v);
PolyVector curl_vector(const PolyVector& v);
PolyScalar div_vector(const PolyVector& v);
PolyVector div_matrix(const PolyMatrix& A);
PolyTen3 grad_matrix(const PolyMatrix& A);

// Pointwise-algebra lifts used by the constitutive layer.
PolyMatrix transpose(const PolyMatrix& A);
PolyMatrix sym(const PolyMatrix& A);
PolyMatrix skw(const PolyMatrix& A);
PolyScalar trace(const PolyMatrix& A);
PolyMatrix anti(const PolyVector& v);
/// Identity matrix scaled by a scalar field.
PolyMatrix scaled_identity(const PolyScalar& s);
/// Frobenius product field A_ij B_ij.
PolyScalar inner(const PolyMatrix& A, const PolyMatrix& B);
/// Constant matrix times vector field.
PolyVector operator*(const Mat3& A, const PolyVector& v);

// Seeded random fields with coefficients uniform in [-1, 1] on every
// monomial of degree <= degree.
PolyScalar random_scalar(std::mt19937_64& rng, int degree);
PolyVector random_vector(std::mt19937_64& rng, int degree);
PolyMatrix random_matrix(std::mt19937_64& rng, int degree);

std::string to_string(const PolyScalar& p);

}  // namespace cstress
