#include "cstress/tensor.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace cstress {

namespace {

// eps[i][j][k]
constexpr double kEps[3][3][3] = {
    {{0, 0, 0}, {0, 0, 1}, {0, -1, 0}},
    {{0, 0, -1}, {0, 0, 0}, {1, 0, 0}},
    {{0, 1, 0}, {-1, 0, 0}, {0, 0, 0}},
};

constexpr double kSkewTolerance = 1e-12;
constexpr double kUnitTolerance = 1e-10;

}  // namespace

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

double max_abs(const Vec3& a) {
  return std::max({std::abs(a[0]), std::abs(a[1]), std::abs(a[2])});
}

Mat3 Mat3::identity() { return diag(1.0, 1.0, 1.0); }

Mat3 Mat3::diag(double d0, double d1, double d2) {
  Mat3 m;
  m(0, 0) = d0;
  m(1, 1) = d1;
  m(2, 2) = d2;
  return m;
}

Mat3 Mat3::from_rows(const Vec3& r0, const Vec3& r1, const Vec3& r2) {
  Mat3 m;
  for (std::size_t j = 0; j < 3; ++j) {
    m(0, j) = r0[j];
    m(1, j) = r1[j];
    m(2, j) = r2[j];
  }
  return m;
}

Vec3 operator*(const Mat3& A, const Vec3& x) {
  Vec3 y;
  for (std::size_t i = 0; i < 3; ++i) y[i] = A(i, 0) * x[0] + A(i, 1) * x[1] + A(i, 2) * x[2];
  return y;
}

Mat3 operator*(const Mat3& A, const Mat3& B) {
  Mat3 C;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < 3; ++k)
      C(i, k) = A(i, 0) * B(0, k) + A(i, 1) * B(1, k) + A(i, 2) * B(2, k);
  return C;
}

Mat3 transpose(const Mat3& A) {
  Mat3 T;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) T(i, j) = A(j, i);
  return T;
}

Mat3 outer(const Vec3& a, const Vec3& b) {
  Mat3 m;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) m(i, j) = a[i] * b[j];
  return m;
}

double trace(const Mat3& A) { return A(0, 0) + A(1, 1) + A(2, 2); }

double inner(const Mat3& A, const Mat3& B) {
  double s = 0.0;
  for (std::size_t i = 0; i < 9; ++i) s += A.a[i] * B.a[i];
  return s;
}

double frobenius(const Mat3& A) { return std::sqrt(inner(A, A)); }

double max_abs(const Mat3& A) {
  double m = 0.0;
  for (double c : A.a) m = std::max(m, std::abs(c));
  return m;
}

Vec3 row(const Mat3& A, std::size_t i) { return {A(i, 0), A(i, 1), A(i, 2)}; }
Vec3 column(const Mat3& A, std::size_t j) { return {A(0, j), A(1, j), A(2, j)}; }

Mat3 sym(const Mat3& A) { return 0.5 * (A + transpose(A)); }
Mat3 skw(const Mat3& A) { return 0.5 * (A - transpose(A)); }

Decomposition decompose(const Mat3& A) { return {sym(A), skw(A), trace(A)}; }

double levi_civita(std::size_t i, std::size_t j, std::size_t k) { return kEps[i][j][k]; }

Mat3 anti(const Vec3& v) {
  Mat3 m;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 3; ++k) s -= kEps[i][j][k] * v[k];
      m(i, j) = s;
    }
  return m;
}

Vec3 axl(const Mat3& A) {
  const double scale = frobenius(A);
  if (frobenius(sym(A)) > kSkewTolerance * scale)
    throw std::invalid_argument("axl: argument is not skew-symmetric");
  // anti(v)_ij = -eps_ijk v_k  =>  v_k = -1/2 eps_ijk A_ij
  Vec3 v;
  for (std::size_t k = 0; k < 3; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) s -= kEps[i][j][k] * A(i, j);
    v[k] = 0.5 * s;
  }
  return v;
}

Mat3 tangential_projector(const Vec3& n) {
  if (std::abs(norm(n) - 1.0) > kUnitTolerance)
    throw std::invalid_argument("tangential_projector: normal is not a unit vector");
  return Mat3::identity() - outer(n, n);
}

Vec3 double_contract(const Ten3& C, const Mat3& B) {
  Vec3 r;
  for (std::size_t i = 0; i < 3; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t p = 0; p < 3; ++p) s += C(i, j, p) * B(p, j);
    r[i] = s;
  }
  return r;
}

Ten3 simple_contract(const Ten3& C, const Mat3& B) {
  Ten3 r;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k) {
        double s = 0.0;
        for (std::size_t p = 0; p < 3; ++p) s += C(i, j, p) * B(p, k);
        r(i, j, k) = s;
      }
  return r;
}

double max_abs(const Ten3& C) {
  double m = 0.0;
  for (double c : C.a) m = std::max(m, std::abs(c));
  return m;
}

std::ostream& operator<<(std::ostream& os, const Vec3& v) {
  return os << '(' << v[0] << ", " << v[1] << ", " << v[2] << ')';
}

std::ostream& operator<<(std::ostream& os, const Mat3& A) {
  os << '[';
  for (std::size_t i = 0; i < 3; ++i) os << (i ? ", " : "") << row(A, i);
  return os << ']';
}

}  // namespace cstress
