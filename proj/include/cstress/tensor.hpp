#pragma once

// Dense order-1/2/3 tensors over R^3.
//
// Index conventions:
//   (anti v)_ij = -eps_ijk v_k, so that anti(v) * w = v x w
//   (C : B)_i   = C_ijp B_pj
//   (grad A)_ijk = dA_ij / dx_k

#include <array>
#include <cmath>
#include <cstddef>
#include <iosfwd>

namespace cstress {

struct Vec3 {
  std::array<double, 3> v{0.0, 0.0, 0.0};

  constexpr Vec3() = default;
  constexpr Vec3(double x, double y, double z) : v{x, y, z} {}

  constexpr double& operator[](std::size_t i) { return v[i]; }
  constexpr double operator[](std::size_t i) const { return v[i]; }

  Vec3& operator+=(const Vec3& o) {
    for (std::size_t i = 0; i < 3; ++i) v[i] += o.v[i];
    return *this;
  }
  Vec3& operator-=(const Vec3& o) {
    for (std::size_t i = 0; i < 3; ++i) v[i] -= o.v[i];
    return *this;
  }
  Vec3& operator*=(double s) {
    for (auto& c : v) c *= s;
    return *this;
  }

  static constexpr Vec3 unit(std::size_t i) {
    Vec3 e;
    e.v[i] = 1.0;
    return e;
  }
};

inline Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
inline Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
inline Vec3 operator-(Vec3 a) { return a *= -1.0; }
inline Vec3 operator*(double s, Vec3 a) { return a *= s; }
inline Vec3 operator*(Vec3 a, double s) { return a *= s; }

double dot(const Vec3& a, const Vec3& b);
Vec3 cross(const Vec3& a, const Vec3& b);
double norm(const Vec3& a);
double max_abs(const Vec3& a);

/// Row-major 3x3 matrix.
struct Mat3 {
  std::array<double, 9> a{};

  constexpr double& operator()(std::size_t i, std::size_t j) { return a[3 * i + j]; }
  constexpr double operator()(std::size_t i, std::size_t j) const { return a[3 * i + j]; }

  Mat3& operator+=(const Mat3& o) {
    for (std::size_t i = 0; i < 9; ++i) a[i] += o.a[i];
    return *this;
  }
  Mat3& operator-=(const Mat3& o) {
    for (std::size_t i = 0; i < 9; ++i) a[i] -= o.a[i];
    return *this;
  }
  Mat3& operator*=(double s) {
    for (auto& c : a) c *= s;
    return *this;
  }

  static Mat3 identity();
  static Mat3 diag(double d0, double d1, double d2);
  static Mat3 from_rows(const Vec3& r0, const Vec3& r1, const Vec3& r2);
};

inline Mat3 operator+(Mat3 a, const Mat3& b) { return a += b; }
inline Mat3 operator-(Mat3 a, const Mat3& b) { return a -= b; }
inline Mat3 operator-(Mat3 a) { return a *= -1.0; }
inline Mat3 operator*(double s, Mat3 a) { return a *= s; }
inline Mat3 operator*(Mat3 a, double s) { return a *= s; }

Vec3 operator*(const Mat3& A, const Vec3& x);
Mat3 operator*(const Mat3& A, const Mat3& B);
Mat3 transpose(const Mat3& A);
Mat3 outer(const Vec3& a, const Vec3& b);
double trace(const Mat3& A);
/// Frobenius inner product <A, B> = A_ij B_ij.
double inner(const Mat3& A, const Mat3& B);
double frobenius(const Mat3& A);
double max_abs(const Mat3& A);
Vec3 row(const Mat3& A, std::size_t i);
Vec3 column(const Mat3& A, std::size_t j);

Mat3 sym(const Mat3& A);
Mat3 skw(const Mat3& A);

struct Decomposition {
  Mat3 sym;
  Mat3 skw;
  double trace = 0.0;
};
Decomposition decompose(const Mat3& A);

/// Permutation symbol, stored as a table.
double levi_civita(std::size_t i, std::size_t j, std::size_t k);

Mat3 anti(const Vec3& v);

/// Inverse of anti on skew matrices. Throws std::invalid_argument when the
/// symmetric part of A exceeds 1e-12 relative to |A|.
Vec3 axl(const Mat3& A);

/// P = 1 - n (x) n. Throws std::invalid_argument if |n| differs from 1 by more
/// than 1e-10.
Mat3 tangential_projector(const Vec3& n);

/// Order-3 tensor C_ijk, k fastest.
struct Ten3 {
  std::array<double, 27> a{};

  constexpr double& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return a[9 * i + 3 * j + k];
  }
  constexpr double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return a[9 * i + 3 * j + k];
  }

  Ten3& operator+=(const Ten3& o) {
    for (std::size_t i = 0; i < 27; ++i) a[i] += o.a[i];
    return *this;
  }
  Ten3& operator*=(double s) {
    for (auto& c : a) c *= s;
    return *this;
  }
};

inline Ten3 operator+(Ten3 a, const Ten3& b) { return a += b; }
inline Ten3 operator*(double s, Ten3 a) { return a *= s; }

/// (C : B)_i = C_ijp B_pj
Vec3 double_contract(const Ten3& C, const Mat3& B);
/// (C . B)_ijk = C_ijp B_pk
Ten3 simple_contract(const Ten3& C, const Mat3& B);
double max_abs(const Ten3& C);

std::ostream& operator<<(std::ostream& os, const Vec3& v);
std::ostream& operator<<(std::ostream& os, const Mat3& A);

}  // namespace cstress
