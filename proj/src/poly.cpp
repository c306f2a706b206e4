#include "cstress/poly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cstress {

namespace {

constexpr double kPruneThreshold = 1e-300;

struct MonomialTables {
  std::array<Exponent, kNumMonomials> exponents{};
  std::array<std::array<std::array<int, kMaxDegree + 1>, kMaxDegree + 1>, kMaxDegree + 1> index{};

  constexpr MonomialTables() {
    for (auto& plane : index)
      for (auto& line : plane)
        for (auto& v : line) v = -1;
    std::size_t n = 0;
    for (int d = 0; d <= kMaxDegree; ++d)
      for (int a = d; a >= 0; --a)
        for (int b = d - a; b >= 0; --b) {
          const int c = d - a - b;
          exponents[n] = Exponent{a, b, c};
          index[a][b][c] = static_cast<int>(n);
          ++n;
        }
  }
};

constexpr MonomialTables kTables{};

void check_degree(int d) {
  if (d > kMaxDegree)
    throw std::domain_error("polynomial degree " + std::to_string(d) + " exceeds cap " +
                            std::to_string(kMaxDegree));
}

}  // namespace

Exponent exponent_of(std::size_t index) { return kTables.exponents.at(index); }

std::size_t index_of(Exponent e) {
  if (e.x < 0 || e.y < 0 || e.z < 0) throw std::invalid_argument("negative exponent");
  check_degree(e.degree());
  return static_cast<std::size_t>(kTables.index[e.x][e.y][e.z]);
}

PolyScalar PolyScalar::constant(double value) { return monomial({0, 0, 0}, value); }

PolyScalar PolyScalar::monomial(Exponent e, double coefficient) {
  PolyScalar p;
  p.set_coefficient(e, coefficient);
  return p;
}

PolyScalar PolyScalar::coordinate(int axis) {
  Exponent e;
  if (axis == 0) e.x = 1;
  else if (axis == 1) e.y = 1;
  else if (axis == 2) e.z = 1;
  else throw std::invalid_argument("coordinate axis must be 0, 1 or 2");
  return monomial(e);
}

double PolyScalar::coefficient(Exponent e) const {
  if (e.degree() > kMaxDegree) return 0.0;
  return c_[index_of(e)];
}

void PolyScalar::set_coefficient(Exponent e, double value) {
  c_[index_of(e)] = value;
  prune();
}

void PolyScalar::prune() {
  bound_ = -1;
  for (std::size_t i = 0; i < kNumMonomials; ++i) {
    if (std::abs(c_[i]) < kPruneThreshold) c_[i] = 0.0;
    if (c_[i] != 0.0) bound_ = std::max(bound_, kTables.exponents[i].degree());
  }
}

int PolyScalar::degree() const { return bound_; }

double PolyScalar::evaluate(const Vec3& p) const {
  if (bound_ < 0) return 0.0;
  std::array<double, kMaxDegree + 1> px{}, py{}, pz{};
  px[0] = py[0] = pz[0] = 1.0;
  for (int k = 1; k <= bound_; ++k) {
    px[k] = px[k - 1] * p[0];
    py[k] = py[k - 1] * p[1];
    pz[k] = pz[k - 1] * p[2];
  }
  double s = 0.0;
  const std::size_t n = monomial_count(bound_);
  for (std::size_t i = 0; i < n; ++i) {
    if (c_[i] == 0.0) continue;
    const Exponent& e = kTables.exponents[i];
    s += c_[i] * px[e.x] * py[e.y] * pz[e.z];
  }
  return s;
}

PolyScalar PolyScalar::derivative(int axis) const {
  PolyScalar d;
  const std::size_t n = monomial_count(bound_);
  for (std::size_t i = 0; i < n; ++i) {
    if (c_[i] == 0.0) continue;
    Exponent e = kTables.exponents[i];
    int* slot = axis == 0 ? &e.x : axis == 1 ? &e.y : &e.z;
    if (*slot == 0) continue;
    const double factor = *slot;
    --*slot;
    d.c_[static_cast<std::size_t>(kTables.index[e.x][e.y][e.z])] = factor * c_[i];
  }
  d.prune();
  return d;
}

double PolyScalar::max_abs_coefficient() const {
  double m = 0.0;
  for (double v : c_) m = std::max(m, std::abs(v));
  return m;
}

PolyScalar& PolyScalar::operator+=(const PolyScalar& o) {
  for (std::size_t i = 0; i < kNumMonomials; ++i) c_[i] += o.c_[i];
  prune();
  return *this;
}

PolyScalar& PolyScalar::operator-=(const PolyScalar& o) {
  for (std::size_t i = 0; i < kNumMonomials; ++i) c_[i] -= o.c_[i];
  prune();
  return *this;
}

PolyScalar& PolyScalar::operator*=(double s) {
  for (double& v : c_) v *= s;
  prune();
  return *this;
}

PolyScalar operator*(const PolyScalar& a, const PolyScalar& b) {
  PolyScalar r;
  if (a.bound_ < 0 || b.bound_ < 0) return r;
  check_degree(a.bound_ + b.bound_);
  const std::size_t na = monomial_count(a.bound_);
  const std::size_t nb = monomial_count(b.bound_);
  for (std::size_t i = 0; i < na; ++i) {
    if (a.c_[i] == 0.0) continue;
    const Exponent& ea = kTables.exponents[i];
    for (std::size_t j = 0; j < nb; ++j) {
      if (b.c_[j] == 0.0) continue;
      const Exponent& eb = kTables.exponents[j];
      r.c_[static_cast<std::size_t>(kTables.index[ea.x + eb.x][ea.y + eb.y][ea.z + eb.z])] +=
          a.c_[i] * b.c_[j];
    }
  }
  r.prune();
  return r;
}

// ---------------------------------------------------------------------------

Vec3 PolyVector::evaluate(const Vec3& p) const {
  return {c[0].evaluate(p), c[1].evaluate(p), c[2].evaluate(p)};
}

int PolyVector::degree() const {
  return std::max({c[0].degree(), c[1].degree(), c[2].degree()});
}

double PolyVector::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& s : c) m = std::max(m, s.max_abs_coefficient());
  return m;
}

PolyVector& PolyVector::operator+=(const PolyVector& o) {
  for (std::size_t i = 0; i < 3; ++i) c[i] += o.c[i];
  return *this;
}

PolyVector& PolyVector::operator-=(const PolyVector& o) {
  for (std::size_t i = 0; i < 3; ++i) c[i] -= o.c[i];
  return *this;
}

PolyVector& PolyVector::operator*=(double s) {
  for (auto& v : c) v *= s;
  return *this;
}

PolyVector PolyVector::position() {
  PolyVector v;
  for (int i = 0; i < 3; ++i) v.c[static_cast<std::size_t>(i)] = PolyScalar::coordinate(i);
  return v;
}

PolyVector PolyVector::constant(const Vec3& a) {
  PolyVector v;
  for (std::size_t i = 0; i < 3; ++i) v.c[i] = PolyScalar::constant(a[i]);
  return v;
}

Mat3 PolyMatrix::evaluate(const Vec3& p) const {
  Mat3 m;
  for (std::size_t i = 0; i < 9; ++i) m.a[i] = c[i].evaluate(p);
  return m;
}

int PolyMatrix::degree() const {
  int d = -1;
  for (const auto& s : c) d = std::max(d, s.degree());
  return d;
}

double PolyMatrix::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& s : c) m = std::max(m, s.max_abs_coefficient());
  return m;
}

PolyMatrix& PolyMatrix::operator+=(const PolyMatrix& o) {
  for (std::size_t i = 0; i < 9; ++i) c[i] += o.c[i];
  return *this;
}

PolyMatrix& PolyMatrix::operator-=(const PolyMatrix& o) {
  for (std::size_t i = 0; i < 9; ++i) c[i] -= o.c[i];
  return *this;
}

PolyMatrix& PolyMatrix::operator*=(double s) {
  for (auto& v : c) v *= s;
  return *this;
}

PolyMatrix PolyMatrix::constant(const Mat3& m) {
  PolyMatrix r;
  for (std::size_t i = 0; i < 9; ++i) r.c[i] = PolyScalar::constant(m.a[i]);
  return r;
}

Ten3 PolyTen3::evaluate(const Vec3& p) const {
  Ten3 t;
  for (std::size_t i = 0; i < 27; ++i) t.a[i] = c[i].evaluate(p);
  return t;
}

double PolyTen3::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& s : c) m = std::max(m, s.max_abs_coefficient());
  return m;
}

// ---------------------------------------------------------------------------

PolyVector grad(const PolyScalar& f) {
  PolyVector g;
  for (int k = 0; k < 3; ++k) g[static_cast<std::size_t>(k)] = f.derivative(k);
  return g;
}

PolyMatrix grad_vector(const PolyVector& v) {
  PolyMatrix G;
  for (std::size_t i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) G(i, static_cast<std::size_t>(k)) = v[i].derivative(k);
  return G;
}

PolyVector curl_vector(const PolyVector& v) {
  PolyVector r;
  r[0] = v[2].derivative(1) - v[1].derivative(2);
  r[1] = v[0].derivative(2) - v[2].derivative(0);
  r[2] = v[1].derivative(0) - v[0].derivative(1);
  return r;
}

PolyScalar div_vector(const PolyVector& v) {
  return v[0].derivative(0) + v[1].derivative(1) + v[2].derivative(2);
}

PolyVector div_matrix(const PolyMatrix& A) {
  PolyVector r;
  for (std::size_t i = 0; i < 3; ++i)
    r[i] = A(i, 0).derivative(0) + A(i, 1).derivative(1) + A(i, 2).derivative(2);
  return r;
}

PolyTen3 grad_matrix(const PolyMatrix& A) {
  PolyTen3 T;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) T(i, j, static_cast<std::size_t>(k)) = A(i, j).derivative(k);
  return T;
}

PolyMatrix transpose(const PolyMatrix& A) {
  PolyMatrix T;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) T(i, j) = A(j, i);
  return T;
}

PolyMatrix sym(const PolyMatrix& A) {
  PolyMatrix S = A + transpose(A);
  S *= 0.5;
  return S;
}

PolyMatrix skw(const PolyMatrix& A) {
  PolyMatrix S = A - transpose(A);
  S *= 0.5;
  return S;
}

PolyScalar trace(const PolyMatrix& A) { return A(0, 0) + A(1, 1) + A(2, 2); }

PolyMatrix anti(const PolyVector& v) {
  PolyMatrix m;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k) {
        const double e = levi_civita(i, j, k);
        if (e != 0.0) m(i, j) -= e * v[k];
      }
  return m;
}

PolyMatrix scaled_identity(const PolyScalar& s) {
  PolyMatrix m;
  for (std::size_t i = 0; i < 3; ++i) m(i, i) = s;
  return m;
}

PolyScalar inner(const PolyMatrix& A, const PolyMatrix& B) {
  PolyScalar s;
  for (std::size_t i = 0; i < 9; ++i) s += A.c[i] * B.c[i];
  return s;
}

PolyVector operator*(const Mat3& A, const PolyVector& v) {
  PolyVector r;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      if (A(i, j) != 0.0) r[i] += A(i, j) * v[j];
  return r;
}

PolyScalar random_scalar(std::mt19937_64& rng, int degree) {
  check_degree(degree);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  PolyScalar p;
  for (std::size_t i = 0; i < monomial_count(degree); ++i)
    p += PolyScalar::monomial(exponent_of(i), dist(rng));
  return p;
}

PolyVector random_vector(std::mt19937_64& rng, int degree) {
  PolyVector v;
  for (auto& s : v.c) s = random_scalar(rng, degree);
  return v;
}

PolyMatrix random_matrix(std::mt19937_64& rng, int degree) {
  PolyMatrix m;
  for (auto& s : m.c) s = random_scalar(rng, degree);
  return m;
}

std::string to_string(const PolyScalar& p) {
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (std::size_t i = 0; i < monomial_count(p.degree()); ++i) {
    const double c = p.coefficient_at(i);
    if (c == 0.0) continue;
    const Exponent e = exponent_of(i);
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << '-';
    first = false;
    os << std::abs(c);
    const char* names = "xyz";
    const int pw[3] = {e.x, e.y, e.z};
    for (int k = 0; k < 3; ++k) {
      if (pw[k] == 0) continue;
      os << '*' << names[k];
      if (pw[k] > 1) os << '^' << pw[k];
    }
  }
  return first ? std::string("0") : os.str();
}

}  // namespace cstress
