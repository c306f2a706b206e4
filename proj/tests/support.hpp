#pragma once

#include <random>

#include "cstress/poly.hpp"
#include "cstress/tensor.hpp"

namespace testing_support {

using namespace cstress;

inline double uniform(std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vec3 random_vec(std::mt19937_64& rng) {
  return {uniform(rng), uniform(rng), uniform(rng)};
}

inline Mat3 random_mat(std::mt19937_64& rng) {
  Mat3 A;
  for (auto& a : A.a) a = uniform(rng);
  return A;
}

inline Ten3 random_ten(std::mt19937_64& rng) {
  Ten3 C;
  for (auto& a : C.a) a = uniform(rng);
  return C;
}

inline Vec3 random_point(std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  return {uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi)};
}

// Central difference of a callable along axis k.
template <class F>
auto central_difference(F&& f, Vec3 x, std::size_t k, double h = 1e-5) {
  Vec3 xp = x, xm = x;
  xp[k] += h;
  xm[k] -= h;
  return (f(xp) - f(xm)) * (1.0 / (2.0 * h));
}

}  // namespace testing_support
