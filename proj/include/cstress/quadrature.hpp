#pragma once

#include <vector>

namespace cstress {

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [a, b], exact for degree 2n - 1.
Rule1D gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// n equispaced nodes on [0, 2 pi) with weight 2 pi / n; exact for
/// trigonometric polynomials of degree < n.
Rule1D uniform_periodic(int n);

}  // namespace cstress
