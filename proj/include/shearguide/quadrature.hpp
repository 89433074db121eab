#pragma once

#include <functional>
#include <vector>

namespace shearguide {

struct QuadratureRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule, exact for polynomials of degree 2n - 1.
const QuadratureRule& gauss_legendre(int n);

double composite_gauss_legendre(const std::function<double(double)>& f, double lo, double hi, int panels,
                                int order);

}  // namespace shearguide
