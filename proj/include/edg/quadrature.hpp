#pragma once

#include "edg/types.hpp"

#include <vector>

namespace edg {

// Quadrature rule on the reference triangle {x,y >= 0, x+y <= 1}.
// Weights are all positive and sum to the reference area 1/2.
struct QuadratureRule {
  std::vector<Vec2> points;
  std::vector<double> weights;
  int exactness = 0; // every polynomial of this total degree is integrated exactly
};

// Gauss rule on the reference interval [0,1]; weights sum to 1.
struct EdgeRule {
  std::vector<double> points;
  std::vector<double> weights;
  int exactness = 0;
};

// Rule exact for all polynomials of total degree <= exactness, built as a
// tensor Gauss rule collapsed onto the triangle. Throws UnsupportedDegreeError
// outside the supported range.
QuadratureRule triangle_quadrature(int exactness);

EdgeRule edge_quadrature(int exactness);

} // namespace edg
