#pragma once

#include "edg/types.hpp"

#include <vector>

namespace edg {

// Values and gradients of all basis functions at one point.
struct BasisEval {
  Vec values;     // size = dim
  Mat gradients;  // dim x 2, row i = grad of basis i
};

// Nodal Lagrange basis of total degree d on the reference triangle, with
// nodes on the principal lattice (i/d, j/d), i+j <= d; degree 0 uses the
// centroid. Functions are represented in the monomial basis through the
// inverse Vandermonde matrix. Immutable after construction.
class TriangleBasis {
public:
  explicit TriangleBasis(int degree);

  int degree() const { return degree_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<Vec2>& nodes() const { return nodes_; }

  BasisEval eval(const Vec2& p) const;

private:
  int degree_;
  std::vector<Vec2> nodes_;
  std::vector<std::pair<int, int>> exponents_;
  Mat coeffs_; // column i = monomial coefficients of basis function i
};

// Nodal Lagrange basis of degree d on [0,1] with equispaced nodes t = i/d.
// Node 0 sits at t=0 and node d at t=1, matching the face dof layout.
class EdgeBasis {
public:
  explicit EdgeBasis(int degree);

  int degree() const { return degree_; }
  int size() const { return degree_ + 1; }
  const std::vector<double>& nodes() const { return nodes_; }

  Vec eval(double t) const;

private:
  int degree_;
  std::vector<double> nodes_;
  Mat coeffs_;
};

// Convenience wrapper: scalar basis values and gradients of the given degree
// at a reference point (constructs or reuses a cached TriangleBasis).
BasisEval eval_scalar_basis(int degree, const Vec2& p);

} // namespace edg
