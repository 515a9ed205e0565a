#include "edg/quadrature.hpp"

#include "edg/errors.hpp"

#include <cmath>
#include <string>

namespace edg {
namespace {

constexpr int kMaxExactness = 40;

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on the Legendre
// recurrence, then mapped to [0,1].
void gauss_legendre01(int m, std::vector<double>& x, std::vector<double>& w) {
  x.resize(m);
  w.resize(m);
  for (int i = 0; i < m; ++i) {
    // Chebyshev-based initial guess for the i-th root.
    double t = std::cos(M_PI * (i + 0.75) / (m + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = m * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / pp;
      t -= dt;
      if (std::abs(dt) < 1e-15)
        break;
    }
    x[i] = 0.5 * (1.0 - t); // roots come out descending; map to ascending later
    w[i] = 1.0 / ((1.0 - t * t) * pp * pp);
  }
  // Map ordering so points ascend in [0,1].
  for (int i = 0; i < m / 2; ++i) {
    std::swap(x[i], x[m - 1 - i]);
    std::swap(w[i], w[m - 1 - i]);
  }
}

} // namespace

QuadratureRule triangle_quadrature(int exactness) {
  if (exactness < 0 || exactness > kMaxExactness)
    throw UnsupportedDegreeError("triangle quadrature exactness " +
                                 std::to_string(exactness) + " not supported");

  // Collapse mapping x = u, y = v(1-u) with Jacobian (1-u): the integrand of a
  // degree-d polynomial has degree d+1 in u and d in v, so m Gauss points per
  // direction give exactness 2m-2.
  const int m = (exactness + 3) / 2;
  std::vector<double> gx, gw;
  gauss_legendre01(m, gx, gw);

  QuadratureRule rule;
  rule.exactness = exactness;
  rule.points.reserve(m * m);
  rule.weights.reserve(m * m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const double u = gx[i], v = gx[j];
      rule.points.emplace_back(u, v * (1.0 - u));
      rule.weights.push_back(gw[i] * gw[j] * (1.0 - u));
    }
  }
  return rule;
}

EdgeRule edge_quadrature(int exactness) {
  if (exactness < 0 || exactness > kMaxExactness)
    throw UnsupportedDegreeError("edge quadrature exactness " +
                                 std::to_string(exactness) + " not supported");
  const int m = exactness / 2 + 1;
  EdgeRule rule;
  rule.exactness = exactness;
  gauss_legendre01(m, rule.points, rule.weights);
  return rule;
}

} // namespace edg
