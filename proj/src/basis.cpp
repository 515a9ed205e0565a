#include "edg/basis.hpp"

#include "edg/errors.hpp"

#include <Eigen/Dense>
#include <map>
#include <string>

namespace edg {

TriangleBasis::TriangleBasis(int degree) : degree_(degree) {
  if (degree < 0 || degree > 10)
    throw UnsupportedDegreeError("triangle basis degree " + std::to_string(degree));

  if (degree == 0) {
    nodes_.emplace_back(1.0 / 3.0, 1.0 / 3.0);
    exponents_.emplace_back(0, 0);
    coeffs_ = Mat::Ones(1, 1);
    return;
  }

  for (int j = 0; j <= degree; ++j)
    for (int i = 0; i + j <= degree; ++i)
      nodes_.emplace_back(double(i) / degree, double(j) / degree);
  for (int d = 0; d <= degree; ++d)
    for (int a = d; a >= 0; --a)
      exponents_.emplace_back(a, d - a);

  const int n = size();
  Mat vand(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      vand(r, c) = std::pow(nodes_[r].x(), exponents_[c].first) *
                   std::pow(nodes_[r].y(), exponents_[c].second);
  coeffs_ = vand.partialPivLu().inverse();
}

BasisEval TriangleBasis::eval(const Vec2& p) const {
  const int n = size();
  Vec mono(n);
  Mat dmono(n, 2);
  for (int c = 0; c < n; ++c) {
    const int a = exponents_[c].first, b = exponents_[c].second;
    const double xa = std::pow(p.x(), a), yb = std::pow(p.y(), b);
    mono(c) = xa * yb;
    dmono(c, 0) = a == 0 ? 0.0 : a * std::pow(p.x(), a - 1) * yb;
    dmono(c, 1) = b == 0 ? 0.0 : b * xa * std::pow(p.y(), b - 1);
  }
  BasisEval out;
  out.values = coeffs_.transpose() * mono;
  out.gradients = coeffs_.transpose() * dmono;
  return out;
}

EdgeBasis::EdgeBasis(int degree) : degree_(degree) {
  if (degree < 1 || degree > 10)
    throw UnsupportedDegreeError("edge basis degree " + std::to_string(degree));
  const int n = degree + 1;
  for (int i = 0; i < n; ++i)
    nodes_.push_back(double(i) / degree);
  Mat vand(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      vand(r, c) = std::pow(nodes_[r], c);
  coeffs_ = vand.partialPivLu().inverse();
}

Vec EdgeBasis::eval(double t) const {
  const int n = size();
  Vec mono(n);
  double tc = 1.0;
  for (int c = 0; c < n; ++c) {
    mono(c) = tc;
    tc *= t;
  }
  return coeffs_.transpose() * mono;
}

BasisEval eval_scalar_basis(int degree, const Vec2& p) {
  static std::map<int, TriangleBasis> cache;
  auto it = cache.find(degree);
  if (it == cache.end())
    it = cache.emplace(degree, TriangleBasis(degree)).first;
  return it->second.eval(p);
}

} // namespace edg
