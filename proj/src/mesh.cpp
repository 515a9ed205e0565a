#include "edg/mesh.hpp"

#include "edg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

namespace edg {

double Mesh::area(int e) const {
  const Vec2 a = element_vertex(e, 0);
  const Vec2 b = element_vertex(e, 1);
  const Vec2 c = element_vertex(e, 2);
  const Vec2 u = b - a, v = c - a;
  return 0.5 * (u.x() * v.y() - u.y() * v.x());
}

double Mesh::face_length(int f) const {
  return (vertices[faces[f].v_hi] - vertices[faces[f].v_lo]).norm();
}

Vec2 Mesh::outward_normal(int e, int side) const {
  const Vec2 a = element_vertex(e, side);
  const Vec2 b = element_vertex(e, (side + 1) % 3);
  const Vec2 t = b - a;
  // Clockwise rotation of the edge direction points out of a CCW triangle.
  Vec2 nrm(t.y(), -t.x());
  return nrm / nrm.norm();
}

void Mesh::dump(std::ostream& os) const {
  os.precision(17);
  for (const Vec2& v : vertices)
    os << v.x() << ' ' << v.y() << '\n';
  for (const auto& t : triangles)
    os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

Mesh build_structured(int n, Diagonal /*diag*/) {
  if (n < 1)
    throw UsageError("mesh subdivision count must be at least 1");

  Mesh m;
  m.n = n;

  const auto vid = [n](int i, int j) { return j * (n + 1) + i; };

  m.vertices.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      m.vertices.emplace_back(double(i) / n, double(j) / n);

  // Each cell is split along its lower-left to upper-right diagonal; both
  // triangles are oriented counterclockwise.
  m.triangles.reserve(2 * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int a = vid(i, j), b = vid(i + 1, j);
      const int c = vid(i + 1, j + 1), d = vid(i, j + 1);
      m.triangles.push_back({a, b, c});
      m.triangles.push_back({a, c, d});
    }
  }

  std::map<std::pair<int, int>, int> face_of;
  m.element_faces.resize(m.num_elements());
  for (int e = 0; e < m.num_elements(); ++e) {
    for (int s = 0; s < 3; ++s) {
      const int va = m.triangles[e][s];
      const int vb = m.triangles[e][(s + 1) % 3];
      const std::pair<int, int> key{std::min(va, vb), std::max(va, vb)};
      auto it = face_of.find(key);
      int f;
      if (it == face_of.end()) {
        f = m.num_faces();
        face_of.emplace(key, f);
        Face face;
        face.v_lo = key.first;
        face.v_hi = key.second;
        m.faces.push_back(face);
      } else {
        f = it->second;
      }
      Face& face = m.faces[f];
      face.sides[face.n_sides++] = FaceSide{e, s};
      m.element_faces[e][s] = f;
    }
  }

  m.vertex_on_boundary.assign(m.num_vertices(), false);
  for (const Face& f : m.faces) {
    if (f.boundary()) {
      m.vertex_on_boundary[f.v_lo] = true;
      m.vertex_on_boundary[f.v_hi] = true;
    }
  }

  double hmax = 0.0;
  for (int e = 0; e < m.num_elements(); ++e) {
    for (int s = 0; s < 3; ++s) {
      const Vec2 d = m.element_vertex(e, (s + 1) % 3) - m.element_vertex(e, s);
      hmax = std::max(hmax, d.norm());
    }
  }
  m.h = hmax;

  return m;
}

} // namespace edg
