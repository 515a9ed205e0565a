#pragma once

#include "edg/types.hpp"

#include <array>
#include <iosfwd>
#include <vector>

namespace edg {

// Diagonal orientation used to split each grid cell into two triangles.
enum class Diagonal { lower_left_to_upper_right };

struct FaceSide {
  int element = -1;
  int local_side = -1;
};

// A mesh face (edge of the skeleton). Identified by its sorted vertex pair
// (v_lo < v_hi); carries the one or two adjacent elements together with the
// local side index each of them sees the face under.
struct Face {
  int v_lo = -1;
  int v_hi = -1;
  std::array<FaceSide, 2> sides{};
  int n_sides = 0;
  bool boundary() const { return n_sides == 1; }
};

// Conforming triangulation of the unit square. Immutable after construction
// and safe to share across threads.
//
// Element vertices are stored counterclockwise; local side s runs from local
// vertex s to local vertex (s+1)%3 and its outward normal is the clockwise
// rotation of that edge direction.
class Mesh {
public:
  int n = 0;        // cells per coordinate direction of the generating grid
  double h = 0.0;   // mesh size: max element diameter (= sqrt(2)/n here)

  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Face> faces;
  std::vector<std::array<int, 3>> element_faces; // face id per local side
  std::vector<bool> vertex_on_boundary;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_elements() const { return static_cast<int>(triangles.size()); }
  int num_faces() const { return static_cast<int>(faces.size()); }

  const Vec2& vertex(int v) const { return vertices[v]; }
  Vec2 element_vertex(int e, int local) const { return vertices[triangles[e][local]]; }

  double area(int e) const;
  double face_length(int f) const;

  // Unit outward normal of element e across its local side s.
  Vec2 outward_normal(int e, int side) const;

  // Plain-text dump: all vertices (x y per line) followed by all triangles
  // (three vertex ids per line). Debugging aid only.
  void dump(std::ostream& os) const;
};

// Build the structured triangulation with n x n cells, each split along the
// chosen diagonal. Throws UsageError for n < 1.
Mesh build_structured(int n, Diagonal diag = Diagonal::lower_left_to_upper_right);

} // namespace edg
