#pragma once

#include "edg/mesh.hpp"
#include "edg/types.hpp"

#include <vector>

namespace edg {

// Degrees of freedom for one polynomial order k:
//   flux space     [P_k]^2, discontinuous, (k+1)(k+2) dofs per element
//                  (x-component block first, then y-component),
//   scalar space   P_{k+1}, discontinuous, (k+2)(k+3)/2 dofs per element,
//   trace space    continuous piecewise P_{k+1} on the mesh skeleton.
//
// Trace dofs are Lagrange nodes: one per mesh vertex (shared by all faces
// meeting there) plus k interior nodes per face. A trace dof is constrained
// when its node lies on the domain boundary -- including endpoints of
// interior faces -- so the discrete trace is globally continuous once the
// constrained dofs carry interpolated boundary data. The remaining free dofs
// are the trace unknowns.
struct SpaceSet {
  int k = 0;

  int flux_per_elem = 0;
  int scalar_per_elem = 0;
  int n_flux = 0;
  int n_scalar = 0;

  int trace_nodes_per_face = 0; // k + 2
  int n_trace = 0;              // all skeleton nodes
  int n_trace_free = 0;
  int n_trace_con = 0;

  // Global trace dof -> free / constrained index (-1 where not applicable).
  std::vector<int> trace_free_index;
  std::vector<int> trace_con_index;
  std::vector<Vec2> trace_node_coords;

  // Per face: its k+2 trace dofs ordered along the face parameter
  // [v_lo, interior nodes ascending, v_hi].
  std::vector<std::vector<int>> face_trace_dofs;

  // Per element: the unique trace dofs on its three sides (deterministic
  // order: sides in local order, each face's dofs in face order, repeats
  // skipped).
  std::vector<std::vector<int>> elem_trace_dofs;

  int flux_offset(int e) const { return e * flux_per_elem; }
  int scalar_offset(int e) const { return e * scalar_per_elem; }
};

// Enumerate all dof maps for order k on the given mesh.
SpaceSet build_trace_dofmap(const Mesh& mesh, int k);

// Values of the boundary interpolant I_h g at the constrained trace nodes,
// in constrained-index order.
Vec interpolate_boundary(const ScalarFn& g, const SpaceSet& spaces);

} // namespace edg
