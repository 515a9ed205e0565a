#include "edg/spaces.hpp"

#include "edg/errors.hpp"

#include <algorithm>

namespace edg {

SpaceSet build_trace_dofmap(const Mesh& mesh, int k) {
  if (k < 0)
    throw UsageError("polynomial order k must be nonnegative");

  SpaceSet sp;
  sp.k = k;
  sp.flux_per_elem = (k + 1) * (k + 2);
  sp.scalar_per_elem = (k + 2) * (k + 3) / 2;
  sp.n_flux = mesh.num_elements() * sp.flux_per_elem;
  sp.n_scalar = mesh.num_elements() * sp.scalar_per_elem;
  sp.trace_nodes_per_face = k + 2;

  const int nv = mesh.num_vertices();
  const int nf = mesh.num_faces();
  sp.n_trace = nv + nf * k;

  sp.trace_node_coords.resize(sp.n_trace);
  for (int v = 0; v < nv; ++v)
    sp.trace_node_coords[v] = mesh.vertex(v);

  sp.face_trace_dofs.resize(nf);
  std::vector<bool> constrained(sp.n_trace, false);
  for (int v = 0; v < nv; ++v)
    constrained[v] = mesh.vertex_on_boundary[v];

  for (int f = 0; f < nf; ++f) {
    const Face& face = mesh.faces[f];
    const Vec2 lo = mesh.vertex(face.v_lo);
    const Vec2 hi = mesh.vertex(face.v_hi);
    std::vector<int>& dofs = sp.face_trace_dofs[f];
    dofs.push_back(face.v_lo);
    for (int i = 1; i <= k; ++i) {
      const int dof = nv + f * k + (i - 1);
      const double t = double(i) / (k + 1);
      sp.trace_node_coords[dof] = lo + t * (hi - lo);
      constrained[dof] = face.boundary();
      dofs.push_back(dof);
    }
    dofs.push_back(face.v_hi);
  }

  sp.trace_free_index.assign(sp.n_trace, -1);
  sp.trace_con_index.assign(sp.n_trace, -1);
  for (int d = 0; d < sp.n_trace; ++d) {
    if (constrained[d])
      sp.trace_con_index[d] = sp.n_trace_con++;
    else
      sp.trace_free_index[d] = sp.n_trace_free++;
  }

  sp.elem_trace_dofs.resize(mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    std::vector<int>& dofs = sp.elem_trace_dofs[e];
    for (int s = 0; s < 3; ++s) {
      for (int d : sp.face_trace_dofs[mesh.element_faces[e][s]])
        if (std::find(dofs.begin(), dofs.end(), d) == dofs.end())
          dofs.push_back(d);
    }
  }

  return sp;
}

Vec interpolate_boundary(const ScalarFn& g, const SpaceSet& spaces) {
  Vec values(spaces.n_trace_con);
  for (int d = 0; d < spaces.n_trace; ++d) {
    const int c = spaces.trace_con_index[d];
    if (c >= 0)
      values(c) = g(spaces.trace_node_coords[d]);
  }
  return values;
}

} // namespace edg
