#pragma once

#include "edg/assembly.hpp"
#include "edg/mesh.hpp"
#include "edg/spaces.hpp"
#include "edg/types.hpp"

#include <Eigen/Dense>
#include <vector>

namespace edg {

// Per-element data retained for the local back-substitution: factorizations
// of the element blocks of A1 and S = A4 + A2^T A1^{-1} A2 plus the element
// slices of the coupling blocks and right-hand sides.
struct ElementFactors {
  Eigen::LLT<Mat> A1_llt;
  Eigen::PartialPivLU<Mat> S_lu;
  Mat A2, A3, A5, A6; // local slices; A3/A5 columns follow free_trace
  Vec b2, b34;        // slices of b2 and b3 - b4
  std::vector<int> free_trace; // global free-trace indices on this element
};

// Statically condensed form of the block system. Eliminating the flux and
// scalar unknowns element by element expresses them through the free trace
// unknowns c and the control z,
//
//   a = G1 c + G2 z + H1,      b = G3 c + G4 z + H2,
//
// and reduces the trace equation to G5 c + G6 z = H3 with
//
//   G5 = A3^T G1 + A7 G3 - A8,   G6 = A3^T G2 + A7 G4,
//   H3 = b_trace - A3^T H1 - A7 H2.
//
// No global dense inverse is ever formed; all eliminations act on one
// element block at a time.
struct CondensedOperators {
  SpMat G1, G2, G3, G4, G5, G6;
  Vec H1, H2, H3;
  std::vector<ElementFactors> elems;
  int n_flux = 0;
  int n_scalar = 0;
  int n_trace_free = 0;
};

// Throws CondensationError naming the element whose local block fails to
// factorize.
CondensedOperators condense(const BlockSystem& blocks, const Mesh& mesh,
                            const SpaceSet& spaces);

// Recover the eliminated flux and scalar coefficients for given trace and
// control vectors by element-local back-substitution.
struct ReconstructedFields {
  Vec flux;
  Vec scalar;
};

ReconstructedFields reconstruct(const CondensedOperators& ops,
                                const Vec& trace, const Vec& control);

} // namespace edg
