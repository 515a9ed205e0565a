#pragma once

#include "edg/mesh.hpp"
#include "edg/problem.hpp"
#include "edg/spaces.hpp"
#include "edg/types.hpp"

#include <iosfwd>
#include <optional>

namespace edg {

// Parameters of the stabilized bilinear forms. The adjoint stabilization
// defaults to the consistent choice tau2 = tau1 - beta.n per element side;
// tau2_override replaces it with a constant, which breaks the equivalence of
// the optimize-then-discretize and discretize-then-optimize paths (useful as
// an experiment, see check_commutativity).
struct EdgParams {
  VectorFn beta;
  ScalarFn div_beta;
  double tau1 = 1.0;
  double gamma = 1.0;
  std::optional<double> tau2_override;
};

EdgParams params_from(const ProblemSpec& spec);

// Matrix blocks of the discrete state (constraint) equations in the unknowns
// (flux a, scalar b, free trace c, control z):
//
//   A1 a - A2 b + A3 c          = -b2
//   A2^T a + A4 b + A5 c - A6 z = b3 - b4
//   A3^T a + A7 b - A8 c        = b_trace
//
// b1 is the objective data vector (y_d, phi_i). A1/A2/A4/A6 are element
// block diagonal, A3/A5 couple each element to the trace dofs on its own
// sides, A7/A8 live on the skeleton. The right-hand sides collect the
// interpolated Dirichlet data, including contributions of constrained trace
// nodes sitting on interior faces.
struct BlockSystem {
  SpMat A1, A2, A3, A4, A5, A6, A7, A8;
  Vec b1, b2, b3, b4, b_trace;
  int n_flux = 0;
  int n_scalar = 0;
  int n_trace_free = 0;
};

// Blocks of the adjoint equations discretized with tau2 (same layout as the
// corresponding state blocks; A1/A2/A3/A6 are shared).
struct AdjointBlocks {
  SpMat A4, A5, A7, A8;
};

// Result of one assembly sweep. Ctr is the skeleton convection block
// <beta.n psi_j, psi_i> summed over element boundaries; its interior-face
// contributions cancel pairwise, but the optimize-then-discretize trace rows
// contain it literally, so it is kept. ctr_con is the action of its
// constrained columns on the boundary data.
struct AssembledSystem {
  BlockSystem state;
  AdjointBlocks adjoint;
  SpMat Ctr;
  Vec ctr_con;
  Vec ghat;
};

enum class Tau2Rule {
  from_params, // honor tau2_override when present
  derived      // always tau1 - beta.n
};

// Assemble both equation families. Assembly is single threaded; element and
// face contributions are scatter-added serially in a fixed order, so results
// are bitwise reproducible. Throws StabilizationError if tau1 - beta.n/2 <= 0
// at any face quadrature point.
AssembledSystem assemble_all(const Mesh& mesh, const SpaceSet& spaces,
                             const EdgParams& params, const ProblemData& data,
                             Tau2Rule tau2rule);

// State-family blocks only.
BlockSystem assemble_blocks(const Mesh& mesh, const SpaceSet& spaces,
                            const EdgParams& params, const ProblemData& data);

// Coefficients of one member of each discrete space; trace holds the free
// (interior) dofs only, constrained nodes are treated as zero.
struct DiscreteTriple {
  Vec flux;
  Vec scalar;
  Vec trace;
};

// Direct quadrature evaluation of the state/adjoint forms B1(u; v), B2(u; v)
// term by term. Deliberately independent of the assembled matrices so the
// two can be checked against each other.
double apply_B1(const DiscreteTriple& u, const DiscreteTriple& v,
                const Mesh& mesh, const SpaceSet& spaces,
                const EdgParams& params);
double apply_B2(const DiscreteTriple& u, const DiscreteTriple& v,
                const Mesh& mesh, const SpaceSet& spaces,
                const EdgParams& params);

// Coordinate text dump: one "row col value" line per stored entry.
void dump_matrix(const SpMat& m, std::ostream& os);

} // namespace edg
