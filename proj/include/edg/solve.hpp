#pragma once

#include "edg/assembly.hpp"
#include "edg/condensation.hpp"
#include "edg/mesh.hpp"
#include "edg/problem.hpp"
#include "edg/spaces.hpp"
#include "edg/types.hpp"

namespace edg {

// Direct sparse LU solve with one step of iterative refinement. The result
// satisfies |Ax - b| / |b| <= 1e-10 or a FactorizationError is thrown; a
// singular matrix is reported the same way.
Vec sparse_solve(const SpMat& A, const Vec& b, double* rel_residual = nullptr);

enum class Approach { od, do_ };

struct SolutionFields {
  Vec q, p;         // flux coefficients
  Vec y, z, u;      // scalar coefficients
  Vec y_hat, z_hat; // free-trace coefficients
  Approach approach = Approach::od;
  double linear_residual = 0.0; // relative residual of the final solve(s)
};

// Fully coupled optimality system, unknowns ordered fluxes (q, p), scalars
// (y, z), traces (y_hat, z_hat), control (u); equation rows in the same
// order (state/adjoint flux, state/adjoint scalar, state/adjoint trace,
// optimality). Block rows:
//
//   A1 q - A2 y + A3 yh                                   = -b2
//   A1 p - A2 z + A3 zh                                   = 0
//   A2^T q + A4 y + A5 yh - A6 u                          = b3 - b4
//   A2^T p - A6 y + A4a z + A5a zh                        = -b1
//   A3^T q + A7 y + (Ctr - A8) yh                         = b_trace - ctr_con
//   A3^T p + A7a z - (A8a + Ctr) zh                       = 0
//   A6 z + gamma A6 u                                     = 0
struct OdSystem {
  SpMat K;
  Vec rhs;
  int off_q = 0, off_p = 0, off_y = 0, off_z = 0;
  int off_yhat = 0, off_zhat = 0, off_u = 0;
  int n_flux = 0, n_scalar = 0, n_trace_free = 0;
};

OdSystem build_od_system(const AssembledSystem& sys, double gamma);

// Optimize-then-discretize: the coupled optimality system condensed onto the
// two trace fields (the control is eliminated element-locally through the
// gradient condition), then one sparse solve of size 2 * n_trace_free. The
// reported linear_residual certifies the recovered solution against the
// uncondensed system above.
SolutionFields solve_od(const Mesh& mesh, const SpaceSet& spaces,
                        const EdgParams& params, const ProblemData& data);

// Reduced equality-constrained QP of the discretize-then-optimize path,
// over (trace, control):
//   min 1/2 [g z]^T [B1 B2; B3 B4] [g z] + [b5 b6].[g z]
//   s.t. G5 g + G6 z = H3,
// assembled as the KKT saddle system K [g; z; lambda] = rhs.
struct ReducedQp {
  SpMat B1, B2, B3, B4;
  Vec b5, b6;
  SpMat K;
  Vec rhs;
};

ReducedQp build_reduced_qp(const CondensedOperators& ops,
                           const BlockSystem& blocks, double gamma);

// Discretize-then-optimize: condense, solve the reduced KKT system,
// reconstruct (q, y), then recover the duals (p, z, zh) from the discrete
// adjoint equations with the Lagrangian-consistent tau2 = tau1 - beta.n
// (any tau2 override applies to the OD discretization only).
SolutionFields solve_do(const Mesh& mesh, const SpaceSet& spaces,
                        const EdgParams& params, const ProblemData& data);

// Per-field relative discrepancy |a - b|_inf / max(|a|_inf, |b|_inf)
// (0 when both vanish). Throws InvalidComparisonError on size mismatch.
struct CommutativityReport {
  double q = 0, p = 0, y = 0, z = 0, u = 0, y_hat = 0, z_hat = 0;
  double max() const;
};

CommutativityReport check_commutativity(const SolutionFields& od,
                                        const SolutionFields& do_);

} // namespace edg
