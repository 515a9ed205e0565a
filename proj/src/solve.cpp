#include "edg/solve.hpp"

#include "edg/errors.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <vector>

namespace edg {
namespace {

void add_block(std::vector<Triplet>& out, const SpMat& m, int row0, int col0,
               double scale = 1.0) {
  for (int c = 0; c < m.outerSize(); ++c)
    for (SpMat::InnerIterator it(m, c); it; ++it)
      out.emplace_back(row0 + static_cast<int>(it.row()),
                       col0 + static_cast<int>(it.col()), scale * it.value());
}

void add_block_t(std::vector<Triplet>& out, const SpMat& m, int row0, int col0,
                 double scale = 1.0) {
  for (int c = 0; c < m.outerSize(); ++c)
    for (SpMat::InnerIterator it(m, c); it; ++it)
      out.emplace_back(row0 + static_cast<int>(it.col()),
                       col0 + static_cast<int>(it.row()), scale * it.value());
}

double rel_residual_of(const SpMat& A, const Vec& x, const Vec& b) {
  const double bn = b.norm();
  const double rn = (b - A * x).norm();
  return bn > 0.0 ? rn / bn : rn;
}

} // namespace

Vec sparse_solve(const SpMat& A, const Vec& b, double* rel_residual) {
  if (A.rows() != A.cols() || A.rows() != b.size())
    throw UsageError("sparse_solve: dimension mismatch");

  SpMat Ac = A;
  Ac.makeCompressed();
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(Ac);
  if (lu.info() != Eigen::Success)
    throw FactorizationError("sparse LU factorization failed: " +
                             lu.lastErrorMessage());

  Vec x = lu.solve(b);
  // Iterative refinement; one step normally lands far below the 1e-10
  // residual contract, the cap guards pathological matrices.
  double res = rel_residual_of(Ac, x, b);
  for (int it = 0; it < 3 && res > 1e-13; ++it) {
    x += lu.solve(Vec(b - Ac * x));
    res = rel_residual_of(Ac, x, b);
  }
  if (!(res <= 1e-10))
    throw FactorizationError(
        "sparse solve residual " + std::to_string(res) +
        " exceeds 1e-10; matrix is numerically singular");
  if (rel_residual)
    *rel_residual = res;
  return x;
}

OdSystem build_od_system(const AssembledSystem& sys, double gamma) {
  const BlockSystem& st = sys.state;
  const AdjointBlocks& ad = sys.adjoint;
  const int n1 = st.n_flux, n2 = st.n_scalar, n3 = st.n_trace_free;

  OdSystem od;
  od.n_flux = n1;
  od.n_scalar = n2;
  od.n_trace_free = n3;
  od.off_q = 0;
  od.off_p = n1;
  od.off_y = 2 * n1;
  od.off_z = 2 * n1 + n2;
  od.off_yhat = 2 * n1 + 2 * n2;
  od.off_zhat = 2 * n1 + 2 * n2 + n3;
  od.off_u = 2 * n1 + 2 * n2 + 2 * n3;
  const int N = 2 * n1 + 3 * n2 + 2 * n3;

  // Row offsets coincide with the unknown offsets: state flux rows sit with
  // q, adjoint flux rows with p, and so on.
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(st.A1.nonZeros()) * 2 +
            static_cast<std::size_t>(st.A2.nonZeros()) * 4 +
            static_cast<std::size_t>(st.A4.nonZeros()) * 2 +
            static_cast<std::size_t>(st.A6.nonZeros()) * 4);

  add_block(t, st.A1, od.off_q, od.off_q);
  add_block(t, st.A2, od.off_q, od.off_y, -1.0);
  add_block(t, st.A3, od.off_q, od.off_yhat);

  add_block(t, st.A1, od.off_p, od.off_p);
  add_block(t, st.A2, od.off_p, od.off_z, -1.0);
  add_block(t, st.A3, od.off_p, od.off_zhat);

  add_block_t(t, st.A2, od.off_y, od.off_q);
  add_block(t, st.A4, od.off_y, od.off_y);
  add_block(t, st.A5, od.off_y, od.off_yhat);
  add_block(t, st.A6, od.off_y, od.off_u, -1.0);

  add_block_t(t, st.A2, od.off_z, od.off_p);
  add_block(t, st.A6, od.off_z, od.off_y, -1.0);
  add_block(t, ad.A4, od.off_z, od.off_z);
  add_block(t, ad.A5, od.off_z, od.off_zhat);

  add_block_t(t, st.A3, od.off_yhat, od.off_q);
  add_block(t, st.A7, od.off_yhat, od.off_y);
  add_block(t, sys.Ctr, od.off_yhat, od.off_yhat);
  add_block(t, st.A8, od.off_yhat, od.off_yhat, -1.0);

  add_block_t(t, st.A3, od.off_zhat, od.off_p);
  add_block(t, ad.A7, od.off_zhat, od.off_z);
  add_block(t, ad.A8, od.off_zhat, od.off_zhat, -1.0);
  add_block(t, sys.Ctr, od.off_zhat, od.off_zhat, -1.0);

  add_block(t, st.A6, od.off_u, od.off_z);
  add_block(t, st.A6, od.off_u, od.off_u, gamma);

  od.K.resize(N, N);
  od.K.setFromTriplets(t.begin(), t.end());

  od.rhs = Vec::Zero(N);
  od.rhs.segment(od.off_q, n1) = -st.b2;
  od.rhs.segment(od.off_y, n2) = st.b3 - st.b4;
  od.rhs.segment(od.off_z, n2) = -st.b1;
  od.rhs.segment(od.off_yhat, n3) = st.b_trace - sys.ctr_con;
  return od;
}

namespace {

// Dense element slices of the global sparse blocks (contiguous rows).
Mat slice_rows_cols(const SpMat& m, int row0, int rows, int col0, int cols) {
  Mat out = Mat::Zero(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (SpMat::InnerIterator it(m, col0 + c); it; ++it) {
      const int r = static_cast<int>(it.row()) - row0;
      if (r >= 0 && r < rows)
        out(r, c) = it.value();
    }
  return out;
}

Mat slice_rows_sel(const SpMat& m, int row0, int rows,
                   const std::vector<int>& cols) {
  Mat out = Mat::Zero(rows, static_cast<int>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (SpMat::InnerIterator it(m, cols[c]); it; ++it) {
      const int r = static_cast<int>(it.row()) - row0;
      if (r >= 0 && r < rows)
        out(r, static_cast<int>(c)) = it.value();
    }
  return out;
}

// Rows restricted to the element's free-trace dofs, contiguous columns.
Mat slice_sel_rows(const SpMat& m, const std::vector<int>& rows, int col0,
                   int cols) {
  Mat out = Mat::Zero(static_cast<int>(rows.size()), cols);
  for (int c = 0; c < cols; ++c)
    for (SpMat::InnerIterator it(m, col0 + c); it; ++it)
      for (std::size_t r = 0; r < rows.size(); ++r)
        if (rows[r] == static_cast<int>(it.row()))
          out(static_cast<int>(r), c) = it.value();
  return out;
}

} // namespace

SolutionFields solve_od(const Mesh& mesh, const SpaceSet& sp,
                        const EdgParams& params, const ProblemData& data) {
  const AssembledSystem sys =
      assemble_all(mesh, sp, params, data, Tau2Rule::from_params);
  const BlockSystem& st = sys.state;
  const AdjointBlocks& ad = sys.adjoint;
  const double gamma = params.gamma;
  const int n1 = st.n_flux, n2 = st.n_scalar, n3 = st.n_trace_free;
  const int m1 = sp.flux_per_elem, m2 = sp.scalar_per_elem;
  const int nl = 2 * m1 + 2 * m2; // local unknowns (q, p, y, z); u = -z/gamma
  const int oq = 0, op = m1, oy = 2 * m1, oz = 2 * m1 + m2;

  // Condense the element-local fields of the coupled optimality system onto
  // the two trace fields; the full system would demand far more factorization
  // memory than the trace system for no gain in the computed solution.
  std::vector<Triplet> tK;
  Vec rhs = Vec::Zero(2 * n3);
  rhs.head(n3) = st.b_trace - sys.ctr_con;

  struct LocalSolve {
    Eigen::PartialPivLU<Mat> lu;
    Mat W;  // local response to the element trace values
    Vec w0; // local response to the data
    std::vector<int> free_trace;
  };
  std::vector<LocalSolve> locals(mesh.num_elements());

  for (int e = 0; e < mesh.num_elements(); ++e) {
    LocalSolve& ls = locals[e];
    const int f0 = sp.flux_offset(e), s0 = sp.scalar_offset(e);
    for (int d : sp.elem_trace_dofs[e]) {
      const int fr = sp.trace_free_index[d];
      if (fr >= 0)
        ls.free_trace.push_back(fr);
    }
    const int te = static_cast<int>(ls.free_trace.size());

    const Mat A1e = slice_rows_cols(st.A1, f0, m1, f0, m1);
    const Mat A2e = slice_rows_cols(st.A2, f0, m1, s0, m2);
    const Mat A4e = slice_rows_cols(st.A4, s0, m2, s0, m2);
    const Mat A6e = slice_rows_cols(st.A6, s0, m2, s0, m2);
    const Mat A4ae = slice_rows_cols(ad.A4, s0, m2, s0, m2);
    const Mat A3e = slice_rows_sel(st.A3, f0, m1, ls.free_trace);
    const Mat A5e = slice_rows_sel(st.A5, s0, m2, ls.free_trace);
    const Mat A5ae = slice_rows_sel(ad.A5, s0, m2, ls.free_trace);

    Mat L = Mat::Zero(nl, nl);
    L.block(oq, oq, m1, m1) = A1e;
    L.block(oq, oy, m1, m2) = -A2e;
    L.block(op, op, m1, m1) = A1e;
    L.block(op, oz, m1, m2) = -A2e;
    L.block(oy, oq, m2, m1) = A2e.transpose();
    L.block(oy, oy, m2, m2) = A4e;
    L.block(oy, oz, m2, m2) = A6e / gamma;
    L.block(oz, op, m2, m1) = A2e.transpose();
    L.block(oz, oy, m2, m2) = -A6e;
    L.block(oz, oz, m2, m2) = A4ae;

    ls.lu.compute(L);
    const Vec upiv = ls.lu.matrixLU().diagonal();
    for (int i = 0; i < upiv.size(); ++i)
      if (!(std::abs(upiv(i)) > 0.0))
        throw FactorizationError(
            "coupled local elimination failed on element " +
            std::to_string(e));

    Mat R = Mat::Zero(nl, 2 * te);
    R.block(oq, 0, m1, te) = A3e;
    R.block(op, te, m1, te) = A3e;
    R.block(oy, 0, m2, te) = A5e;
    R.block(oz, te, m2, te) = A5ae;

    Vec r0 = Vec::Zero(nl);
    r0.segment(oq, m1) = -st.b2.segment(f0, m1);
    r0.segment(oy, m2) = st.b3.segment(s0, m2) - st.b4.segment(s0, m2);
    r0.segment(oz, m2) = -st.b1.segment(s0, m2);

    ls.W = ls.lu.solve(R);
    ls.w0 = ls.lu.solve(r0);

    const Mat A7e = slice_sel_rows(st.A7, ls.free_trace, s0, m2);
    const Mat A7ae = slice_sel_rows(ad.A7, ls.free_trace, s0, m2);
    Mat T = Mat::Zero(2 * te, nl);
    T.block(0, oq, te, m1) = A3e.transpose();
    T.block(0, oy, te, m2) = A7e;
    T.block(te, op, te, m1) = A3e.transpose();
    T.block(te, oz, te, m2) = A7ae;

    const Mat Ke = -T * ls.W;
    const Vec re = T * ls.w0;
    for (int i = 0; i < 2 * te; ++i) {
      const int ri = (i < te ? ls.free_trace[i]
                             : n3 + ls.free_trace[i - te]);
      rhs(ri) -= re(i);
      for (int j = 0; j < 2 * te; ++j) {
        const int cj = (j < te ? ls.free_trace[j]
                               : n3 + ls.free_trace[j - te]);
        tK.emplace_back(ri, cj, Ke(i, j));
      }
    }
  }

  add_block(tK, sys.Ctr, 0, 0);
  add_block(tK, st.A8, 0, 0, -1.0);
  add_block(tK, ad.A8, n3, n3, -1.0);
  add_block(tK, sys.Ctr, n3, n3, -1.0);

  SpMat K(2 * n3, 2 * n3);
  K.setFromTriplets(tK.begin(), tK.end());

  SolutionFields out;
  out.approach = Approach::od;
  const Vec c = sparse_solve(K, rhs);
  out.y_hat = c.head(n3);
  out.z_hat = c.tail(n3);

  out.q = Vec::Zero(n1);
  out.p = Vec::Zero(n1);
  out.y = Vec::Zero(n2);
  out.z = Vec::Zero(n2);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const LocalSolve& ls = locals[e];
    const int te = static_cast<int>(ls.free_trace.size());
    Vec ce(2 * te);
    for (int i = 0; i < te; ++i) {
      ce(i) = out.y_hat(ls.free_trace[i]);
      ce(te + i) = out.z_hat(ls.free_trace[i]);
    }
    const Vec w = ls.w0 - ls.W * ce;
    out.q.segment(sp.flux_offset(e), m1) = w.segment(oq, m1);
    out.p.segment(sp.flux_offset(e), m1) = w.segment(op, m1);
    out.y.segment(sp.scalar_offset(e), m2) = w.segment(oy, m2);
    out.z.segment(sp.scalar_offset(e), m2) = w.segment(oz, m2);
  }
  out.u = -out.z / gamma;

  // Certify against the uncondensed optimality system.
  const OdSystem od = build_od_system(sys, gamma);
  Vec x = Vec::Zero(od.K.rows());
  x.segment(od.off_q, n1) = out.q;
  x.segment(od.off_p, n1) = out.p;
  x.segment(od.off_y, n2) = out.y;
  x.segment(od.off_z, n2) = out.z;
  x.segment(od.off_yhat, n3) = out.y_hat;
  x.segment(od.off_zhat, n3) = out.z_hat;
  x.segment(od.off_u, n2) = out.u;
  out.linear_residual = rel_residual_of(od.K, x, od.rhs);
  if (!(out.linear_residual <= 1e-10))
    throw FactorizationError("condensed optimality solve residual " +
                             std::to_string(out.linear_residual) +
                             " exceeds 1e-10");
  return out;
}

ReducedQp build_reduced_qp(const CondensedOperators& ops,
                           const BlockSystem& blocks, double gamma) {
  const SpMat& A6 = blocks.A6;
  const SpMat A6G3 = A6 * ops.G3;
  const SpMat A6G4 = A6 * ops.G4;

  ReducedQp qp;
  qp.B1 = ops.G3.transpose() * A6G3;
  qp.B2 = ops.G3.transpose() * A6G4;
  qp.B3 = ops.G4.transpose() * A6G3;
  qp.B4 = SpMat(ops.G4.transpose() * A6G4) + SpMat(gamma * A6);

  const Vec r = A6 * ops.H2 - blocks.b1;
  qp.b5 = ops.G3.transpose() * r;
  qp.b6 = ops.G4.transpose() * r;

  const int n3 = blocks.n_trace_free, n2 = blocks.n_scalar;
  std::vector<Triplet> t;
  add_block(t, qp.B1, 0, 0);
  add_block(t, qp.B2, 0, n3);
  add_block_t(t, ops.G5, 0, n3 + n2);
  add_block(t, qp.B3, n3, 0);
  add_block(t, qp.B4, n3, n3);
  add_block_t(t, ops.G6, n3, n3 + n2);
  add_block(t, ops.G5, n3 + n2, 0);
  add_block(t, ops.G6, n3 + n2, n3);

  const int N = 2 * n3 + n2;
  qp.K.resize(N, N);
  qp.K.setFromTriplets(t.begin(), t.end());
  qp.rhs = Vec::Zero(N);
  qp.rhs.head(n3) = -qp.b5;
  qp.rhs.segment(n3, n2) = -qp.b6;
  qp.rhs.tail(n3) = ops.H3;
  return qp;
}

SolutionFields solve_do(const Mesh& mesh, const SpaceSet& spaces,
                        const EdgParams& params, const ProblemData& data) {
  const AssembledSystem sys =
      assemble_all(mesh, spaces, params, data, Tau2Rule::derived);
  const BlockSystem& st = sys.state;
  const CondensedOperators ops = condense(st, mesh, spaces);
  const ReducedQp qp = build_reduced_qp(ops, st, params.gamma);

  double res_kkt = 0.0;
  const Vec x = sparse_solve(qp.K, qp.rhs, &res_kkt);
  const int n1 = st.n_flux, n2 = st.n_scalar, n3 = st.n_trace_free;

  SolutionFields out;
  out.approach = Approach::do_;
  out.y_hat = x.head(n3);
  out.u = x.segment(n3, n2);

  const ReconstructedFields rec = reconstruct(ops, out.y_hat, out.u);
  out.q = rec.flux;
  out.y = rec.scalar;

  const AdjointBlocks& ad = sys.adjoint;
  std::vector<Triplet> t;
  add_block(t, st.A1, 0, 0);
  add_block(t, st.A2, 0, n1, -1.0);
  add_block(t, st.A3, 0, n1 + n2);
  add_block_t(t, st.A2, n1, 0);
  add_block(t, ad.A4, n1, n1);
  add_block(t, ad.A5, n1, n1 + n2);
  add_block_t(t, st.A3, n1 + n2, 0);
  add_block(t, ad.A7, n1 + n2, n1);
  add_block(t, ad.A8, n1 + n2, n1 + n2, -1.0);
  add_block(t, sys.Ctr, n1 + n2, n1 + n2, -1.0);
  SpMat K(n1 + n2 + n3, n1 + n2 + n3);
  K.setFromTriplets(t.begin(), t.end());
  Vec rhs = Vec::Zero(n1 + n2 + n3);
  rhs.segment(n1, n2) = st.A6 * out.y - st.b1;

  double res_adj = 0.0;
  const Vec xa = sparse_solve(K, rhs, &res_adj);
  out.p = xa.head(n1);
  out.z = xa.segment(n1, n2);
  out.z_hat = xa.tail(n3);
  out.linear_residual = std::max(res_kkt, res_adj);
  return out;
}

namespace {

double rel_discrepancy(const Vec& a, const Vec& b) {
  if (a.size() != b.size())
    throw InvalidComparisonError(
        "cannot compare fields of different discretizations");
  if (a.size() == 0)
    return 0.0;
  const double scale =
      std::max(a.lpNorm<Eigen::Infinity>(), b.lpNorm<Eigen::Infinity>());
  return scale > 0.0 ? (a - b).lpNorm<Eigen::Infinity>() / scale : 0.0;
}

} // namespace

double CommutativityReport::max() const {
  return std::max({q, p, y, z, u, y_hat, z_hat});
}

CommutativityReport check_commutativity(const SolutionFields& od,
                                        const SolutionFields& do_) {
  CommutativityReport r;
  r.q = rel_discrepancy(od.q, do_.q);
  r.p = rel_discrepancy(od.p, do_.p);
  r.y = rel_discrepancy(od.y, do_.y);
  r.z = rel_discrepancy(od.z, do_.z);
  r.u = rel_discrepancy(od.u, do_.u);
  r.y_hat = rel_discrepancy(od.y_hat, do_.y_hat);
  r.z_hat = rel_discrepancy(od.z_hat, do_.z_hat);
  return r;
}

} // namespace edg
